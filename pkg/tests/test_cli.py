import io
import subprocess
import sys

import numpy as np
import pytest

from polarlist.cli import EXIT_CONFIG, EXIT_OK, CliError, main, parse_args, read_hex_llrs
from polarlist.code_model import encode_systematic
from polarlist.report import read_csv


def run(argv):
    buf = io.StringIO()
    code = main(argv, out=buf)
    return code, buf.getvalue()


def test_headline_flags_resolve():
    inv = parse_args("--N 2048 --K 1723 --crc 32-GZIP --dec FA-SSCL --L 32 --prec 8 --snr 3.5:4.5:0.5".split())
    assert (inv.code.n_codeword, inv.code.k_info, inv.code.crc_spec.name) == (2048, 1723, "32-GZIP")
    assert (inv.decoder, inv.L, inv.precision) == ("FA-SSCL", 32, 8)
    assert inv.ebn0 == [3.5, 4.0, 4.5]
    assert inv.pruning.rep_max_size == 8


def test_no_args_prints_defaults():
    code, text = run([])
    assert code == EXIT_OK
    assert "usage" in text and "--N" in text and "2048" in text


@pytest.mark.parametrize("argv,kind,flag", [
    ("--N 1000", "BadValue", "--N"),
    ("--dec SC --crc 8", "ConflictingFlags", "--crc"),
    ("--dec SC --L 4", "ConflictingFlags", "--L"),
    ("--dec SCL --nodes R0,R1", "ConflictingFlags", "--nodes"),
    ("--prec 32 --quant-scale 4", "ConflictingFlags", "--quant-scale"),
    ("--dec CA-SSCL --crc none", "ConflictingFlags", "--crc"),
    ("--L 3", "BadValue", "--L"),
    ("--prec 12", "BadValue", "--prec"),
    ("--nodes R7", "BadValue", "--nodes"),
    ("--snr 3:2:0.5", "BadValue", "--snr"),
    ("--dec XYZ", "BadValue", "--dec"),
    ("--bogus 1", "UnknownFlag", "--bogus"),
    ("--snr=1 --nope=2", "UnknownFlag", "--nope"),
])
def test_config_errors(argv, kind, flag):
    with pytest.raises(CliError) as err:
        parse_args(argv.split())
    assert err.value.kind == kind
    assert err.value.flag == flag


def test_config_error_exit_code(capsys):
    code, _ = run(["--N", "1000"])
    assert code == EXIT_CONFIG
    assert "puncture" in capsys.readouterr().err


def test_sim_writes_csv_and_plot(tmp_path):
    out = tmp_path / "res.csv"
    argv = ["sim", "--N", "128", "--K", "56", "--dec", "CA-SSCL", "--L", "4", "--crc", "8",
            "--snr", "1:2:1", "--max-frames", "200", "--max-fe", "20", "--seed", "42", "--out", str(out)]
    assert main(argv) == EXIT_OK
    text = out.read_text()
    assert "# seed: 42" in text
    assert "# version: polarlist" in text
    rows = read_csv(out)
    assert [r["ebn0_db"] for r in rows] == [1.0, 2.0]
    assert out.with_suffix(".png").stat().st_size > 1000


def test_sim_rows_repeat_byte_for_byte():
    argv = ["--N", "64", "--K", "32", "--dec", "SSC", "--snr", "1", "--max-frames", "300",
            "--no-timing", "--format", "csv"]
    a, b = run(argv)[1], run(argv)[1]
    data = [ln for ln in a.splitlines() if not ln.startswith("#")]
    assert data == [ln for ln in b.splitlines() if not ln.startswith("#")]
    assert len(data) == 2


def test_table_format():
    code, text = run(["--N", "64", "--K", "32", "--dec", "SC", "--snr", "2", "--max-frames", "50",
                      "--format", "table"])
    assert code == EXIT_OK
    header = [ln for ln in text.splitlines() if not ln.startswith("#")][0]
    assert header.split() == ["ebn0_db", "frames", "bit_errors", "frame_errors", "ber", "fer",
                              "ti_mbps", "lat_avg_us", "lat_worst_us", "esc_mean"]


def test_construct_then_reuse(tmp_path):
    path = tmp_path / "frozen.txt"
    assert main(["construct", "--N", "256", "--K", "100", "--crc", "none", "--dec", "SSCL",
                 "--design-snr", "2", "--out", str(path)]) == EXIT_OK
    assert path.read_text().splitlines()[0] == "256 100"
    inv = parse_args(["info", "--frozen-file", str(path), "--dec", "SSCL", "--L", "4"])
    assert inv.code.k_info == 100
    with pytest.raises(CliError) as err:
        parse_args(["--frozen-file", str(path), "--N", "512", "--dec", "SSC"])
    assert err.value.kind == "ConflictingFlags"


def test_info_histogram():
    code, text = run(["info", "--N", "16", "--K", "8", "--dec", "SSC", "--snr", "2"])
    assert code == EXIT_OK
    assert "terminal nodes:" in text


def test_decode_one_frame(tmp_path):
    inv = parse_args(["decode", "--N", "32", "--K", "16", "--dec", "SSC", "--snr", "3",
                      "--llr-file", str(tmp_path / "x")])
    info = np.arange(16) % 3 == 0
    x = encode_systematic(inv.code, info.astype(np.uint8))
    llr = np.where(x == 1, -40, 40)
    path = tmp_path / "frame.hex"
    path.write_text(" ".join(format(int(v), "x") for v in llr) + "  # one frame\n")
    np.testing.assert_array_equal(read_hex_llrs(path), llr)
    code, text = run(["decode", "--N", "32", "--K", "16", "--dec", "SSC", "--snr", "3",
                      "--llr-file", str(path)])
    assert code == EXIT_OK
    assert f"decision: {''.join(map(str, x))}" in text


def test_console_script_help():
    proc = subprocess.run([sys.executable, "-m", "polarlist.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for flag in ("--frozen-file", "--puncture-file", "--psum", "--max-fe", "--workers", "--format"):
        assert flag in proc.stdout

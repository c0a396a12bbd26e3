"""Command-line front end: ``polarlist {sim,decode,construct,info}``.

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from . import __version__
from .code_model import (
    PolarCode,
    build_code,
    construct_frozen_bhattacharyya,
    design_erasure_from_snr,
    format_frozen_text,
    is_power_of_two,
    load_puncture_file,
    read_frozen_file,
)
from .crc import PRESETS, parse_crc
from .decode_tree import PruneTree, PruningConfig, format_histogram, node_histogram
from .decoders import ALGORITHMS, Decoder
from .errors import ParseError, PolarError

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3
COMMANDS = ("sim", "decode", "construct", "info")

DEFAULTS: Dict[str, object] = {
    "N": 2048,
    "K": 1723,
    "crc": "auto",
    "dec": "FA-SSCL",
    "L": 32,
    "prec": 32,
    "quant_scale": "auto",
    "nodes": "auto",
    "psum": "copy",
    "snr": "3.5:4.5:0.5",
    "design_snr": "auto",
    "max_frames": 100000,
    "max_fe": 100,
    "seed": 0,
    "workers": 1,
    "format": "csv",
}

_NEEDS_CRC = {"CA-SSCL", "PA-SSCL", "FA-SSCL"}
_SC_FAMILY = {"SC", "SSC"}
_UNPRUNED = {"SC", "SCL"}


class CliError(Exception):
    """A configuration problem; ``kind`` is BadValue, ConflictingFlags or UnknownFlag."""

    def __init__(self, kind: str, flag: str, message: str):
        super().__init__(f"{flag}: {message}")
        self.kind = kind
        self.flag = flag


@dataclass
class CliInvocation:
    command: str
    code: PolarCode
    decoder: str
    L: int
    precision: int
    quant_scale: Optional[float]
    pruning: Optional[PruningConfig]
    layout: str
    ebn0: List[float]
    design_snr: float
    max_frames: Optional[int]
    max_fe: Optional[int]
    seed: int
    workers: int
    fmt: str
    out: Optional[Path]
    timing: bool = True
    plot: bool = True
    llr_file: Optional[Path] = None
    args: Dict[str, object] = field(default_factory=dict)

    def sim_config(self):
        from .channel_sim import SimConfig

        return SimConfig(self.code, self.decoder, L=self.L, precision=self.precision,
                         pruning=self.pruning, layout=self.layout, quant_scale=self.quant_scale,
                         ebn0=self.ebn0, max_frames=self.max_frames, max_fe=self.max_fe,
                         seed=self.seed, workers=self.workers, timing=self.timing)

    def make_decoder(self) -> Decoder:
        return Decoder(self.code, self.decoder, L=self.L, precision=self.precision,
                       pruning=self.pruning, layout=self.layout, quant_scale=self.quant_scale)


class _Parser(argparse.ArgumentParser):
    def parse_args(self, args=None, namespace=None):
        known = set(self._option_string_actions)
        for tok in args or []:
            if tok == "--":
                break
            if tok.startswith("--") and tok.split("=", 1)[0] not in known:
                raise CliError("UnknownFlag", tok.split("=", 1)[0], "unknown flag")
        return super().parse_args(args, namespace)

    def error(self, message):
        if "unrecognized arguments" in message:
            raise CliError("UnknownFlag", message.split(":", 1)[-1].strip(), "unknown flag")
        raise CliError("BadValue", self.prog, message)


def build_parser() -> argparse.ArgumentParser:
    d = DEFAULTS
    p = _Parser(prog="polarlist", description="Polar code construction, decoding and BER/FER simulation.")
    p.add_argument("--version", action="version", version=f"polarlist {__version__}")
    p.add_argument("command", nargs="?", choices=COMMANDS, default="sim",
                   help="sim (default), decode, construct or info")
    g = p.add_argument_group("code")
    g.add_argument("--N", type=int, help=f"codeword length, a power of two (default: {d['N']})")
    g.add_argument("--K", type=int, help=f"information bits, CRC excluded (default: {d['K']})")
    g.add_argument("--frozen-file", type=Path, help="frozen set file ('N K' line, then a 0/1 mask)")
    g.add_argument("--puncture-file", type=Path, help="puncture pattern file ('N' line, then T/P/S)")
    g.add_argument("--crc", help=f"CRC preset ({', '.join(PRESETS)}), width:poly:reflect:init:xorout "
                                 f"or none (default: 32-GZIP for CA/PA/FA decoders, else none)")
    g.add_argument("--design-snr", type=float,
                   help="Eb/N0 in dB used for the Bhattacharyya construction (default: lowest --snr point)")
    g = p.add_argument_group("decoder")
    g.add_argument("--dec", help=f"one of {', '.join(ALGORITHMS)} (default: {d['dec']})")
    g.add_argument("--L", type=int, help=f"list size or adaptive L_max, a power of two (default: {d['L']})")
    g.add_argument("--prec", type=int, help=f"LLR precision in bits: 8, 16 or 32 (default: {d['prec']})")
    g.add_argument("--quant-scale", type=float, help="fixed-point LLR scale (default: 8 for 8-bit, 64 for 16-bit)")
    g.add_argument("--nodes", help="special nodes, e.g. 'R0,R1,REP,SPC4' or 'R0,R1,REP_8-,SPC4+' "
                                   "(default: R0,R1,REP,SPC4; 8-bit caps REP at 8)")
    g.add_argument("--psum", help=f"partial-sum layout: copy or shared (default: {d['psum']})")
    g = p.add_argument_group("simulation")
    g.add_argument("--snr", help=f"Eb/N0 range min:max:step in dB (default: {d['snr']})")
    g.add_argument("--max-frames", type=int, help=f"frames per point, 0 = unlimited (default: {d['max_frames']})")
    g.add_argument("--max-fe", type=int, help=f"frame errors per point, 0 = unlimited (default: {d['max_fe']})")
    g.add_argument("--seed", type=lambda s: int(s, 0), help=f"64-bit seed (default: {d['seed']})")
    g.add_argument("--workers", type=int, help=f"worker processes (default: {d['workers']})")
    g.add_argument("--no-timing", action="store_true",
                   help="write nan for the timing columns so reruns are byte-identical")
    g = p.add_argument_group("output")
    g.add_argument("--out", type=Path, help="output file (sim: results + PNG plot; construct: frozen file)")
    g.add_argument("--format", help=f"csv or table (default: {d['format']})")
    g.add_argument("--no-plot", action="store_true", help="skip the PNG next to --out")
    g.add_argument("--llr-file", type=Path, help="decode: whitespace separated LLRs in hex, e.g. 7f -1a 0x20")
    return p


def _given(ns, name):
    return getattr(ns, name) is not None


def _parse_snr(text: str) -> List[float]:
    from .channel_sim import snr_points

    parts = text.split(":")
    try:
        vals = [float(v) for v in parts]
    except ValueError:
        raise CliError("BadValue", "--snr", f"expected min:max:step or a single value, got {text!r}") from None
    if len(vals) == 1:
        return vals
    if len(vals) != 3:
        raise CliError("BadValue", "--snr", f"expected min:max:step, got {text!r}")
    try:
        return snr_points(*vals)
    except PolarError as exc:
        raise CliError("BadValue", "--snr", str(exc)) from None


def _resolve_code(ns, dec: str, ebn0: List[float]):
    crc_text = ns.crc
    if crc_text is None:
        crc_text = "32-GZIP" if dec in _NEEDS_CRC else "none"
    try:
        crc = parse_crc(crc_text)
    except PolarError as exc:
        raise CliError("BadValue", "--crc", str(exc)) from None
    if dec in _SC_FAMILY and crc is not None and _given(ns, "crc"):
        raise CliError("ConflictingFlags", "--crc", f"{dec} does not use a CRC; drop --crc or pick a list decoder")
    if dec in _NEEDS_CRC and crc is None:
        raise CliError("ConflictingFlags", "--crc", f"{dec} needs a CRC")
    c = crc.width if crc is not None else 0

    punct = None
    if ns.puncture_file is not None:
        try:
            punct = load_puncture_file(ns.puncture_file)
        except OSError as exc:
            raise CliError("BadValue", "--puncture-file", str(exc)) from None

    if ns.frozen_file is not None:
        try:
            n, k_file, mask = read_frozen_file(ns.frozen_file)
        except (OSError, PolarError) as exc:
            raise CliError("BadValue", "--frozen-file", str(exc)) from None
        if _given(ns, "N") and ns.N != n:
            raise CliError("ConflictingFlags", "--N", f"--N {ns.N} but the frozen file has N={n}")
        k = ns.K if _given(ns, "K") else k_file
        if k != k_file:
            raise CliError("ConflictingFlags", "--K", f"--K {k} but the frozen file has K={k_file}")
        design = None
    else:
        n = ns.N if _given(ns, "N") else DEFAULTS["N"]
        k = ns.K if _given(ns, "K") else DEFAULTS["K"]
        if not is_power_of_two(n):
            raise CliError("BadValue", "--N", f"{n} is not a power of two; use the next power of two "
                                              f"with --puncture-file for other lengths")
        if not 0 < k + c < n:
            raise CliError("BadValue", "--K", f"K + CRC = {k + c} must lie in (0, N={n})")
        n_tx = n - (punct.n_removed if punct is not None else 0)
        design = ns.design_snr if _given(ns, "design_snr") else min(ebn0)
        mask = construct_frozen_bhattacharyya(n, k + c, design_erasure_from_snr(design, k / n_tx))
    if punct is not None and punct.kinds.size != n:
        raise CliError("ConflictingFlags", "--puncture-file", f"pattern length {punct.kinds.size} but N={n}")
    try:
        code = build_code(n, k, mask, crc, punct)
    except PolarError as exc:
        raise CliError("BadValue", "--K", str(exc)) from None
    return code, design


def resolve(ns) -> CliInvocation:
    dec = (ns.dec or DEFAULTS["dec"]).upper()
    if dec not in ALGORITHMS:
        raise CliError("BadValue", "--dec", f"unknown decoder {ns.dec!r}; choose one of {', '.join(ALGORITHMS)}")
    prec = ns.prec if _given(ns, "prec") else DEFAULTS["prec"]
    if prec not in (8, 16, 32):
        raise CliError("BadValue", "--prec", f"must be 8, 16 or 32, got {prec}")

    if dec in _SC_FAMILY:
        if _given(ns, "L") and ns.L != 1:
            raise CliError("ConflictingFlags", "--L", f"{dec} keeps a single path; drop --L")
        L = 1
    else:
        L = ns.L if _given(ns, "L") else DEFAULTS["L"]
        if L < 1 or L & (L - 1):
            raise CliError("BadValue", "--L", f"must be a power of two, got {L}")
        if dec in ("PA-SSCL", "FA-SSCL") and L < 2:
            raise CliError("BadValue", "--L", f"{dec} needs L >= 2")

    scale = ns.quant_scale
    if scale is not None:
        if prec == 32:
            raise CliError("ConflictingFlags", "--quant-scale", "only meaningful with --prec 8 or 16")
        if scale <= 0:
            raise CliError("BadValue", "--quant-scale", "must be positive")

    pruning = None
    if ns.nodes is not None:
        if dec in _UNPRUNED:
            raise CliError("ConflictingFlags", "--nodes", f"{dec} runs the full tree; use SSC/SSCL variants")
        try:
            pruning = PruningConfig.parse(ns.nodes)
        except PolarError as exc:
            raise CliError("BadValue", "--nodes", str(exc)) from None
    elif dec not in _UNPRUNED:
        pruning = PruningConfig.default(prec)

    layout = (ns.psum or DEFAULTS["psum"]).lower()
    if layout not in ("copy", "shared"):
        raise CliError("BadValue", "--psum", f"must be copy or shared, got {ns.psum!r}")
    fmt = (ns.format or DEFAULTS["format"]).lower()
    if fmt not in ("csv", "table"):
        raise CliError("BadValue", "--format", f"must be csv or table, got {ns.format!r}")

    ebn0 = _parse_snr(ns.snr or DEFAULTS["snr"])
    max_frames = ns.max_frames if _given(ns, "max_frames") else DEFAULTS["max_frames"]
    max_fe = ns.max_fe if _given(ns, "max_fe") else DEFAULTS["max_fe"]
    if (max_frames is not None and max_frames < 0) or (max_fe is not None and max_fe < 0):
        raise CliError("BadValue", "--max-frames", "stop counts must be >= 0")
    if not max_frames and not max_fe:
        raise CliError("BadValue", "--max-frames", "--max-frames and --max-fe cannot both be unlimited")
    workers = ns.workers if _given(ns, "workers") else DEFAULTS["workers"]
    if workers < 1:
        raise CliError("BadValue", "--workers", "must be >= 1")
    seed = ns.seed if _given(ns, "seed") else DEFAULTS["seed"]
    if not 0 <= seed < 1 << 64:
        raise CliError("BadValue", "--seed", "must fit in 64 bits")
    if ns.command == "decode" and ns.llr_file is None:
        raise CliError("BadValue", "--llr-file", "decode needs --llr-file")
    if ns.command != "decode" and ns.llr_file is not None:
        raise CliError("ConflictingFlags", "--llr-file", "only used by the decode command")

    code, design = _resolve_code(ns, dec, ebn0)
    return CliInvocation(ns.command, code, dec, L, prec, scale, pruning, layout, ebn0, design,
                         max_frames or None, max_fe or None, seed, workers, fmt, ns.out,
                         timing=not ns.no_timing, plot=not ns.no_plot, llr_file=ns.llr_file,
                         args=vars(ns))


def parse_args(argv: List[str]) -> CliInvocation:
    """Validate ``argv`` into a :class:`CliInvocation` (raises :class:`CliError`)."""
    return resolve(build_parser().parse_args(argv))


# ------------------------------------------------------------------ commands


def read_hex_llrs(path) -> np.ndarray:
    values = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0]
            for tok in line.split():
                try:
                    values.append(int(tok, 16))
                except ValueError:
                    raise ParseError(f"bad hex LLR {tok!r}", lineno) from None
    return np.array(values, dtype=np.int64)


def _bits_hex(bits) -> str:
    bits = np.asarray(bits, dtype=np.uint8)
    pad = (-bits.size) % 8
    packed = np.packbits(np.concatenate([bits, np.zeros(pad, dtype=np.uint8)]))
    return packed.tobytes().hex()


def _print_defaults(parser, out) -> None:
    out.write(parser.format_usage())
    out.write("\ndefaults:\n")
    for key, val in DEFAULTS.items():
        out.write(f"  --{key.replace('_', '-'):<12} {val}\n")
    out.write("\nrun 'polarlist --help' for every flag\n")


def cmd_sim(inv: CliInvocation, out) -> int:
    from .channel_sim import run_montecarlo
    from .report import render, write_report

    cfg = inv.sim_config()
    extra = {"design_snr": inv.design_snr if inv.design_snr is not None else "file"}

    def progress(point):
        lo, hi = point.fer_interval()
        print(f"  {point.ebn0_db:g} dB: {point.frames} frames, {point.frame_errors} errors, "
              f"FER {point.fer:.3g} [{lo:.3g}, {hi:.3g}]", file=sys.stderr)

    stats = run_montecarlo(cfg, progress=progress)
    if inv.out is not None:
        for path in write_report(stats, inv.out, inv.fmt, plot=inv.plot, extra=extra):
            print(f"wrote {path}", file=sys.stderr)
    else:
        out.write(render(stats, inv.fmt, extra))
    return EXIT_OK


def cmd_decode(inv: CliInvocation, out) -> int:
    llr = read_hex_llrs(inv.llr_file)
    dec = inv.make_decoder()
    res = dec.decode(llr, prequantized=True)
    k = inv.code.k_info
    out.write(f"decoder: {dec}\n")
    out.write(f"decision: {''.join(map(str, res.decision))}\n")
    out.write(f"info_hex: {_bits_hex(res.payload[:k])}\n")
    out.write(f"crc_ok: {res.crc_ok if res.crc_ok is not None else 'n/a'}\n")
    out.write(f"level: {res.escalation_level}\n")
    out.write(f"latency_us: {res.latency * 1e6:.1f}\n")
    return EXIT_OK


def cmd_construct(inv: CliInvocation, out) -> int:
    code = inv.code
    text = format_frozen_text(code.n_codeword, code.k_info, code.frozen_mask)
    if inv.out is not None:
        inv.out.write_text(text)
        print(f"wrote {inv.out}", file=sys.stderr)
    else:
        out.write(text)
    return EXIT_OK


def cmd_info(inv: CliInvocation, out) -> int:
    dec = inv.make_decoder()
    tree = PruneTree(inv.code.frozen_mask, dec.pruning)
    out.write(f"code: {inv.code}\n")
    out.write(f"decoder: {dec}\n")
    out.write(f"nodes: {tree.n_nodes}, program ops: {tree.program.shape[0]}\n")
    out.write(f"terminal nodes: {format_histogram(node_histogram(tree))}\n")
    return EXIT_OK


_COMMANDS = {"sim": cmd_sim, "decode": cmd_decode, "construct": cmd_construct, "info": cmd_info}


def main(argv: Optional[List[str]] = None, out=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    parser = build_parser()
    if not argv:
        _print_defaults(parser, out)
        return EXIT_OK
    try:
        inv = resolve(parser.parse_args(argv))
    except CliError as exc:
        print(f"polarlist: error ({exc.kind}): {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return _COMMANDS[inv.command](inv, out)
    except (OSError, PolarError) as exc:
        print(f"polarlist: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())

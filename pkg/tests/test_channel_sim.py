import math

import numpy as np
import pytest

from polarlist.channel_sim import (
    CSV_HEADER,
    SimConfig,
    _box_muller,
    frame_rng,
    gaussian_block,
    gaussian_pair,
    make_frame,
    measure_latency,
    noise_variance,
    random_bits,
    raw_words,
    run_montecarlo,
    snr_points,
    transmit,
    wilson_interval,
)
from polarlist.code_model import (
    PuncturePattern,
    build_code,
    construct_frozen_bhattacharyya,
    encode_systematic,
)
from polarlist.crc import PRESETS
from polarlist.decoders import Decoder
from polarlist.errors import PolarError


def code_of(n, k, crc=None, punct=None):
    c = crc.width if crc is not None else 0
    return build_code(n, k, construct_frozen_bhattacharyya(n, k + c, 0.5), crc, punct)


class TestRandomness:
    def test_mt19937_reference_draw(self):
        words = raw_words(np.random.RandomState(5489), 10000)
        assert int(words[-1]) == 4123659995

    def test_uniform_one_gives_zero_magnitude(self):
        out = np.empty(2)
        _box_muller(np.array([2 ** 32 - 1, 12345], dtype=np.uint64), out)
        assert out.tolist() == [0.0, 0.0]

    def test_block_equals_pairs(self):
        a = gaussian_block(frame_rng(3, 0), 7)
        rng = frame_rng(3, 0)
        b = [v for _ in range(4) for v in gaussian_pair(rng)][:7]
        np.testing.assert_allclose(a, b, rtol=0, atol=1e-12)

    def test_moments(self):
        x = gaussian_block(frame_rng(1, 0), 1_000_000)
        assert abs(x.mean()) < 0.005
        assert abs(x.var() - 1) < 0.01

    def test_bits_msb_first(self):
        rng = frame_rng(0, 9)
        word = int(raw_words(frame_rng(0, 9), 1)[0])
        bits = random_bits(rng, 20)
        assert bits.tolist() == [(word >> (31 - i)) & 1 for i in range(20)]

    def test_large_seed(self):
        a, _ = make_frame(code_of(64, 32), 2 ** 40 + 5, 0, 1.0)
        b, _ = make_frame(code_of(64, 32), 2 ** 40 + 5, 0, 1.0)
        c, _ = make_frame(code_of(64, 32), 5, 0, 1.0)
        assert a.tolist() == b.tolist() and a.tolist() != c.tolist()


class TestChannel:
    def test_noise_variance(self):
        assert noise_variance(2.0, 0.5) == pytest.approx(0.631, abs=5e-4)

    def test_noiseless_limit(self):
        code = code_of(64, 32)
        x = encode_systematic(code, np.arange(32) % 2)
        llr = transmit(code, x, 200.0, frame_rng(0, 0))
        assert ((llr < 0) == (x == 1)).all()
        assert np.abs(llr).min() > 1e10

    def test_measured_variance(self):
        code = code_of(1024, 512)
        var = noise_variance(1.0, code.rate)
        samples = []
        for i in range(1000):
            llr = transmit(code, np.zeros(1024), 1.0, frame_rng(4, i))
            samples.append(llr * var / 2 - 1.0)
        assert np.var(np.concatenate(samples)) == pytest.approx(var, rel=0.01)

    def test_puncture_and_shorten(self):
        pat = PuncturePattern.from_string("PTTTTTTS")
        code = build_code(8, 3, construct_frozen_bhattacharyya(8, 3, 0.5), punct=pat)
        assert code.rate == pytest.approx(0.5)
        llr = transmit(code, np.zeros(8), 0.0, frame_rng(0, 0))
        assert llr[0] == 0.0
        assert llr[7] == np.finfo(np.float32).max
        q = transmit(code, np.zeros(8), 0.0, frame_rng(0, 0), precision=8)
        assert (q[0], q[7]) == (0, 127)

    def test_frames_are_reproducible(self):
        code = code_of(128, 64)
        i1, l1 = make_frame(code, 7, 3, 2.0)
        i2, l2 = make_frame(code, 7, 3, 2.0)
        _, l3 = make_frame(code, 7, 4, 2.0)
        np.testing.assert_array_equal(i1, i2)
        np.testing.assert_array_equal(l1, l2)
        assert not np.array_equal(l1, l3)


class TestMonteCarlo:
    def test_noiseless_point(self):
        code = code_of(256, 112, PRESETS["8"])
        stats = run_montecarlo(SimConfig(code, "FA-SSCL", L=4, ebn0=[20.0], max_frames=1000))
        p = stats.points[0]
        assert (p.frames, p.frame_errors, p.esc_mean) == (1000, 0, 1.0)

    def test_stop_on_errors(self):
        code = code_of(128, 64)
        p = run_montecarlo(SimConfig(code, "SC", ebn0=[0.0], max_frames=None, max_fe=17)).points[0]
        assert p.frame_errors == 17
        assert p.ber == pytest.approx(p.bit_errors / (64 * p.frames))
        assert p.fer == pytest.approx(17 / p.frames)
        assert p.lat_worst_us >= p.lat_avg_us > 0
        assert p.ti_mbps > 0

    def test_workers_do_not_change_rows(self):
        code = code_of(128, 56, PRESETS["8"])
        rows = []
        for workers in (1, 3):
            cfg = SimConfig(code, "CA-SSCL", L=4, ebn0=[1.0, 2.0], max_frames=500, max_fe=30,
                            seed=11, workers=workers, timing=False, chunk=16)
            rows.append(run_montecarlo(cfg).to_csv())
        assert rows[0] == rows[1]
        assert rows[0].splitlines()[0] == CSV_HEADER
        assert "nan" in rows[0].splitlines()[1]

    def test_stop_rule_required(self):
        with pytest.raises(PolarError):
            SimConfig(code_of(64, 32), max_frames=None, max_fe=None)

    def test_wilson(self):
        lo, hi = wilson_interval(10, 100)
        assert lo < 0.1 < hi
        assert wilson_interval(0, 0) == (0.0, 1.0)
        assert wilson_interval(0, 50)[0] == 0.0

    def test_snr_points(self):
        assert snr_points(3.5, 4.5, 0.5) == [3.5, 4.0, 4.5]
        assert snr_points(1, 1, 0.1) == [1.0]
        with pytest.raises(PolarError):
            snr_points(1, 2, 0)

    def test_measure_latency(self):
        code = code_of(256, 128)
        frames = [make_frame(code, 0, i, 2.0)[1] for i in range(20)]
        avg, worst, thr = measure_latency(Decoder(code, "SSC"), frames)
        assert 0 < avg <= worst
        assert math.isfinite(thr) and thr > 0


@pytest.mark.parametrize("prec", [32, 8])
def test_punctured_code_decodes_at_high_snr(prec):
    pat = PuncturePattern.from_string("P" * 8 + "T" * 112 + "S" * 8)
    mask = construct_frozen_bhattacharyya(128, 56, 0.5)
    assert not mask[-8:].any()
    mask[-8:] = 1  # frozen tail keeps the shortened codeword bits at zero
    code = build_code(128, 48, mask, punct=pat)
    assert code.n_transmitted == 112
    p = run_montecarlo(SimConfig(code, "SSCL", L=4, precision=prec, ebn0=[8.0], max_frames=200)).points[0]
    assert p.frame_errors == 0

"""BPSK over AWGN, LLR demapping and the Monte-Carlo BER/FER engine.

Every frame draws from its own MT19937 stream seeded with ``seed ^ frame``:
first the payload words, then the uniform pairs for Box-Muller. A frame is
therefore reproducible on its own, whatever worker decodes it, and the
same frames are replayed at every Eb/N0 point.
"""

from __future__ import annotations

import math
import multiprocessing as mp
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
from numba import njit

from .code_model import PolarCode, PunctureKind, encode_systematic
from .decode_tree import PruningConfig
from .decoders import Decoder
from .errors import PolarError
from .kernels import get_precision, quantize_llr

_TWO32 = 4294967296.0

CSV_HEADER = "ebn0_db,frames,bit_errors,frame_errors,ber,fer,ti_mbps,lat_avg_us,lat_worst_us,esc_mean"


# ------------------------------------------------------------------ channel


def seed_frame_rng(rng: np.random.RandomState, key: int) -> np.random.RandomState:
    """Reseed ``rng`` in place; keys above 32 bits go through the array seeder."""
    key = int(key) & 0xFFFFFFFFFFFFFFFF
    if key < 1 << 32:
        rng.seed(key)
    else:
        rng.seed(np.array([key & 0xFFFFFFFF, key >> 32], dtype=np.uint32))
    return rng


def frame_rng(seed: int, frame_idx: int) -> np.random.RandomState:
    return seed_frame_rng(np.random.RandomState(), int(seed) ^ int(frame_idx))


def raw_words(rng: np.random.RandomState, count: int) -> np.ndarray:
    """``count`` raw 32-bit MT19937 outputs."""
    return rng._bit_generator.random_raw(count)


def uniform_open_closed(words: np.ndarray) -> np.ndarray:
    """Map raw words to (0, 1]."""
    return (words.astype(np.float64) + 1.0) / _TWO32


def gaussian_pair(rng: np.random.RandomState) -> Tuple[float, float]:
    u1, u2 = uniform_open_closed(raw_words(rng, 2))
    r = math.sqrt(-2.0 * math.log(u1))
    return r * math.cos(2.0 * math.pi * u2), r * math.sin(2.0 * math.pi * u2)


@njit(cache=True)
def _box_muller(words, out):
    for i in range(out.size // 2 + out.size % 2):
        u1 = (words[2 * i] + 1.0) / 4294967296.0
        u2 = (words[2 * i + 1] + 1.0) / 4294967296.0
        r = math.sqrt(-2.0 * math.log(u1))
        out[2 * i] = r * math.cos(2.0 * math.pi * u2)
        if 2 * i + 1 < out.size:
            out[2 * i + 1] = r * math.sin(2.0 * math.pi * u2)


def gaussian_block(rng: np.random.RandomState, count: int) -> np.ndarray:
    """``count`` standard normals; the same pairs :func:`gaussian_pair` would give."""
    out = np.empty(count)
    _box_muller(raw_words(rng, 2 * ((count + 1) // 2)), out)
    return out


def random_bits(rng: np.random.RandomState, k: int) -> np.ndarray:
    """``k`` bits read most significant first from ``ceil(k / 32)`` words."""
    words = raw_words(rng, (k + 31) // 32).astype(np.uint32)
    bits = np.unpackbits(words.astype(">u4").view(np.uint8))
    return bits[:k]


def noise_variance(ebn0_db: float, rate: float) -> float:
    return 1.0 / (2.0 * rate * 10.0 ** (ebn0_db / 10.0))


def transmit(code: PolarCode, codeword, ebn0_db: float, rng: np.random.RandomState,
             precision=None, scale: Optional[float] = None) -> np.ndarray:
    """BPSK + AWGN + demapping for the transmitted positions.

    Punctured positions get LLR 0 and shortened ones the largest
    representable LLR. With ``precision`` the LLRs are quantized too.
    """
    x = np.asarray(codeword, dtype=np.float64)
    var = noise_variance(ebn0_db, code.rate)
    if code.puncture_pattern is None:
        tx = slice(None)
        count = code.n_codeword
    else:
        kinds = code.puncture_pattern.kinds
        tx = np.flatnonzero(kinds == PunctureKind.TRANSMITTED)
        count = tx.size
    y = 1.0 - 2.0 * x[tx] + math.sqrt(var) * gaussian_block(rng, count)
    llr = np.zeros(code.n_codeword)
    llr[tx] = 2.0 * y / var
    if precision is not None:
        llr = np.asarray(quantize_llr(llr, precision, scale))
    if code.puncture_pattern is not None:
        big = get_precision(precision or 32).llr_max
        llr[code.puncture_pattern.kinds == PunctureKind.SHORTENED] = big
    return llr


def make_frame(code: PolarCode, seed: int, frame_idx: int, ebn0_db: float,
               rng: Optional[np.random.RandomState] = None, precision=None, scale=None):
    """Information bits and channel LLRs of one frame."""
    rng = seed_frame_rng(rng if rng is not None else np.random.RandomState(), int(seed) ^ int(frame_idx))
    info = random_bits(rng, code.k_info)
    x = encode_systematic(code, info)
    return info, transmit(code, x, ebn0_db, rng, precision, scale)


# ---------------------------------------------------------------- simulation


def snr_points(lo: float, hi: float, step: float) -> List[float]:
    if step <= 0:
        raise PolarError(f"SNR step must be positive, got {step}")
    if hi < lo:
        raise PolarError(f"SNR range {lo}:{hi} is empty")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 10) for i in range(count)]


@dataclass
class SimConfig:
    code: PolarCode
    decoder: str = "SC"
    L: int = 1
    precision: int = 32
    pruning: Optional[PruningConfig] = None
    layout: str = "copy"
    quant_scale: Optional[float] = None
    ebn0: Sequence[float] = (1.0,)
    max_frames: Optional[int] = 10000
    max_fe: Optional[int] = 100
    seed: int = 0
    workers: int = 1
    timing: bool = True
    chunk: int = 32

    def __post_init__(self):
        if not self.max_frames and not self.max_fe:
            raise PolarError("the stop rule needs --max-frames and/or --max-fe")
        if self.workers < 1:
            raise PolarError(f"workers must be >= 1, got {self.workers}")
        self.ebn0 = [float(v) for v in self.ebn0]

    def make_decoder(self) -> Decoder:
        return Decoder(self.code, self.decoder, L=self.L, precision=self.precision,
                       pruning=self.pruning, layout=self.layout, quant_scale=self.quant_scale)


@dataclass
class PointStats:
    ebn0_db: float
    frames: int = 0
    bit_errors: int = 0
    frame_errors: int = 0
    info_bits: int = 0
    decode_time: float = 0.0
    lat_worst: float = 0.0
    level_sum: int = 0
    timed: bool = True

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.info_bits * self.frames) if self.frames else math.nan

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else math.nan

    @property
    def ti_mbps(self) -> float:
        if not self.timed or self.decode_time <= 0:
            return math.nan
        return self.info_bits * self.frames / self.decode_time / 1e6

    @property
    def lat_avg_us(self) -> float:
        return self.decode_time / self.frames * 1e6 if self.timed and self.frames else math.nan

    @property
    def lat_worst_us(self) -> float:
        return self.lat_worst * 1e6 if self.timed and self.frames else math.nan

    @property
    def esc_mean(self) -> float:
        return self.level_sum / self.frames if self.frames else math.nan

    def fer_interval(self, z: float = 1.959964) -> Tuple[float, float]:
        """Wilson score interval for the FER (95% by default)."""
        return wilson_interval(self.frame_errors, self.frames, z)

    def csv_row(self) -> str:
        def num(v):
            return "nan" if math.isnan(v) else format(v, ".12g")

        return (f"{self.ebn0_db:g},{self.frames},{self.bit_errors},{self.frame_errors},"
                f"{num(self.ber)},{num(self.fer)},{num(self.ti_mbps)},{num(self.lat_avg_us)},"
                f"{num(self.lat_worst_us)},{self.esc_mean:.4f}")


def wilson_interval(k: int, n: int, z: float = 1.959964) -> Tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    p = k / n
    den = 1.0 + z * z / n
    mid = (p + z * z / (2 * n)) / den
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
    return max(0.0, mid - half), min(1.0, mid + half)


@dataclass
class SimStats:
    config: SimConfig
    points: List[PointStats] = field(default_factory=list)

    def to_csv(self) -> str:
        return "\n".join([CSV_HEADER] + [p.csv_row() for p in self.points]) + "\n"


class FrameRunner:
    """Generates, decodes and scores frames for one decoder instance."""

    def __init__(self, config: SimConfig, decoder: Optional[Decoder] = None):
        self.config = config
        self.code = config.code
        self.decoder = decoder if decoder is not None else config.make_decoder()
        self._rng = np.random.RandomState()
        self._out = np.zeros(self.code.n_codeword, dtype=np.uint8)
        self._payload = np.zeros(self.code.n_payload, dtype=np.uint8)

    def run(self, ebn0_db: float, start: int, count: int) -> np.ndarray:
        """Per-frame ``(bit errors, level, latency)`` rows for ``count`` frames."""
        from .decoders import _engine as eng

        dec = self.decoder
        k = self.code.k_info
        rows = np.zeros((count, 3))
        for i in range(count):
            info, llr = make_frame(self.code, self.config.seed, start + i, ebn0_db, self._rng)
            chan = dec.quantize(llr).astype(dec.precision.llr_dtype, copy=False)
            t0 = time.perf_counter()
            level, _ = dec.decode_into(chan, self._out)
            rows[i, 2] = time.perf_counter() - t0
            eng.gather_payload(self._out, dec._blocks, self._payload)
            rows[i, 0] = np.count_nonzero(self._payload[:k] != info)
            rows[i, 1] = level
        return rows


_WORKER: Optional[FrameRunner] = None


def _worker_init(config: SimConfig):
    global _WORKER
    _WORKER = FrameRunner(config)


def _worker_run(args):
    return _WORKER.run(*args)


def _chunks(start: int, chunk: int, limit: Optional[int]) -> Iterator[Tuple[int, int]]:
    pos = start
    while limit is None or pos < limit:
        count = chunk if limit is None else min(chunk, limit - pos)
        yield pos, count
        pos += count


def _accumulate(stats: PointStats, rows: np.ndarray, max_frames, max_fe) -> bool:
    """Fold frames in order; True once the stop rule is met."""
    for be, level, lat in rows:
        stats.frames += 1
        stats.bit_errors += int(be)
        stats.frame_errors += be > 0
        stats.level_sum += int(level)
        stats.decode_time += lat
        stats.lat_worst = max(stats.lat_worst, lat)
        if (max_fe and stats.frame_errors >= max_fe) or (max_frames and stats.frames >= max_frames):
            return True
    return False


def run_point(config: SimConfig, ebn0_db: float, runner=None, pool=None) -> PointStats:
    stats = PointStats(ebn0_db, info_bits=config.code.k_info, timed=config.timing)
    chunks = _chunks(0, config.chunk, config.max_frames)
    if pool is None:
        runner = runner or FrameRunner(config)
        for start, count in chunks:
            if _accumulate(stats, runner.run(ebn0_db, start, count), config.max_frames, config.max_fe):
                break
    else:
        window = deque()
        depth = 2 * config.workers
        done = False
        for start, count in chunks:
            window.append(pool.apply_async(_worker_run, ((ebn0_db, start, count),)))
            if len(window) < depth:
                continue
            if _accumulate(stats, window.popleft().get(), config.max_frames, config.max_fe):
                done = True
                break
        while window and not done:
            done = _accumulate(stats, window.popleft().get(), config.max_frames, config.max_fe)
    if not config.timing:
        stats.decode_time = 0.0
        stats.lat_worst = 0.0
    return stats


def run_montecarlo(config: SimConfig, progress=None) -> SimStats:
    """Simulate every Eb/N0 point of ``config``.

    Frames are folded in index order and the stop rule is applied frame by
    frame, so counts do not depend on the number of workers.
    """
    result = SimStats(config)
    runner = FrameRunner(config)
    runner.run(config.ebn0[0], 0, 1)  # compile and warm up before forking
    pool = None
    if config.workers > 1:
        ctx = mp.get_context("fork")
        pool = ctx.Pool(config.workers, initializer=_worker_init, initargs=(config,))
    try:
        for ebn0 in config.ebn0:
            point = run_point(config, ebn0, runner=runner, pool=pool)
            result.points.append(point)
            if progress is not None:
                progress(point)
    finally:
        if pool is not None:
            pool.terminate()
            pool.join()
    return result


def measure_latency(decoder: Decoder, frames: Sequence[np.ndarray], warmup: int = 1,
                    repeats: int = 1):
    """``(avg µs, worst µs, info Mb/s)`` of ``decoder`` over pre-built LLR frames.

    With ``repeats > 1`` every frame keeps its fastest of that many passes,
    which filters out scheduler noise on a shared machine.
    """
    out = np.zeros(decoder.code.n_codeword, dtype=np.uint8)
    chans = [decoder.quantize(f).astype(decoder.precision.llr_dtype, copy=False) for f in frames]
    for c in chans[:warmup]:
        decoder.decode_into(c, out)
    lat = np.full(len(chans), np.inf)
    for _ in range(max(1, repeats)):
        for i, c in enumerate(chans):
            t0 = time.perf_counter()
            decoder.decode_into(c, out)
            lat[i] = min(lat[i], time.perf_counter() - t0)
    total = lat.sum()
    return lat.mean() * 1e6, lat.max() * 1e6, decoder.code.k_info * len(chans) / total / 1e6


__all__ = [
    "CSV_HEADER", "FrameRunner", "PointStats", "SimConfig", "SimStats", "frame_rng",
    "gaussian_block", "gaussian_pair", "make_frame", "measure_latency",
    "noise_variance", "random_bits", "run_montecarlo", "run_point", "seed_frame_rng",
    "snr_points", "transmit", "wilson_interval",
]

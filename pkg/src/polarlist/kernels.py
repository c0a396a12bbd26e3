"""f/g/h polar arithmetic in float32, 16-bit and 8-bit saturating fixed point.

Block kernels are numba loops over contiguous slices; they produce exactly
the element-wise scalar results for any block length. Fixed-point results
are clamped to the symmetric range ``[-(2**(b-1) - 1), 2**(b-1) - 1]`` so the
most negative two's complement value is never stored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit, types
from numba.extending import overload

from .errors import PolarError


@dataclass(frozen=True)
class Precision:
    bits: int
    llr_dtype: type
    psum_dtype: type
    llr_max: float
    default_scale: float

    @property
    def is_fixed(self) -> bool:
        return self.bits != 32

    def llr_sat(self):
        """Saturation bound typed for the LLR kernels."""
        if self.is_fixed:
            return np.int64(self.llr_max)
        return np.float32(self.llr_max)

    def metric_sat(self) -> float:
        return float(self.llr_max) if self.is_fixed else math.inf


FLOAT32 = Precision(32, np.float32, np.int32, float(np.finfo(np.float32).max), 1.0)
FIXED16 = Precision(16, np.int16, np.int16, 32767.0, 64.0)
FIXED8 = Precision(8, np.int8, np.int8, 127.0, 8.0)

PRECISIONS = {32: FLOAT32, 16: FIXED16, 8: FIXED8}


def get_precision(bits) -> Precision:
    if isinstance(bits, Precision):
        return bits
    try:
        return PRECISIONS[int(bits)]
    except (KeyError, ValueError):
        raise PolarError(f"precision must be one of 8, 16, 32; got {bits!r}") from None


def _clamp(value, prec: Precision):
    if prec.is_fixed:
        return int(min(max(value, -prec.llr_max), prec.llr_max))
    return float(np.float32(value))


def f_kernel(la, lb, precision=32):
    """``sign(la * lb) * min(|la|, |lb|)`` with ``sign(0) = +1``."""
    prec = get_precision(precision)
    mag = min(abs(la), abs(lb))
    neg = (la < 0) != (lb < 0)
    return _clamp(-mag if neg else mag, prec)


def g_kernel(la, lb, sa, precision=32):
    """``lb + la`` if ``sa == 0`` else ``lb - la``, saturating in fixed point."""
    prec = get_precision(precision)
    if prec.is_fixed:
        return _clamp(int(lb) + (-int(la) if sa else int(la)), prec)
    v = float(lb) - float(la) if sa else float(la) + float(lb)
    return float(np.float32(min(max(v, -prec.llr_max), prec.llr_max)))


def h_kernel(sa, sb):
    return (sa ^ sb, sb)


def round_half_away(x):
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def quantize_llr(x, precision=32, scale=None):
    """Scale, round half away from zero and saturate channel LLRs.

    Accepts a scalar or an array; 32-bit mode casts to float32 and ignores
    ``scale``.
    """
    prec = get_precision(precision)
    scalar = np.ndim(x) == 0
    if not prec.is_fixed:
        out = np.asarray(x, dtype=np.float32)
        return float(out) if scalar else out.copy()
    if scale is None:
        scale = prec.default_scale
    if scale <= 0:
        raise PolarError(f"quantization scale must be positive, got {scale}")
    q = np.clip(round_half_away(np.asarray(x, dtype=np.float64) * scale), -prec.llr_max, prec.llr_max)
    q = q.astype(prec.llr_dtype)
    return int(q) if scalar else q


@njit(cache=True, inline="always")
def sat(v, bound):
    if v > bound:
        return bound
    if v < -bound:
        return -bound
    return v


@njit(cache=True)
def f_block(la, lb, out):
    for i in range(out.size):
        a = la[i]
        b = lb[i]
        ma = abs(a)
        mb = abs(b)
        m = ma if ma < mb else mb
        out[i] = -m if (a < 0) != (b < 0) else m


def _g_loop(la, lb, sa, out, bound):
    raise NotImplementedError


@overload(_g_loop, inline="always")
def _g_loop_impl(la, lb, sa, out, bound):
    if isinstance(la.dtype, types.Integer):
        # one step wider than storage holds lb +/- la; numba widens every
        # small-int op to int64 unless cast back, which blocks vectorization
        w = np.int16 if la.dtype.bitwidth == 8 else np.int32

        def loop(la, lb, sa, out, bound):
            hi = w(bound)
            lo = w(-hi)
            for i in range(out.size):
                a = w(la[i])
                v = w(w(lb[i]) + w(a - w(w(w(2) * w(sa[i])) * a)))
                v = v if v < hi else hi
                out[i] = v if v > lo else lo
        return loop

    def loop(la, lb, sa, out, bound):
        for i in range(out.size):
            v = lb[i] - la[i] if sa[i] else lb[i] + la[i]
            out[i] = sat(v, bound)
    return loop


@njit(cache=True)
def g_block(la, lb, sa, out, bound):
    _g_loop(la, lb, sa, out, bound)


@njit(cache=True)
def h_block(sa, sb):
    """In place: ``sa <- sa xor sb``; ``sb`` is left untouched."""
    for i in range(sa.size):
        sa[i] ^= sb[i]


@njit(cache=True)
def hard_block(lam, out):
    for i in range(out.size):
        out[i] = 1 if lam[i] < 0 else 0


def f_vec(la, lb):
    """Block ``f`` on numpy arrays (any length, any of the three dtypes)."""
    la = np.ascontiguousarray(la)
    out = np.empty_like(la)
    f_block(la, np.ascontiguousarray(lb, dtype=la.dtype), out)
    return out


def g_vec(la, lb, sa, precision=32):
    prec = get_precision(precision)
    la = np.ascontiguousarray(la, dtype=prec.llr_dtype)
    out = np.empty_like(la)
    g_block(la, np.ascontiguousarray(lb, dtype=prec.llr_dtype),
            np.ascontiguousarray(sa, dtype=prec.psum_dtype), out, prec.llr_sat())
    return out


def h_vec(sa, sb):
    sa = np.array(sa, copy=True)
    h_block(sa, np.ascontiguousarray(sb, dtype=sa.dtype))
    return sa, np.array(sb, copy=True)

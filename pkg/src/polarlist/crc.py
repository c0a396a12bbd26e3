"""Table-driven CRC over bit vectors, payload extraction and CRC-aided selection.

Bits are packed most-significant-first into 32-bit words and each word is
folded into the register with four byte-wise table lookups. With
``reflect_in`` every byte (and a trailing partial byte) is fed least
significant bit first, which reproduces the usual byte-oriented reflected
CRCs when the payload is a whole number of bytes.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numba import njit

from .code_model import CrcSpec, PolarCode, as_bits
from .errors import PolarError

PRESETS = {
    "32-GZIP": CrcSpec(32, 0x04C11DB7, True, True, 0xFFFFFFFF, 0xFFFFFFFF, "32-GZIP"),
    "32-C": CrcSpec(32, 0x1EDC6F41, True, True, 0xFFFFFFFF, 0xFFFFFFFF, "32-C"),
    "24-5G": CrcSpec(24, 0xB2B117, False, False, 0, 0, "24-5G"),
    "16-CCITT": CrcSpec(16, 0x1021, False, False, 0xFFFF, 0, "16-CCITT"),
    "16-IBM": CrcSpec(16, 0x8005, True, True, 0, 0, "16-IBM"),
    "11-5G": CrcSpec(11, 0x621, False, False, 0, 0, "11-5G"),
    "8": CrcSpec(8, 0x07, False, False, 0, 0, "8"),
    "6-5G": CrcSpec(6, 0x21, False, False, 0, 0, "6-5G"),
}


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "y", "t"):
        return True
    if low in ("0", "false", "no", "n", "f"):
        return False
    raise PolarError(f"bad boolean {text!r}")


def parse_crc(text: str | None) -> CrcSpec | None:
    """Parse a preset name or a ``width:poly:reflect:init:xorout`` string."""
    if text is None:
        return None
    key = text.strip().upper()
    if key in ("", "NONE", "0"):
        return None
    if key in PRESETS:
        return PRESETS[key]
    parts = text.split(":")
    if len(parts) != 5:
        raise PolarError(f"unknown CRC {text!r}; use one of {sorted(PRESETS)} or width:poly:reflect:init:xorout")
    try:
        width = int(parts[0], 0)
        poly = int(parts[1], 0)
        init = int(parts[3], 0)
        xorout = int(parts[4], 0)
    except ValueError:
        raise PolarError(f"bad CRC spec {text!r}") from None
    refl = _parse_bool(parts[2])
    return CrcSpec(width, poly, refl, refl, init, xorout, text)


def _reverse(value: int, width: int) -> int:
    out = 0
    for _ in range(width):
        out = (out << 1) | (value & 1)
        value >>= 1
    return out


_BYTE_REVERSE = np.array([_reverse(i, 8) for i in range(256)], dtype=np.uint8)


def _make_table(spec: CrcSpec) -> np.ndarray:
    width = max(spec.width, 8)
    shift = width - spec.width
    poly = spec.polynomial << shift
    top = 1 << (width - 1)
    mask = (1 << width) - 1
    table = np.zeros(256, dtype=np.uint64)
    for i in range(256):
        reg = i << (width - 8)
        for _ in range(8):
            reg = ((reg << 1) ^ poly) if reg & top else (reg << 1)
            reg &= mask
        table[i] = reg
    return table


@njit(cache=True)
def crc_register(bits, start, nbits, table, rev8, width, spec_width, poly, init, reflect_in):
    """Run ``nbits`` bits of ``bits[start:]`` through the aligned register.

    ``width`` is ``max(spec_width, 8)``; ``poly`` and ``init`` are already
    left-aligned to ``width`` bits. Returns the unaligned remainder before
    output reflection and final xor.
    """
    one = np.uint64(1)
    wmask = np.uint64(0xFFFFFFFFFFFFFFFF) if width == 64 else (one << np.uint64(width)) - one
    hi = np.uint64(width - 8)
    reg = init
    nwords = nbits // 32
    pos = start
    for _ in range(nwords):
        word = np.uint64(0)
        for _ in range(32):
            word = (word << one) | np.uint64(bits[pos] & 1)
            pos += 1
        for b in range(3, -1, -1):
            byte = (word >> np.uint64(8 * b)) & np.uint64(0xFF)
            if reflect_in:
                byte = np.uint64(rev8[byte])
            idx = ((reg >> hi) ^ byte) & np.uint64(0xFF)
            reg = ((reg << np.uint64(8)) & wmask) ^ table[idx]
    rest = nbits - 32 * nwords
    topshift = np.uint64(width - 1)
    done = 0
    while done < rest:
        chunk = min(8, rest - done)
        for j in range(chunk):
            if reflect_in:
                bit = np.uint64(bits[pos + chunk - 1 - j] & 1)
            else:
                bit = np.uint64(bits[pos + j] & 1)
            top = ((reg >> topshift) & one) ^ bit
            reg = (reg << one) & wmask
            if top:
                reg ^= poly
        pos += chunk
        done += chunk
    return reg >> np.uint64(width - spec_width)


@njit(cache=True)
def crc_finish(reg, spec_width, reflect_out, final_xor):
    reg = np.uint64(reg)
    if reflect_out:
        out = np.uint64(0)
        for _ in range(spec_width):
            out = (out << np.uint64(1)) | (reg & np.uint64(1))
            reg >>= np.uint64(1)
        reg = out
    return reg ^ final_xor


@njit(cache=True)
def crc_check_payload(payload, n_payload, table, rev8, width, spec_width, poly, init,
                      reflect_in, reflect_out, final_xor):
    """True when the trailing ``spec_width`` bits equal the CRC of the rest."""
    k = n_payload - spec_width
    reg = crc_register(payload, 0, k, table, rev8, width, spec_width, poly, init, reflect_in)
    value = crc_finish(reg, spec_width, reflect_out, final_xor)
    got = np.uint64(0)
    for i in range(k, n_payload):
        got = (got << np.uint64(1)) | np.uint64(payload[i] & 1)
    return got == value


class CrcEngine:
    """Immutable table-driven CRC for one :class:`CrcSpec`."""

    def __init__(self, spec: CrcSpec):
        if spec.width == 0:
            raise PolarError("a CRC engine needs a nonzero width")
        self.spec = spec
        self.table = _make_table(spec)
        self.table.setflags(write=False)
        self._width = max(spec.width, 8)
        shift = self._width - spec.width
        self._poly = np.uint64(spec.polynomial << shift)
        self._init = np.uint64(spec.init_value << shift)

    @property
    def kernel_args(self):
        """Positional arguments for :func:`crc_check_payload` after the payload."""
        s = self.spec
        return (self.table, _BYTE_REVERSE, self._width, s.width, self._poly, self._init,
                s.reflect_in, s.reflect_out, np.uint64(s.final_xor))

    def compute(self, payload) -> int:
        bits = as_bits(payload)
        s = self.spec
        reg = crc_register(bits, 0, bits.size, self.table, _BYTE_REVERSE, self._width, s.width,
                           self._poly, self._init, s.reflect_in)
        return int(crc_finish(reg, s.width, s.reflect_out, np.uint64(s.final_xor)))

    def check(self, payload) -> bool:
        """Check a payload laid out as ``info || crc`` (CRC most significant first)."""
        bits = as_bits(payload)
        if bits.size < self.spec.width:
            return False
        return bool(crc_check_payload(bits, bits.size, *self.kernel_args))

    def __repr__(self):
        return f"CrcEngine({self.spec.name or self.spec.width})"


@lru_cache(maxsize=32)
def crc_engine(spec: CrcSpec) -> CrcEngine:
    return CrcEngine(spec)


def crc_compute(engine: CrcEngine, payload) -> int:
    return engine.compute(payload)


def extract_info_bits(decision, code: PolarCode, tree) -> np.ndarray:
    """Gather the ``K + c`` payload bits using the tree's contiguous info blocks."""
    decision = as_bits(decision, code.n_codeword)
    out = np.empty(code.n_payload, dtype=np.uint8)
    pos = 0
    for start, length in tree.info_blocks:
        out[pos:pos + length] = decision[start:start + length]
        pos += length
    return out


def select_crc_valid_best(candidates, engine: CrcEngine, return_checks: bool = False):
    """Index of the lowest-metric candidate whose CRC checks, or ``None``.

    ``candidates`` is a sequence of ``(payload, metric)``. Candidates are
    checked best-first, so the search stops at the first valid one.
    """
    order = sorted(range(len(candidates)), key=lambda i: (candidates[i][1], i))
    checks = 0
    found = None
    for i in order:
        checks += 1
        if engine.check(candidates[i][0]):
            found = i
            break
    return (found, checks) if return_checks else found

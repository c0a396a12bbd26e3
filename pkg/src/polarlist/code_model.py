"""Polar code definition, construction, file formats and systematic encoding.

Bit vectors are plain ``numpy.uint8`` arrays holding 0/1 values. Index 0 is
the leftmost (first decoded) position of the Arikan transform ``F^{(x)n}``
with ``F = [[1, 0], [1, 1]]``.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numba import njit

from .errors import (
    FrozenCountMismatch,
    InfoLengthMismatch,
    InvalidDesignParameter,
    LengthMismatch,
    NonPowerOfTwoLength,
    NonPowerOfTwoN,
    ParseError,
    PolarError,
    PunctureLengthMismatch,
)


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def as_bits(bits, length: Optional[int] = None) -> np.ndarray:
    """Return ``bits`` as a contiguous uint8 0/1 array."""
    arr = np.ascontiguousarray(bits, dtype=np.uint8)
    if arr.ndim != 1:
        raise PolarError("bit vectors must be one-dimensional")
    if np.any(arr > 1):
        raise PolarError("bit vectors may only hold 0 and 1")
    if length is not None and arr.size != length:
        raise LengthMismatch(f"expected {length} bits, got {arr.size}")
    return arr


@dataclass(frozen=True)
class CrcSpec:
    """Rocksoft-style CRC parameters. ``width == 0`` means no CRC."""

    width: int
    polynomial: int
    reflect_in: bool = False
    reflect_out: bool = False
    init_value: int = 0
    final_xor: int = 0
    name: str = ""

    def __post_init__(self):
        if not 0 <= self.width <= 64:
            raise PolarError(f"CRC width must be in 0..64, got {self.width}")
        limit = 1 << self.width
        for label in ("polynomial", "init_value", "final_xor"):
            value = getattr(self, label)
            if not 0 <= value < max(limit, 1):
                raise PolarError(f"CRC {label} {value:#x} does not fit in {self.width} bits")


class PunctureKind(enum.IntEnum):
    TRANSMITTED = 0
    PUNCTURED = 1
    SHORTENED = 2


_PUNCTURE_CHARS = {"T": PunctureKind.TRANSMITTED, "P": PunctureKind.PUNCTURED, "S": PunctureKind.SHORTENED}


@dataclass(frozen=True, eq=False)
class PuncturePattern:
    """Per-position transmission status (``PunctureKind`` values)."""

    kinds: np.ndarray

    def __post_init__(self):
        kinds = np.ascontiguousarray(self.kinds, dtype=np.uint8)
        if kinds.ndim != 1 or np.any(kinds > 2):
            raise PolarError("puncture kinds must be a 1-D vector over {0, 1, 2}")
        kinds.setflags(write=False)
        object.__setattr__(self, "kinds", kinds)

    @classmethod
    def from_string(cls, text: str) -> "PuncturePattern":
        try:
            return cls(np.array([_PUNCTURE_CHARS[c] for c in text], dtype=np.uint8))
        except KeyError as exc:
            raise PolarError(f"unknown puncture symbol {exc.args[0]!r}") from None

    def to_string(self) -> str:
        return "".join("TPS"[k] for k in self.kinds)

    @property
    def n_removed(self) -> int:
        return int(np.count_nonzero(self.kinds))

    def __eq__(self, other):
        return isinstance(other, PuncturePattern) and np.array_equal(self.kinds, other.kinds)


@dataclass(frozen=True, eq=False)
class PolarCode:
    """An immutable, validated polar code. Build it with :func:`build_code`."""

    n_codeword: int
    k_info: int
    frozen_mask: np.ndarray
    crc_spec: Optional[CrcSpec] = None
    puncture_pattern: Optional[PuncturePattern] = None
    n_transmitted: int = field(default=0)

    @property
    def crc_width(self) -> int:
        return self.crc_spec.width if self.crc_spec is not None else 0

    @property
    def n_payload(self) -> int:
        """Number of non-frozen positions, ``K + c``."""
        return self.k_info + self.crc_width

    @property
    def rate(self) -> float:
        return self.k_info / self.n_transmitted

    @property
    def info_positions(self) -> np.ndarray:
        return np.flatnonzero(self.frozen_mask == 0)

    @property
    def frozen_positions(self) -> np.ndarray:
        return np.flatnonzero(self.frozen_mask)

    def __repr__(self):
        crc = f", crc={self.crc_width}" if self.crc_width else ""
        return f"PolarCode(N={self.n_codeword}, K={self.k_info}, R={self.rate:.4g}{crc})"


def build_code(n: int, k: int, frozen_mask, crc: Optional[CrcSpec] = None,
               punct: Optional[PuncturePattern] = None) -> PolarCode:
    """Validate the parameters and return a :class:`PolarCode`."""
    if not is_power_of_two(n):
        raise NonPowerOfTwoN(f"N={n} is not a power of two (use a puncture pattern for other lengths)")
    mask = as_bits(frozen_mask)
    if mask.size != n:
        raise LengthMismatch(f"frozen mask has {mask.size} positions, N={n}")
    c = crc.width if crc is not None else 0
    if crc is not None and c == 0:
        crc = None
    if k < 1:
        raise FrozenCountMismatch(f"K must be positive, got {k}")
    n_free = n - int(mask.sum())
    if n_free != k + c:
        raise FrozenCountMismatch(f"{n_free} non-frozen positions, but K + c = {k} + {c} = {k + c}")
    n_tx = n
    if punct is not None:
        if punct.kinds.size != n:
            raise PunctureLengthMismatch(f"puncture pattern has {punct.kinds.size} positions, N={n}")
        n_tx = n - punct.n_removed
        if n_tx < k + c:
            raise PolarError(f"only {n_tx} transmitted positions for K + c = {k + c}")
    if not 0 < k / n_tx < 1:
        raise PolarError(f"rate K/N_tx = {k}/{n_tx} must lie in (0, 1)")
    mask = mask.copy()
    mask.setflags(write=False)
    return PolarCode(n, k, mask, crc, punct, n_tx)


def bhattacharyya_parameters(n: int, design_erasure: float) -> np.ndarray:
    """Bhattacharyya parameters of the ``n`` synthetic channels.

    Index ``i`` of the result matches input position ``i``: the most
    significant bit of ``i`` selects the first split (``2z - z^2`` for 0,
    ``z^2`` for 1).
    """
    if not is_power_of_two(n):
        raise NonPowerOfTwoN(f"N={n} is not a power of two")
    if not 0.0 < design_erasure < 1.0:
        raise InvalidDesignParameter(f"design erasure must be in (0, 1), got {design_erasure}")
    z = np.array([design_erasure], dtype=np.float64)
    while z.size < n:
        nxt = np.empty(2 * z.size)
        nxt[0::2] = 2.0 * z - z * z
        nxt[1::2] = z * z
        z = nxt
    return z


def construct_frozen_bhattacharyya(n: int, k_plus_c: int, design_erasure: float) -> np.ndarray:
    """Freeze the ``n - k_plus_c`` least reliable positions (largest Z).

    Ties are resolved by freezing the lower index first.
    """
    if not 0 < k_plus_c <= n:
        raise InvalidDesignParameter(f"K + c = {k_plus_c} must be in (0, {n}]")
    z = bhattacharyya_parameters(n, design_erasure)
    order = np.lexsort((np.arange(n), -z))
    mask = np.zeros(n, dtype=np.uint8)
    mask[order[: n - k_plus_c]] = 1
    return mask


def design_erasure_from_snr(ebn0_db: float, rate: float) -> float:
    """Bhattacharyya parameter of a BPSK/AWGN channel, ``exp(-R Eb/N0)``."""
    z = float(np.exp(-rate * 10.0 ** (ebn0_db / 10.0)))
    return min(max(z, 1e-300), 1.0 - 1e-16)


def parse_frozen_text(text: str) -> tuple[int, int, np.ndarray]:
    """Parse the two-line frozen-set format. Returns ``(n, k, mask)``."""
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty file", 1)
    head = lines[0].split()
    if len(head) != 2:
        raise ParseError(f"expected 'N K', got {lines[0]!r}", 1)
    try:
        n, k = int(head[0]), int(head[1])
    except ValueError:
        raise ParseError(f"expected 'N K', got {lines[0]!r}", 1) from None
    if len(lines) < 2:
        raise LengthMismatch("missing mask line")
    body = lines[1].strip()
    bad = set(body) - {"0", "1"}
    if bad:
        raise ParseError(f"unexpected characters {sorted(bad)} in mask", 2)
    if len(body) != n:
        raise LengthMismatch(f"mask has {len(body)} characters, header says N={n}")
    if any(line.strip() for line in lines[2:]):
        raise ParseError("trailing content after mask", 3)
    mask = np.frombuffer(body.encode("ascii"), dtype=np.uint8) - ord("0")
    return n, k, mask.astype(np.uint8)


def load_frozen_file(path) -> tuple[int, np.ndarray]:
    with open(path, "r", encoding="ascii") as fh:
        n, _, mask = parse_frozen_text(fh.read())
    return n, mask


def read_frozen_file(path) -> tuple[int, int, np.ndarray]:
    """Like :func:`load_frozen_file` but also returns the header's K."""
    with open(path, "r", encoding="ascii") as fh:
        return parse_frozen_text(fh.read())


def format_frozen_text(n: int, k: int, mask) -> str:
    mask = as_bits(mask, n)
    return f"{n} {k}\n" + "".join("1" if b else "0" for b in mask) + "\n"


def save_frozen_file(path, code) -> None:
    """Write ``code`` (a PolarCode, or an ``(n, k, mask)`` tuple)."""
    if isinstance(code, PolarCode):
        n, k, mask = code.n_codeword, code.k_info, code.frozen_mask
    else:
        n, k, mask = code
    with open(os.fspath(path), "w", encoding="ascii") as fh:
        fh.write(format_frozen_text(n, k, mask))


def load_puncture_file(path) -> PuncturePattern:
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError("empty file", 1)
    try:
        n = int(lines[0].strip())
    except ValueError:
        raise ParseError(f"expected 'N', got {lines[0]!r}", 1) from None
    if len(lines) < 2:
        raise LengthMismatch("missing pattern line")
    body = lines[1].strip()
    if set(body) - set("TPS"):
        raise ParseError(f"unexpected characters {sorted(set(body) - set('TPS'))}", 2)
    if len(body) != n:
        raise LengthMismatch(f"pattern has {len(body)} characters, header says N={n}")
    return PuncturePattern.from_string(body)


def save_puncture_file(path, pattern: PuncturePattern) -> None:
    with open(os.fspath(path), "w", encoding="ascii") as fh:
        fh.write(f"{pattern.kinds.size}\n{pattern.to_string()}\n")


@njit(cache=True)
def _butterflies(x):
    n = x.size
    half = 1
    while half < n:
        for start in range(0, n, 2 * half):
            for j in range(start, start + half):
                x[j] ^= x[j + half]
        half *= 2


def polar_transform(u) -> np.ndarray:
    """Return ``u F^{(x)n}`` over GF(2) using log2(N) butterfly passes."""
    x = np.array(u, dtype=np.uint8, copy=True)
    if x.ndim != 1 or not is_power_of_two(x.size):
        raise NonPowerOfTwoLength(f"length {x.size} is not a power of two")
    _butterflies(x)
    return x


def crc_bits(spec: CrcSpec, info: np.ndarray) -> np.ndarray:
    """The ``spec.width`` CRC bits of ``info``, most significant first."""
    from .crc import crc_engine

    value = crc_engine(spec).compute(info)
    shifts = np.arange(spec.width - 1, -1, -1, dtype=np.uint64)
    return ((np.uint64(value) >> shifts) & np.uint64(1)).astype(np.uint8)


def make_payload(code: PolarCode, info) -> np.ndarray:
    """Information bits followed by their CRC (``K + c`` bits)."""
    info = as_bits(info)
    if info.size != code.k_info:
        raise InfoLengthMismatch(f"expected {code.k_info} information bits, got {info.size}")
    if code.crc_spec is None:
        return info.copy()
    return np.concatenate([info, crc_bits(code.crc_spec, info)])


def encode_systematic(code: PolarCode, info) -> np.ndarray:
    """Systematic codeword ``x`` with ``x[A] = info || crc``."""
    payload = make_payload(code, info)
    u = np.zeros(code.n_codeword, dtype=np.uint8)
    u[code.info_positions] = payload
    _butterflies(u)
    u[code.frozen_mask.astype(bool)] = 0
    _butterflies(u)
    return u

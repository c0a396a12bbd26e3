"""Decoder front ends: SC/SSC, (CA-)SCL/SSCL and the PA/FA adaptive drivers."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from ..code_model import PolarCode, as_bits
from ..crc import PRESETS, crc_engine
from ..decode_tree import PruneTree, PruningConfig
from ..errors import InvalidListSize, LengthMismatch, MissingCrc, PolarError
from ..kernels import Precision, get_precision, quantize_llr
from . import _engine as eng
from .paths import Layout

ALGORITHMS = ("SC", "SSC", "SCL", "SSCL", "CA-SSCL", "PA-SSCL", "FA-SSCL")
_LIST = {"SCL", "SSCL", "CA-SSCL", "PA-SSCL", "FA-SSCL"}
_PRUNED = {"SSC", "SSCL", "CA-SSCL", "PA-SSCL", "FA-SSCL"}
_NEEDS_CRC = {"CA-SSCL", "PA-SSCL", "FA-SSCL"}
_ADAPTIVE = {"PA-SSCL", "FA-SSCL"}


@dataclass
class DecodeResult:
    decision: np.ndarray
    payload: np.ndarray
    crc_ok: Optional[bool]
    escalation_level: int
    latency: float
    candidates: List[Tuple[np.ndarray, float]] = field(default_factory=list)


def normalize_algorithm(name: str) -> str:
    key = str(name).strip().upper()
    if key not in ALGORITHMS:
        raise PolarError(f"unknown decoder {name!r}; choose one of {', '.join(ALGORITHMS)}")
    return key


def _check_list_size(L: int, minimum: int = 1) -> int:
    if int(L) != L or L < minimum or (int(L) & (int(L) - 1)):
        raise InvalidListSize(f"list size must be a power of two >= {minimum}, got {L}")
    return int(L)


class Decoder:
    """A reusable decoder instance with its own scratch buffers.

    Instances are single threaded. They pickle cleanly (buffers are rebuilt),
    so an idle decoder can be handed to a worker process.
    """

    def __init__(self, code: PolarCode, algorithm: str = "SC", L: int = 1, precision=32,
                 pruning: Optional[PruningConfig] = None, layout="copy",
                 quant_scale: Optional[float] = None):
        self.code = code
        self.algorithm = normalize_algorithm(algorithm)
        self.precision: Precision = get_precision(precision)
        self.layout = Layout.parse(layout)
        self.quant_scale = quant_scale
        if self.algorithm in _ADAPTIVE:
            self.L = _check_list_size(L, 2)
        elif self.algorithm in _LIST:
            self.L = _check_list_size(L)
        else:
            self.L = 1
        if self.algorithm in _NEEDS_CRC and code.crc_spec is None:
            raise MissingCrc(f"{self.algorithm} needs a code with a CRC")
        if self.algorithm in _PRUNED:
            self.pruning = pruning if pruning is not None else PruningConfig.default(self.precision.bits)
        else:
            self.pruning = PruningConfig.none()
        self.tree = PruneTree(code.frozen_mask, self.pruning)
        self.crc = crc_engine(code.crc_spec) if code.crc_spec is not None else None
        self._build()

    # pickling: drop the scratch buffers
    def __getstate__(self):
        state = self.__dict__.copy()
        for key in ("_st", "_sc_lam", "_sc_ps", "_chan", "_out", "_crc_args", "_tmp"):
            state.pop(key, None)
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._build()

    def _build(self):
        n = self.code.n_codeword
        p = self.precision
        self._n_log = n.bit_length() - 1
        self._bound = p.llr_sat()
        self._msat = p.metric_sat()
        self._prog = np.ascontiguousarray(self.tree.program)
        self._blocks = np.ascontiguousarray(self.tree.info_block_array)
        self._sc_lam = np.zeros(2 * n, dtype=p.llr_dtype)
        self._sc_ps = np.zeros(n, dtype=p.psum_dtype)
        self._chan = np.zeros(n, dtype=p.llr_dtype)
        self._out = np.zeros(n, dtype=np.uint8)
        l_slots = self.L if self.algorithm in _LIST else 1
        self._st = eng.alloc_path_arrays(n, l_slots, p.llr_dtype, p.psum_dtype,
                                         self.layout is Layout.SHARED)
        self._tmp = self._st.tmp
        # list_decode wants a well-typed CRC argument even when it is unused
        self._crc_args = (self.crc or crc_engine(PRESETS["8"])).kernel_args

    @property
    def is_list(self) -> bool:
        return self.algorithm in _LIST

    @property
    def shared(self) -> bool:
        return self.layout is Layout.SHARED

    def quantize(self, llr) -> np.ndarray:
        return np.asarray(quantize_llr(np.asarray(llr, dtype=np.float64), self.precision, self.quant_scale))

    def _load(self, llr, prequantized: bool) -> np.ndarray:
        llr = np.asarray(llr)
        if llr.ndim != 1 or llr.size != self.code.n_codeword:
            raise LengthMismatch(f"expected {self.code.n_codeword} LLRs, got {llr.size}")
        if prequantized:
            bound = float(self.precision.llr_max)
            self._chan[:] = np.clip(llr, -bound, bound)
        else:
            self._chan[:] = self.quantize(llr)
        return self._chan

    def decode_into(self, chan: np.ndarray, out: np.ndarray) -> Tuple[int, bool]:
        """Hot path: decode LLRs already in the decoder's dtype into ``out``.

        Returns ``(escalation level, crc_ok)``; ``crc_ok`` is True when the
        code has no CRC or the decoder does not check it.
        """
        st = self._st
        if self.algorithm in _ADAPTIVE:
            lvl, ok = eng.adaptive_run(self._prog, self._prog, self._n_log, chan, self._sc_lam,
                                       self._sc_ps, st, self.L, self.algorithm == "FA-SSCL",
                                       self.shared, self._bound, self._msat, self._blocks,
                                       self.code.n_payload, self._crc_args, out)
            return int(lvl), bool(ok)
        if not self.is_list:
            eng.sc_decode(self._prog, self._n_log, chan, self._sc_lam, self._sc_ps, self._tmp,
                          self._bound, out)
            return 1, True
        ok = eng.list_decode(self._prog, self._n_log, chan, st, self.L, self.shared, self._bound,
                             self._msat, self.algorithm == "CA-SSCL", self._blocks,
                             self.code.n_payload, self._crc_args, out)
        return self.L, bool(ok)

    def decode(self, llr, prequantized: bool = False, keep_list: bool = False) -> DecodeResult:
        """Decode one frame of channel LLRs.

        Real-valued LLRs are quantized to the decoder's precision first
        unless ``prequantized`` is set.
        """
        chan = self._load(llr, prequantized)
        t0 = time.perf_counter()
        level, ok = self.decode_into(chan, self._out)
        latency = time.perf_counter() - t0
        decision = self._out.copy()
        payload = self._payload(decision)
        crc_ok = None
        if self.crc is not None:
            crc_ok = bool(self.crc.check(payload)) if self.algorithm not in _NEEDS_CRC else ok
        candidates = []
        if keep_list and self.is_list:
            candidates = self.list_candidates()
        return DecodeResult(decision, payload, crc_ok, level, latency, candidates)

    def list_candidates(self) -> List[Tuple[np.ndarray, float]]:
        """The final list of the last list pass, best metric first."""
        st = self._st
        count = eng.ranked_paths(st, self.L)
        n = self.code.n_codeword
        return [(eng.decision_view(st, int(p), n, self.shared).astype(np.uint8), float(st.metric[p]))
                for p in st.target[:count].copy()]

    def _payload(self, decision) -> np.ndarray:
        out = np.empty(self.code.n_payload, dtype=np.uint8)
        eng.gather_payload(decision, self._blocks, out)
        return out

    def __repr__(self):
        return (f"Decoder({self.algorithm}, N={self.code.n_codeword}, K={self.code.k_info}, L={self.L}, "
                f"prec={self.precision.bits}, nodes={self.pruning.label()}, psum={self.layout.value})")


# ------------------------------------------------------------ function API


def _code_for_tree(tree: PruneTree, crc_spec=None) -> PolarCode:
    from ..code_model import build_code

    k = int((~tree.frozen_mask.astype(bool)).sum())
    width = crc_spec.width if crc_spec is not None else 0
    return build_code(tree.n, k - width, tree.frozen_mask, crc_spec)


def _make(tree: PruneTree, algorithm: str, L: int, precision, crc_spec, layout) -> Decoder:
    # the pruned algorithm names take the tree's own config, which may be "none"
    code = _code_for_tree(tree, crc_spec)
    return Decoder(code, algorithm, L=L, precision=precision, pruning=tree.config, layout=layout)


def decode_sc(llr, tree: PruneTree, precision=32) -> DecodeResult:
    """SC over ``tree`` (pruned nodes use their exact shortcuts)."""
    return _make(tree, "SSC", 1, precision, None, "copy").decode(llr, prequantized=True)


def decode_scl(llr, tree: PruneTree, L: int, precision=32, layout="copy") -> DecodeResult:
    """List decoding over ``tree``; the best metric wins and the list is kept."""
    dec = _make(tree, "SSCL", L, precision, None, layout)
    return dec.decode(llr, prequantized=True, keep_list=True)


def decode_ca_sscl(llr, tree: PruneTree, L: int, crc, precision=32, layout="copy") -> DecodeResult:
    """List decoding with CRC-aided selection of the final candidate."""
    if crc is None:
        raise MissingCrc("CA-SSCL needs a CRC")
    spec = getattr(crc, "spec", crc)
    dec = _make(tree, "CA-SSCL", L, precision, spec, layout)
    return dec.decode(llr, prequantized=True, keep_list=True)


def decode_adaptive(llr, tree: PruneTree, L_max: int, mode: str, crc, precision=32,
                    layout="copy") -> DecodeResult:
    """SC first; on CRC failure PA jumps to ``L_max``, FA doubles L from 2."""
    if crc is None:
        raise MissingCrc("adaptive decoding needs a CRC")
    mode = str(mode).upper()
    if mode not in ("PA", "FA"):
        raise PolarError(f"adaptive mode must be PA or FA, got {mode!r}")
    spec = getattr(crc, "spec", crc)
    dec = _make(tree, f"{mode}-SSCL", L_max, precision, spec, layout)
    return dec.decode(llr, prequantized=True)


def hard_decision(llr) -> np.ndarray:
    return as_bits(np.asarray(llr) < 0)

"""Path-set state and the individual list-decoding steps.

These wrappers drive the same compiled routines the list decoder uses, one
step at a time, which is handy for inspection and tests.
"""

from __future__ import annotations

import enum

import numpy as np

from ..decode_tree import OP_LI, OP_R0, OP_R1, OP_REP, OP_SPC, Node, NodeKind
from ..errors import InvalidListSize, LengthTooSmall, NoFreeSlot, PolarError
from ..kernels import get_precision
from . import _engine as eng


class Layout(enum.Enum):
    COPY = "copy"
    SHARED = "shared"

    @classmethod
    def parse(cls, value) -> "Layout":
        if isinstance(value, Layout):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise PolarError(f"partial-sum layout must be 'copy' or 'shared', got {value!r}") from None


class PathSet:
    """Up to ``l_max`` decoding paths over a code of length ``n``."""

    def __init__(self, n: int, l_max: int, precision=32, layout="copy"):
        if l_max < 1:
            raise InvalidListSize(f"list size must be >= 1, got {l_max}")
        self.n = n
        self.n_log = n.bit_length() - 1
        self.l_max = l_max
        self.precision = get_precision(precision)
        self.layout = Layout.parse(layout)
        self.arrays = eng.alloc_path_arrays(n, l_max, self.precision.llr_dtype,
                                            self.precision.psum_dtype, self.shared)
        self.reset(np.zeros(n, dtype=self.precision.llr_dtype))

    @property
    def shared(self) -> bool:
        return self.layout is Layout.SHARED

    def reset(self, channel_llr) -> None:
        chan = np.ascontiguousarray(channel_llr, dtype=self.precision.llr_dtype)
        if chan.size != self.n:
            raise PolarError(f"expected {self.n} channel LLRs, got {chan.size}")
        eng.reset_paths(self.arrays, self.n_log, chan)

    @property
    def alive(self) -> np.ndarray:
        return np.flatnonzero(self.arrays.alive[: self.l_max])

    @property
    def metrics(self) -> np.ndarray:
        return self.arrays.metric[self.alive].copy()

    def metric(self, p: int) -> float:
        return float(self.arrays.metric[p])

    def set_node_llr(self, p: int, depth: int, values) -> None:
        """Write LLRs of the node at ``depth`` for path ``p`` (own row first)."""
        values = np.asarray(values)
        if depth == 0:
            self.arrays.llr[0, : values.size] = values
            return
        row = eng.own_row(self.arrays, p, depth, self.l_max)
        base = eng.region(self.n_log, depth)
        self.arrays.llr[row, base: base + values.size] = values

    def node_llr(self, p: int, depth: int, size: int) -> np.ndarray:
        return eng.node_llr(self.arrays, p, self.n_log, depth, size).copy()

    def psum(self, p: int) -> np.ndarray:
        """The partial-sum storage seen by path ``p`` (``N`` or ``2N-1`` elements)."""
        a = self.arrays
        if self.shared:
            return a.ps[a.pb[p], : 2 * self.n - 1].copy()
        return a.ps[p, : self.n].copy()

    def node_output(self, p: int, depth: int, offset: int, size: int) -> np.ndarray:
        return eng.psum_read(self.arrays, p, self.n_log, depth, offset, size, self.shared).copy()

    def decision(self, p: int) -> np.ndarray:
        return eng.decision_view(self.arrays, p, self.n, self.shared).astype(np.uint8)

    def bank_of(self, p: int) -> int:
        return int(self.arrays.pb[p])

    def _bounds(self):
        return self.precision.llr_sat(), self.precision.metric_sat()


def scl_update_paths_leaf(paths: PathSet, leaf_llr, frozen: bool, offset: int = 0) -> PathSet:
    """One leaf step: ``leaf_llr[i]`` is the leaf LLR of the i-th alive path."""
    alive = paths.alive
    leaf_llr = np.atleast_1d(np.asarray(leaf_llr))
    if leaf_llr.size != alive.size:
        raise PolarError(f"{alive.size} alive paths but {leaf_llr.size} leaf LLRs")
    for p, v in zip(alive, leaf_llr):
        paths.set_node_llr(int(p), paths.n_log, [v])
    _, msat = paths._bounds()
    st = paths.arrays
    if frozen:
        eng.frozen_step(st, paths.n_log, paths.n_log, offset, 1, paths.shared, paths.l_max, msat)
    else:
        ncand = eng.gen_candidates(st, OP_LI, paths.n_log, paths.n_log, 1, paths.l_max, msat)
        eng.select_and_apply(st, ncand, OP_LI, paths.n_log, paths.n_log, offset, 1,
                             paths.shared, paths.l_max, msat)
    return paths


_SPECIAL_OPS = {NodeKind.R1: OP_R1, NodeKind.REP: OP_REP, NodeKind.SPC: OP_SPC}


def process_special_node(paths: PathSet, node: Node, node_llr=None) -> PathSet:
    """Apply an R0/R1/REP/SPC node to every alive path.

    ``node_llr`` optionally gives the node's LLRs, one row per alive path
    (a single 1-D vector is used for all paths).
    """
    if not node.is_special:
        raise PolarError(f"{node.kind.name} is not a special node")
    alive = paths.alive
    if node_llr is not None:
        rows = np.atleast_2d(np.asarray(node_llr))
        if rows.shape[0] == 1 and alive.size > 1:
            rows = np.repeat(rows, alive.size, axis=0)
        if rows.shape != (alive.size, node.size):
            raise PolarError(f"node LLRs must have shape ({alive.size}, {node.size})")
        for p, row in zip(alive, rows):
            paths.set_node_llr(int(p), node.depth, row)
    _, msat = paths._bounds()
    st = paths.arrays
    args = (paths.n_log, node.depth, node.offset, node.size, paths.shared, paths.l_max)
    if node.kind == NodeKind.R0:
        eng.frozen_step(st, *args, msat)
    else:
        op = _SPECIAL_OPS[node.kind]
        ncand = eng.gen_candidates(st, op, paths.n_log, node.depth, node.size, paths.l_max, msat)
        eng.select_and_apply(st, ncand, op, *args, msat)
    return paths


def duplicate_path(paths: PathSet, src: int, dst: int, live=None) -> PathSet:
    """Copy path ``src`` into the free slot ``dst``."""
    a = paths.arrays
    if not a.alive[src]:
        raise PolarError(f"source path {src} is not alive")
    if not 0 <= dst < paths.l_max or a.alive[dst]:
        raise NoFreeSlot(f"slot {dst} is not free")
    eng.duplicate_path(a, src, dst, paths.n_log, paths.n if live is None else live, paths.shared)
    return paths


def select_two_extremes(values, mode: str = "two_smallest", return_comparisons: bool = False):
    """Indices of the two smallest (or largest) magnitudes, tournament style."""
    vals = np.ascontiguousarray(values, dtype=np.float64)
    n = vals.size
    if n < 2:
        raise LengthTooSmall(f"need at least 2 values, got {n}")
    if mode not in ("two_smallest", "two_largest"):
        raise PolarError(f"unknown mode {mode!r}")
    n_log = max(1, (n - 1).bit_length())
    work = np.empty(n, dtype=np.int32)
    opp = np.empty((n, n_log + 1), dtype=np.int32)
    nopp = np.empty(n, dtype=np.int32)
    i1, i2, comps = eng.schreier_two(vals, n, mode == "two_smallest", work, opp, nopp)
    if return_comparisons:
        return (int(i1), int(i2)), int(comps)
    return int(i1), int(i2)


def sort_survivors(metrics) -> np.ndarray:
    """Stable ascending permutation by ``(metric, index)``."""
    m = np.ascontiguousarray(metrics, dtype=np.float64)
    order = np.empty(m.size, dtype=np.int32)
    eng.sort_survivors(m, m.size, order)
    return order.astype(np.int64)

"""Decoding-tree classification (R0 / R1 / REP / SPC pruning).

A :class:`PruneTree` is built from a frozen mask and a :class:`PruningConfig`
and is immutable afterwards. It also carries the flat operation program that
the decoders execute, so changing the code or the pruning strategy never
requires recompiling anything.
"""

from __future__ import annotations

import enum
import re
from collections import Counter
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .code_model import as_bits, is_power_of_two
from .errors import InvalidPruning, NonPowerOfTwoLength


class NodeKind(enum.IntEnum):
    R0 = 0
    R1 = 1
    REP = 2
    SPC = 3
    BRANCH = 4
    LEAF_FROZEN = 5
    LEAF_INFO = 6


# program opcodes (see decoders._engine)
OP_F, OP_G, OP_H, OP_HL, OP_R0, OP_R1, OP_REP, OP_SPC, OP_LF, OP_LI = range(10)

_KIND_OP = {
    NodeKind.R0: OP_R0,
    NodeKind.R1: OP_R1,
    NodeKind.REP: OP_REP,
    NodeKind.SPC: OP_SPC,
    NodeKind.LEAF_FROZEN: OP_LF,
    NodeKind.LEAF_INFO: OP_LI,
}


@dataclass(frozen=True)
class PruningConfig:
    """Which special nodes may replace subtrees, and their size caps.

    ``None`` for a size cap means unlimited.
    """

    enable_r0: bool = True
    enable_r1: bool = True
    enable_rep: bool = True
    enable_spc: bool = True
    spc_max_size: Optional[int] = 4
    rep_max_size: Optional[int] = None

    def __post_init__(self):
        if self.enable_spc and self.spc_max_size is not None and self.spc_max_size < 4:
            raise InvalidPruning(f"SPC size cap must be at least 4, got {self.spc_max_size}")
        if self.enable_rep and self.rep_max_size is not None and self.rep_max_size < 2:
            raise InvalidPruning(f"REP size cap must be at least 2, got {self.rep_max_size}")

    @classmethod
    def none(cls) -> "PruningConfig":
        return cls(False, False, False, False)

    @classmethod
    def default(cls, precision_bits: int = 32) -> "PruningConfig":
        return cls(rep_max_size=8 if precision_bits == 8 else None)

    @classmethod
    def parse(cls, text: str) -> "PruningConfig":
        """Parse e.g. ``"R0,R1,REP,SPC4"`` or ``"R0,R1,REP_8-,SPC4+"``."""
        opts = dict(enable_r0=False, enable_r1=False, enable_rep=False, enable_spc=False,
                    spc_max_size=4, rep_max_size=None)
        for raw in text.split(","):
            tok = raw.strip().upper()
            if tok in ("", "NONE"):
                continue
            if tok == "R0":
                opts["enable_r0"] = True
            elif tok == "R1":
                opts["enable_r1"] = True
            elif m := re.fullmatch(r"REP(?:_?(\d+)([+-]))?", tok):
                opts["enable_rep"] = True
                if m.group(1) is not None and m.group(2) == "-":
                    opts["rep_max_size"] = int(m.group(1))
            elif m := re.fullmatch(r"SPC_?(\d+)(\+|-)?", tok):
                opts["enable_spc"] = True
                opts["spc_max_size"] = None if m.group(2) == "+" else int(m.group(1))
            elif tok == "SPC":
                opts["enable_spc"] = True
            else:
                raise InvalidPruning(f"unknown node type {raw.strip()!r}")
        return cls(**opts)

    def label(self) -> str:
        parts = []
        if self.enable_r0:
            parts.append("R0")
        if self.enable_r1:
            parts.append("R1")
        if self.enable_rep:
            parts.append("REP" if self.rep_max_size is None else f"REP_{self.rep_max_size}-")
        if self.enable_spc:
            parts.append("SPC4+" if self.spc_max_size is None else f"SPC{self.spc_max_size}")
        return ",".join(parts) or "NONE"


def _fits(size: int, cap: Optional[int]) -> bool:
    return cap is None or size <= cap


@dataclass(frozen=True)
class Node:
    kind: NodeKind
    depth: int
    offset: int
    size: int
    left: Optional["Node"] = None
    right: Optional["Node"] = None

    @property
    def is_special(self) -> bool:
        return self.kind in (NodeKind.R0, NodeKind.R1, NodeKind.REP, NodeKind.SPC)


def _match(frozen: np.ndarray, size: int, cfg: PruningConfig) -> Optional[NodeKind]:
    n_frozen = int(frozen.sum())
    if size >= 2:
        if cfg.enable_rep and _fits(size, cfg.rep_max_size) and n_frozen == size - 1 and not frozen[-1]:
            return NodeKind.REP
        if cfg.enable_spc and _fits(size, cfg.spc_max_size) and n_frozen == 1 and frozen[0]:
            return NodeKind.SPC
        if cfg.enable_r0 and n_frozen == size:
            return NodeKind.R0
        if cfg.enable_r1 and n_frozen == 0:
            return NodeKind.R1
    return None


class PruneTree:
    """Typed decoding tree plus its compiled operation program."""

    def __init__(self, frozen_mask, config: PruningConfig):
        mask = as_bits(frozen_mask)
        if not is_power_of_two(mask.size):
            raise NonPowerOfTwoLength(f"mask length {mask.size} is not a power of two")
        self.frozen_mask = mask.copy()
        self.frozen_mask.setflags(write=False)
        self.config = config
        self.n = mask.size
        self.n_log = self.n.bit_length() - 1
        self.root = self._build(0, 0, self.n)
        self.program = self._compile()
        self.program.setflags(write=False)
        self.info_blocks = self._info_blocks()
        self.info_block_array = np.array(self.info_blocks, dtype=np.int64).reshape(-1, 2)
        self.info_block_array.setflags(write=False)

    def _build(self, depth, offset, size) -> Node:
        frozen = self.frozen_mask[offset:offset + size]
        if size == 1:
            kind = NodeKind.LEAF_FROZEN if frozen[0] else NodeKind.LEAF_INFO
            return Node(kind, depth, offset, 1)
        kind = _match(frozen, size, self.config)
        if kind is not None:
            return Node(kind, depth, offset, size)
        half = size // 2
        return Node(NodeKind.BRANCH, depth, offset, size,
                    self._build(depth + 1, offset, half),
                    self._build(depth + 1, offset + half, half))

    def nodes(self):
        """All nodes in pre-order."""
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            if node.kind == NodeKind.BRANCH:
                stack.append(node.right)
                stack.append(node.left)

    def leaves(self):
        """Terminal (non-branch) nodes, left to right."""
        return [nd for nd in self.nodes() if nd.kind != NodeKind.BRANCH]

    @property
    def n_nodes(self) -> int:
        return sum(1 for _ in self.nodes())

    def _compile(self) -> np.ndarray:
        ops = []

        def visit(nd: Node):
            if nd.kind == NodeKind.BRANCH:
                ops.append((OP_F, nd.depth, nd.offset, nd.size))
                visit(nd.left)
                ops.append((OP_HL, nd.depth, nd.offset, nd.size))
                ops.append((OP_G, nd.depth, nd.offset, nd.size))
                visit(nd.right)
                ops.append((OP_H, nd.depth, nd.offset, nd.size))
            else:
                ops.append((_KIND_OP[nd.kind], nd.depth, nd.offset, nd.size))

        visit(self.root)
        return np.array(ops, dtype=np.int64).reshape(-1, 4)

    def _info_blocks(self):
        blocks = []
        for nd in self.leaves():
            if nd.kind in (NodeKind.R1, NodeKind.LEAF_INFO):
                start, length = nd.offset, nd.size
            elif nd.kind == NodeKind.SPC:
                start, length = nd.offset + 1, nd.size - 1
            elif nd.kind == NodeKind.REP:
                start, length = nd.offset + nd.size - 1, 1
            else:
                continue
            if blocks and blocks[-1][0] + blocks[-1][1] == start:
                blocks[-1] = (blocks[-1][0], blocks[-1][1] + length)
            else:
                blocks.append((start, length))
        return blocks

    def __repr__(self):
        return f"PruneTree(N={self.n}, nodes={self.n_nodes}, config={self.config.label()})"


def classify_tree(frozen_mask, config: Optional[PruningConfig] = None) -> PruneTree:
    return PruneTree(frozen_mask, config if config is not None else PruningConfig.default())


def node_histogram(tree: PruneTree) -> Counter:
    """Count terminal nodes by ``(kind name, block size)``."""
    return Counter((nd.kind.name, nd.size) for nd in tree.leaves())


def format_histogram(hist: Counter) -> str:
    def label(kind, size):
        return {"LEAF_FROZEN": "F", "LEAF_INFO": "I"}.get(kind, kind) + (f"[{size}]" if size > 1 else "")

    order = sorted(hist.items(), key=lambda kv: (kv[0][0], kv[0][1]))
    return ", ".join(f"{label(k, s)}: {c}" for (k, s), c in order)

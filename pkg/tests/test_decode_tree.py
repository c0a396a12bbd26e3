import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polarlist.decode_tree import (
    NodeKind,
    PruningConfig,
    classify_tree,
    format_histogram,
    node_histogram,
)
from polarlist.errors import InvalidPruning, NonPowerOfTwoLength

ALL = PruningConfig(spc_max_size=None)


def mask(text):
    return np.array([int(c) for c in text], dtype=np.uint8)


def shape(node):
    if node.kind == NodeKind.BRANCH:
        return (shape(node.left), shape(node.right))
    return (node.kind.name, node.size)


def pattern_kind(block, cfg):
    """Independent statement of the node patterns, in precedence order."""
    size = len(block)
    info = [i for i, b in enumerate(block) if not b]

    def ok(cap):
        return cap is None or size <= cap

    if size < 2:
        return None
    if cfg.enable_rep and ok(cfg.rep_max_size) and info == [size - 1]:
        return NodeKind.REP
    if cfg.enable_spc and ok(cfg.spc_max_size) and info == list(range(1, size)):
        return NodeKind.SPC
    if cfg.enable_r0 and not info:
        return NodeKind.R0
    if cfg.enable_r1 and len(info) == size:
        return NodeKind.R1
    return None


class TestExamples:
    def test_two_frozen_two_info(self):
        assert shape(classify_tree(mask("1100"), ALL).root) == (("R0", 2), ("R1", 2))

    def test_rep4(self):
        tree = classify_tree(mask("1110"), ALL)
        assert shape(tree.root) == ("REP", 4)
        assert node_histogram(tree) == {("REP", 4): 1}

    def test_spc4_and_disabled(self):
        assert shape(classify_tree(mask("1000"), PruningConfig()).root) == ("SPC", 4)
        no_spc = PruningConfig(enable_spc=False)
        assert classify_tree(mask("1000"), no_spc).root.kind == NodeKind.BRANCH

    @pytest.mark.parametrize("n", [2, 16, 1024])
    def test_degenerate_rates(self, n):
        assert node_histogram(classify_tree(np.ones(n, dtype=np.uint8))) == {("R0", n): 1}
        assert node_histogram(classify_tree(np.zeros(n, dtype=np.uint8))) == {("R1", n): 1}

    def test_two_position_block_prefers_rep(self):
        assert classify_tree(mask("10"), ALL).root.kind == NodeKind.REP

    @pytest.mark.parametrize("n", [1, 4, 256])
    def test_unpruned_is_full_tree(self, n):
        tree = classify_tree(np.random.default_rng(n).integers(0, 2, n), PruningConfig.none())
        assert tree.n_nodes == 2 * n - 1

    def test_rep_cap(self):
        m = np.ones(16, dtype=np.uint8)
        m[-1] = 0
        assert shape(classify_tree(m, PruningConfig()).root) == ("REP", 16)
        capped = classify_tree(m, PruningConfig.default(8))
        assert shape(capped.root) == (("R0", 8), ("REP", 8))

    def test_histogram_labels(self):
        text = format_histogram(node_histogram(classify_tree(mask("11011000"), PruningConfig.none())))
        assert text == "F: 4, I: 4"
        assert format_histogram(node_histogram(classify_tree(mask("1100"), ALL))) == "R0[2]: 1, R1[2]: 1"

    def test_not_power_of_two(self):
        with pytest.raises(NonPowerOfTwoLength):
            classify_tree(np.ones(6))


class TestConfig:
    def test_parse_round_trip(self):
        for text in ("R0,R1,REP,SPC4", "R0,R1,REP_8-,SPC4+", "R1", "NONE", "REP_2-"):
            assert PruningConfig.parse(PruningConfig.parse(text).label()) == PruningConfig.parse(text)

    def test_parse_values(self):
        cfg = PruningConfig.parse("R0,R1,REP_8-,SPC4+")
        assert (cfg.rep_max_size, cfg.spc_max_size) == (8, None)
        assert PruningConfig.parse("R0,R1,REP,SPC4") == PruningConfig()

    def test_defaults(self):
        assert PruningConfig.default(8).rep_max_size == 8
        assert PruningConfig.default(16).rep_max_size is None
        assert PruningConfig.default().label() == "R0,R1,REP,SPC4"

    @pytest.mark.parametrize("text", ["R2", "SPC2", "REP_1-", "bogus"])
    def test_parse_errors(self, text):
        with pytest.raises(InvalidPruning):
            PruningConfig.parse(text)


def test_all_masks_of_four_match_the_pattern_oracle():
    for bits in itertools.product((0, 1), repeat=4):
        tree = classify_tree(np.array(bits), ALL)
        want = pattern_kind(bits, ALL)
        if want is not None:
            assert tree.root.kind == want
        else:
            assert tree.root.kind == NodeKind.BRANCH


configs = st.builds(
    PruningConfig,
    st.booleans(), st.booleans(), st.booleans(), st.booleans(),
    st.sampled_from([4, 8, None]), st.sampled_from([2, 8, None]),
)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 7).flatmap(lambda k: st.lists(st.integers(0, 1), min_size=2 ** k, max_size=2 ** k)),
       configs)
def test_tree_invariants(bits, cfg):
    m = np.array(bits, dtype=np.uint8)
    tree = classify_tree(m, cfg)
    covered = np.zeros(m.size, dtype=int)
    for nd in tree.nodes():
        block = tuple(m[nd.offset:nd.offset + nd.size])
        assert nd.size == m.size >> nd.depth
        if nd.kind == NodeKind.BRANCH:
            # maximal: a branch never matches an enabled pattern
            assert pattern_kind(block, cfg) is None
        elif nd.size == 1:
            assert nd.kind == (NodeKind.LEAF_FROZEN if block[0] else NodeKind.LEAF_INFO)
        else:
            assert nd.kind == pattern_kind(block, cfg)
        if nd.kind != NodeKind.BRANCH:
            covered[nd.offset:nd.offset + nd.size] += 1
    assert (covered == 1).all()
    assert sum(s * c for (_, s), c in node_histogram(tree).items()) == m.size
    # info blocks list exactly the free positions
    free = [i for s, n in tree.info_blocks for i in range(s, s + n)]
    assert free == list(np.flatnonzero(m == 0))

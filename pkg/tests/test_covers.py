import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpcolor import constructions, covers, graphs
from dpcolor.covers import (
    ConeCover,
    Cover,
    TreeLabelingSpace,
    canonical_cover,
    count_colorings,
    count_colorings_containing,
)
from dpcolor.errors import BudgetExceeded, ParseError
from dpcolor.graphs import Graph

from oracles import cover_colorings


def as_table(cover):
    return dict(zip(cover.base.edges, cover.matchings))


@st.composite
def small_covers(draw, max_n=5, max_m=4, full=False):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    edges = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=7)) if pairs else []
    m = draw(st.integers(1, max_m))
    mats = []
    for _ in edges:
        perm = draw(st.permutations(range(m)))
        if not full:
            drop = draw(st.lists(st.booleans(), min_size=m, max_size=m))
            perm = [None if d else x for x, d in zip(perm, drop)]
        mats.append(tuple(perm))
    return Cover(Graph(n, edges), m, tuple(mats))


# -- validation and basics ---------------------------------------------------------


def test_rejects_non_matchings():
    c4 = graphs.cycle(4)
    with pytest.raises(ValueError):
        Cover(c4, 2, ((0, 0), (0, 1), (0, 1), (0, 1)))
    with pytest.raises(ValueError):
        Cover(c4, 2, ((0, 2), (0, 1), (0, 1), (0, 1)))
    with pytest.raises(ValueError):
        Cover(c4, 2, ((0, 1),) * 3)


def test_from_edges_accepts_either_orientation():
    c4 = graphs.cycle(4)
    a = Cover.from_edges(c4, 3, {(3, 0): (1, 2, 0)})
    assert a.matching(3, 0) == (1, 2, 0)
    assert a.matching(0, 3) == (2, 0, 1)
    assert not Cover.from_edges(c4, 3, {}, default=None).is_full


def test_canonical_examples():
    assert count_colorings(canonical_cover(graphs.cycle(4), 3)) == 18
    assert count_colorings(canonical_cover(graphs.complete(3), 2)) == 0
    assert count_colorings(canonical_cover(graphs.complete(1), 5)) == 5


def test_count_examples():
    c4 = graphs.cycle(4)
    swap = Cover.from_edges(c4, 2, {(0, 3): (1, 0)})
    assert count_colorings(swap) == 0
    shift = Cover.from_edges(c4, 3, {(0, 3): (1, 2, 0)})
    assert count_colorings(shift) == 15 == cover_colorings(4, 3, as_table(shift))


def test_count_containing_examples():
    k3 = canonical_cover(graphs.complete(3), 3)
    assert count_colorings_containing(k3, {0: 0}) == 2
    h1 = Cover.from_edges(graphs.wheel(4), 4, {(1, 4): (0, 1, 3, 2)})
    assert count_colorings_containing(h1, {0: 0}) == 16
    assert count_colorings_containing(h1, {0: 2}) == 20
    assert covers.fiber_counts(h1, 0) == (16, 16, 20, 20)


def test_count_containing_rejects_dependent_assignment():
    k3 = canonical_cover(graphs.complete(3), 3)
    with pytest.raises(ValueError):
        count_colorings_containing(k3, {0: 1, 1: 1})


@settings(max_examples=200, deadline=None)
@given(small_covers())
def test_count_matches_oracle(cover):
    table = as_table(cover)
    n = cover.base.num_vertices
    assert count_colorings(cover) == cover_colorings(n, cover.m, table)
    assert covers.brute_force_count(cover) == count_colorings(cover)
    for j in range(cover.m):
        assert count_colorings_containing(cover, {0: j}) == cover_colorings(n, cover.m, table, {0: j})


@settings(max_examples=100, deadline=None)
@given(small_covers())
def test_all_fiber_counts_matches_oracle(cover):
    total, per_vertex = covers.all_fiber_counts(cover)
    n = cover.base.num_vertices
    assert total == cover_colorings(n, cover.m, as_table(cover))
    for v in range(n):
        assert per_vertex[v] == covers.fiber_counts(cover, v)
        assert sum(per_vertex[v]) == total


# -- normalization -------------------------------------------------------------------------------


def test_tree_covers_normalize_to_canonical():
    rng = random.Random(3)
    p3 = graphs.path(3)
    for _ in range(20):
        c = covers.random_full_cover(p3, 3, rng)
        assert covers.normalize_by_spanning_tree(c) == canonical_cover(p3, 3)


def test_canonical_normalizes_to_itself():
    c = canonical_cover(graphs.cycle(4), 3)
    assert covers.normalize_by_spanning_tree(c) == c


def test_shift_moves_to_cotree_edge():
    c4 = graphs.cycle(4)
    c = Cover.from_edges(c4, 3, {(0, 1): (1, 2, 0)})
    tree = [(0, 1), (1, 2), (2, 3)]
    n = covers.normalize_by_spanning_tree(c, tree)
    for e in tree:
        assert n.matching(*e) == (0, 1, 2)
    assert n.matching(0, 3) != (0, 1, 2)
    assert count_colorings(n) == count_colorings(c) == 15


@settings(max_examples=80, deadline=None)
@given(small_covers(full=True))
def test_normalization_preserves_count(cover):
    g = cover.base
    if not g.is_connected():
        return
    n = covers.normalize_by_spanning_tree(cover)
    ident = tuple(range(cover.m))
    assert all(n.matching(u, v) == ident for u, v in g.bfs_tree())
    assert count_colorings(n) == count_colorings(cover)


def test_normalization_rejects_partial_cover():
    c = Cover.from_edges(graphs.path(2), 2, {(0, 1): (None, 1)})
    with pytest.raises(ValueError):
        covers.normalize_by_spanning_tree(c)


# -- enumeration --------------------------------------------------------------------------------


def test_enumeration_sizes():
    assert len(list(covers.enumerate_full_covers(graphs.cycle(4), 3))) == 6
    assert covers.TreeLabelingSpace(graphs.wheel(4), 3).search_size() == 1296
    assert len(list(covers.enumerate_full_covers(graphs.complete(3), 2))) == 2
    assert len(list(covers.enumerate_full_covers(graphs.path(3), 3))) == 1


def test_enumeration_budget():
    with pytest.raises(BudgetExceeded) as exc:
        list(covers.enumerate_full_covers(graphs.wheel(4), 4, budget=1000))
    assert exc.value.required_covers == 24**4


def test_shards_partition_the_enumeration():
    g = graphs.wheel(4)
    whole = [c.key() for c in covers.enumerate_full_covers(g, 3)]
    parts = []
    for s in range(5):
        parts.extend(c.key() for c in covers.enumerate_full_covers(g, 3, shard=s, shards=5))
    assert parts == whole and len(set(whole)) == 1296


def test_labeling_space_counts_match_backtracking():
    rng = random.Random(7)
    for g, m in ((graphs.wheel(4), 3), (graphs.bowtie(), 3), (graphs.cycle(5), 4)):
        space = TreeLabelingSpace(g, m)
        assert space.size == m * (m - 1) ** (g.num_vertices - 1)
        for _ in range(30):
            c = covers.normalize_by_spanning_tree(covers.random_full_cover(g, m, rng))
            digits = space.digits_of(c)
            assert space.cover(digits) == c
            assert space.count(digits) == count_colorings(c)


# -- cycles ------------------------------------------------------------------------------------------


def test_classify_cycle_cover():
    c4 = graphs.cycle(4)
    assert covers.classify_cycle_cover(canonical_cover(c4, 2)) == "canonical"
    twisted = Cover.from_edges(c4, 2, {(1, 2): (1, 0)})
    assert covers.classify_cycle_cover(twisted) == "twisted"
    assert count_colorings(twisted) == 0
    c6 = Cover.from_edges(graphs.cycle(6), 2, {(0, 1): (1, 0), (3, 4): (1, 0)})
    assert covers.classify_cycle_cover(c6) == "canonical"
    assert count_colorings(c6) == 2 == cover_colorings(6, 2, as_table(c6))
    partial = Cover.from_edges(c4, 2, {(0, 1): (None, 0)})
    assert covers.classify_cycle_cover(partial) == "not_full"


@pytest.mark.parametrize("n", [4, 6])
def test_two_fold_even_cycle_uncolorable_iff_twisted(n):
    for c in covers.enumerate_full_covers(graphs.cycle(n), 2):
        assert (count_colorings(c) == 0) == (covers.classify_cycle_cover(c) == "twisted")


@pytest.mark.parametrize("n", [4, 6])
def test_cross_edge_cycle(n):
    twisted = Cover.from_edges(graphs.cycle(n), 2, {(0, 1): (1, 0)})
    h = covers.cross_edge_cycle(twisted)
    assert h.is_cycle() and h.num_vertices == 2 * n
    assert h == graphs.Graph(2 * n, h.edges)


def test_cross_edge_cycle_needs_uncolorable_cover():
    with pytest.raises(ValueError):
        covers.cross_edge_cycle(canonical_cover(graphs.cycle(4), 2))


# -- cones -------------------------------------------------------------------------------------


def test_cone_reduction_examples():
    cc = ConeCover(canonical_cover(graphs.wheel(4), 4))
    red = covers.cone_reduction(cc, 0)
    assert red == canonical_cover(graphs.cycle(4), 3)
    assert count_colorings(red) == 18

    sw = constructions.shifted_wheel_cover(1, 3)
    red = covers.cone_reduction(sw, 0)
    assert red.m == 2 and count_colorings(red) == 1


def test_cone_reduction_sums_to_total():
    rng = random.Random(11)
    for g, m in ((graphs.wheel(4), 3), (graphs.wheel(5), 3), (graphs.cone_of_cycles([3, 3]), 3)):
        for _ in range(15):
            cc = ConeCover.from_cover(covers.random_full_cover(g, m, rng))
            total = sum(count_colorings(covers.cone_reduction(cc, j)) for j in range(m))
            assert total == count_colorings(cc.cover)


def test_cone_cover_requires_identity_hub():
    c = Cover.from_edges(graphs.wheel(4), 3, {(0, 1): (1, 0, 2)})
    with pytest.raises(ValueError):
        ConeCover(c)
    assert ConeCover.from_cover(c).cover.matching(0, 1) == (0, 1, 2)


def test_level_vertices():
    assert covers.level_vertices(ConeCover(canonical_cover(graphs.wheel(4), 3))) == {0, 1, 2}
    assert covers.level_vertices(constructions.shifted_wheel_cover(1, 3)) == frozenset()


def test_level_count_never_m_minus_one():
    g = graphs.wheel(4)
    sizes = {len(covers.level_vertices(ConeCover(c))) for c in covers.enumerate_full_covers(g, 3)}
    assert 2 not in sizes and sizes == {0, 1, 3}


# -- serialization -----------------------------------------------------------------------------


@settings(max_examples=80, deadline=None)
@given(small_covers())
def test_serialization_round_trip(cover):
    text = covers.format_cover(cover)
    assert covers.parse_cover(text) == cover
    assert covers.format_cover(covers.parse_cover(text)) == text


def test_parse_cover_errors():
    with pytest.raises(ParseError) as exc:
        covers.parse_cover("# cover n=2\n2\n0 1 : 1 3\n")
    assert exc.value.line == 3
    with pytest.raises(ParseError):
        covers.parse_cover("x\n")

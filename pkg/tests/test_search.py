from fractions import Fraction

import pytest

from dpcolor import covers, graphs, search
from dpcolor.errors import BudgetExceeded, FormulaDomainError
from dpcolor.graphs import Graph
from dpcolor.search import dp_closed_form, dp_exact

from oracles import dp_all_covers


# -- exhaustive search --------------------------------------------------------------------


def test_dp_examples():
    assert dp_exact(graphs.cycle(4), 3).value == 15
    assert dp_exact(graphs.wheel(4), 3).value == 3
    res = dp_exact(graphs.bowtie(), 3)
    assert res.value == 12 and res.search_size == 36


@pytest.mark.parametrize(
    "g, m",
    [
        (graphs.cycle(3), 2),
        (graphs.cycle(3), 3),
        (graphs.cycle(4), 2),
        (graphs.cycle(4), 3),
        (graphs.cycle(5), 2),
        (graphs.cycle(5), 3),
        (graphs.path(4), 3),
        (Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)]), 3),
        (Graph(5, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)]), 3),
    ],
)
def test_dp_matches_unnormalized_oracle(g, m):
    assert dp_exact(g, m).value == dp_all_covers(g.num_vertices, g.edges, m)


def test_dp_witnesses_attain_value():
    for g, m in ((graphs.wheel(4), 3), (graphs.cycle(6), 3), (graphs.bowtie(), 3)):
        res = dp_exact(g, m)
        assert res.witnesses
        for w in res.witnesses:
            assert covers.count_colorings(w) == res.value
        assert res.value <= graphs.chromatic_polynomial(g)(m)


def test_dp_result_independent_of_sharding():
    g = graphs.wheel(4)
    base = dp_exact(g, 3)
    for shards in (2, 3, 7, 50):
        res = dp_exact(g, 3, shards=shards)
        assert res.value == base.value
        assert [w.key() for w in res.witnesses] == [w.key() for w in base.witnesses]
        assert res.search_size == base.search_size


def test_dp_pool_matches_serial():
    g = graphs.wheel(4)
    a = dp_exact(g, 3, workers=2, shards=4)
    b = dp_exact(g, 3)
    assert a.value == b.value and [w.key() for w in a.witnesses] == [w.key() for w in b.witnesses]


def test_dp_budget_refusal():
    with pytest.raises(BudgetExceeded) as exc:
        dp_exact(graphs.wheel(6), 4, budget=10**6)
    assert exc.value.required_covers == 24**6


def test_dp_needs_connected_graph():
    with pytest.raises(ValueError):
        dp_exact(graphs.disjoint_union([graphs.cycle(4), graphs.complete(3)]), 3)


def test_dp_disconnected():
    assert search.dp_disconnected([6, 6]) == 36
    assert search.dp_disconnected([0, 123]) == 0
    parts = [dp_exact(graphs.cycle(4), 3), dp_exact(graphs.complete(3), 3)]
    assert search.dp_disconnected(parts) == 90
    g = graphs.disjoint_union([graphs.cycle(4), graphs.complete(3)])
    assert search.dp_value(g, 3) == 90


def test_tree_dp_equals_chromatic():
    for m in (2, 3, 4):
        assert dp_exact(graphs.path(4), m).value == m * (m - 1) ** 3


# -- closed forms ------------------------------------------------------------------------------


def test_closed_form_examples():
    assert dp_closed_form("wheel", 4, cycle_len=4) == 72
    assert dp_closed_form("unicyclic", 3, n=5, cycle_len=4) == 30
    assert dp_closed_form("gluing_cycle_chordal", 3, values=[3, 3]) == 3


@pytest.mark.parametrize("n", range(3, 9))
@pytest.mark.parametrize("m", range(2, 5))
def test_cycle_closed_form_matches_search(n, m):
    assert dp_closed_form("cycle", m, n=n) == dp_exact(graphs.cycle(n), m).value


def test_unicyclic_closed_form_matches_search():
    # a cycle with a pendant path hanging off vertex 0
    for cycle_len in (3, 4, 5):
        for extra in (1, 2):
            n = cycle_len + extra
            edges = list(graphs.cycle(cycle_len).edges)
            edges += [(cycle_len - 1 + i, cycle_len + i) if i else (0, cycle_len) for i in range(extra)]
            g = Graph(n, edges)
            for m in (2, 3):
                assert dp_closed_form("unicyclic", m, n=n, cycle_len=cycle_len) == dp_exact(g, m).value


def test_wheel_closed_form_matches_search():
    for n, ms in ((3, (3, 4)), (4, (2, 3, 4)), (5, (3, 4))):
        for m in ms:
            assert dp_closed_form("wheel", m, cycle_len=n) == dp_exact(graphs.wheel(n), m).value


def test_chordal_closed_form():
    g = Graph(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)])
    peo = graphs.perfect_elimination_ordering(g)
    for m in (3, 4):
        assert dp_closed_form("chordal", m, peo=peo) == dp_exact(g, m).value == graphs.chromatic_polynomial(g)(m)


def test_gluing_closed_form_matches_search():
    for a, b in ((3, 4), (4, 4), (4, 5)):
        g, _ = graphs.glue([graphs.cycle(a), graphs.cycle(b)], [(0,), (0,)])
        values = [dp_exact(graphs.cycle(a), 3).value, dp_exact(graphs.cycle(b), 3).value]
        assert dp_closed_form("gluing_cycle_chordal", 3, values=values) == dp_exact(g, 3).value


def test_closed_form_domain_errors():
    with pytest.raises(FormulaDomainError):
        dp_closed_form("gluing_cycle_chordal", 3, values=[3])
    with pytest.raises(FormulaDomainError):
        dp_closed_form("gluing_cycle_chordal", 3, values=[5, 1])


# -- bounds --------------------------------------------------------------------------------------


def test_seth_bound_examples():
    b = search.seth_bound(1, 4, 4)
    assert (b.p, b.p1, b.p2) == (24, 2, 3)
    assert b.min_total == 72
    assert search.seth_bound(1, 3, 0).min_total == 3
    assert search.seth_min_total(1, 3) == 3


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("m", [3, 4, 5, 6])
def test_seth_bound_divisibility(k, m):
    for s in search.valid_level_counts(m):
        b = search.seth_bound(k, m, s)
        q = (m - 2) ** (2 * k + 1)
        assert (m - 1) * b.p1 == q - (m - 2)
        assert (m - 1) * b.p2 == q + 1
        assert b.p2 >= b.p1


def test_seth_bound_rejects_m_minus_one_levels():
    with pytest.raises(FormulaDomainError):
        search.seth_bound(1, 4, 3)


def test_amalgam_upper_bound_examples():
    assert search.amalgam_upper_bound([3, 3], 3) == 3
    assert search.amalgam_upper_bound([72, 72], 4, 2) == 1296
    # 6*6*6 / 3**2; the product is divided by m**(n-1), not m**n
    assert search.amalgam_upper_bound([6, 6, 6], 3) == 24
    assert isinstance(search.amalgam_upper_bound([5, 5], 3), Fraction)


def test_three_triangles_at_a_vertex_reach_bound():
    parts = [graphs.complete(3)] * 3
    g, _ = graphs.glue(parts, [(0,)] * 3)
    assert dp_exact(g, 3).value == 24


def test_gluing_lower_bound():
    assert search.gluing_lower_bound([2, 2], 1, 3) == 12
    assert search.gluing_lower_bound([5, 5], 1, 3) == 75
    with pytest.raises(ValueError):
        search.gluing_lower_bound([1], 1, 3)
    g, _ = graphs.glue([graphs.cycle(4), graphs.cycle(4)], [(0,), (0,)])
    assert dp_exact(g, 3).value >= 75


def test_cycle_vertex_bound():
    assert search.cycle_vertex_bound(4, 3) == 5
    assert search.cycle_vertex_bound(5, 3) == 10
    assert search.cycle_vertex_bound(3, 3) == 2
    for n in range(3, 8):
        for m in (2, 3, 4):
            assert search.cycle_vertex_bound(n, m) * m == dp_exact(graphs.cycle(n), m).value


def test_technical_inequality():
    assert search.technical_inequality_check(10, 0).verdict == ">1"
    rec = search.technical_inequality_check(5, 0)
    assert rec.value == Fraction(331, 324) ** 5 and rec.verdict == ">1"
    rec = search.technical_inequality_check(5, 3)
    assert rec.value == Fraction(76, 81) ** 3 * Fraction(331, 324) ** 2
    assert rec.verdict == "<=1"
    table = search.technical_table()
    assert len(table) == sum(m - 1 for m in range(5, 31))
    with pytest.raises(FormulaDomainError):
        search.technical_inequality_check(4, 0)


# -- threshold and monotonicity ------------------------------------------------------------------


def test_threshold_wheel():
    rep = search.threshold_report(graphs.wheel(4), 4)
    assert [(r.m, r.status, r.value) for r in rep.rows] == [(3, "strictly-less", 3), (4, "equal", 72)]
    assert rep.rows[0].witness is not None
    assert rep.claimed_tau == 4 and not rep.flags


def test_threshold_k2_join_c4_uses_construction():
    rep = search.threshold_report(graphs.complete_join_cycle(2, 4), 4)
    (row,) = rep.rows
    assert row.status == "strictly-less" and row.method == "construction"
    assert row.value < 24 and covers.count_colorings(row.witness) == row.value
    assert rep.claimed_tau == 5


def test_recognize_family():
    assert search.recognize_family(graphs.cone_of_cycles([4, 4]))[1] == 5
    assert search.recognize_family(graphs.cone_of_cycles([3, 4]))[1] == 4
    assert search.recognize_family(graphs.cycle(5)) == ("cycle:5", 3)
    assert search.recognize_family(graphs.complete(4)) == ("chordal", 4)


def test_monotonicity_examples():
    (inst,) = search.monotonicity_check(graphs.complete(3), 0, (3,))
    assert inst.premise == "holds" and inst.conclusion == "holds"
    assert inst.dp_cone == inst.p_cone == 24
    (inst,) = search.monotonicity_check(graphs.cycle(4), 0, (3,))
    assert inst.premise == "fails" and inst.conclusion == "not-applicable"


def test_monotonicity_refusal_falls_back_to_sampling():
    (inst,) = search.monotonicity_check(graphs.cycle(5), 0, (3,), budget=10**6, samples=50)
    assert inst.method == "sampled" and inst.conclusion == "unverified"

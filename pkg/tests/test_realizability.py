import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from timedgraphs import data_path
from timedgraphs.graphs import GraphSemanticError, WeightedGraph, parse_weighted, satisfies
from timedgraphs.realizability import (
    NotRealizable, check_cycle, check_realizable, check_tsm_certificate, d_plus, d_tsm, fractional_relations,
    is_big, is_slowly_monotone, realization_from_certificate, residues, search_certificate,
    slowly_monotone_normalize, weakly_satisfies,
)
from timedgraphs.analysis import gen_anbm

from oracle import lp_realizable

FIG4 = parse_weighted(data_path("fig4.json").read_text())
FIG4_MOD = parse_weighted(data_path("fig4-mod.json").read_text())
FIG6 = WeightedGraph.linear(5, [(2, "<", -2, 0), (2, "<=", -1, 1), (2, "<=", 1, 3), (4, "<", -2, 2)], M=3)
FIG6_TS = tuple(Fraction(x) for x in ("0", "0.2", "3.1", "3.8", "5.2"))


@st.composite
def linear_graphs(draw, max_nodes=6, max_M=4, closed=False):
    n = draw(st.integers(1, max_nodes))
    M = draw(st.integers(1, max_M))
    cmps = ["<="] if closed else ["<", "<="]
    cons = draw(st.sets(st.tuples(st.integers(0, n - 1), st.sampled_from(cmps), st.integers(-M + 1, M - 1),
                                  st.integers(0, n - 1)), max_size=7))
    return WeightedGraph.linear(n, cons, M)


# ---------------------------------------------------------------- direct solver

def test_fig4_is_realizable():
    res = check_realizable(FIG4)
    assert res.realizable and satisfies(FIG4, res.ts) == []
    assert satisfies(FIG4, (0, Fraction(7, 2), 6, 6, Fraction(15, 2))) == []


def test_fig4_modified_has_negative_cycle():
    res = check_realizable(FIG4_MOD)
    assert not res.realizable and res.ts is None
    assert sorted(res.cycle.nodes) == [0, 1, 2, 3]
    assert check_cycle(FIG4_MOD, res.cycle)
    assert res.cycle.weight < 0 or (res.cycle.weight == 0 and res.cycle.strict)


def test_single_node():
    assert check_realizable(WeightedGraph.linear(1, [])).ts == (0,)


def test_cycle_check_rejects_fake_cycles():
    res = check_realizable(FIG4_MOD)
    assert not check_cycle(FIG4, res.cycle)
    assert not check_cycle(FIG4_MOD, type(res.cycle)(()))


def test_non_linear_orders_are_solved():
    res = check_realizable(gen_anbm(3, 2))
    assert res.realizable and satisfies(gen_anbm(3, 2), res.ts) == []
    res = check_realizable(gen_anbm(1, 2))
    assert not res.realizable and res.cycle.weight == -1


@settings(max_examples=400, deadline=None)
@given(linear_graphs())
def test_solver_matches_linear_program(g):
    res = check_realizable(g)
    assert res.realizable == lp_realizable(g.node_count, g.order_edges, g.constraint_edges)
    if res.realizable:
        assert satisfies(g, res.ts) == []
        assert all((g.node_count + 1) % Fraction(t).denominator == 0 for t in res.ts)
    else:
        assert check_cycle(g, res.cycle)


# ---------------------------------------------------------------- slowly monotone normal form

def test_fig6_gap_is_replaced():
    assert satisfies(FIG6, FIG6_TS) == [] and not is_slowly_monotone(FIG6, FIG6_TS)
    out = slowly_monotone_normalize(FIG6, FIG6_TS)
    assert satisfies(FIG6, out) == [] and is_slowly_monotone(FIG6, out)
    assert [int(t // 1) for t in out] == [0, 0, 2, 3, 4]
    # the figure's own choice also works
    assert satisfies(FIG6, tuple(Fraction(x) for x in ("0", "0.2", "2.3", "3.0", "4.4"))) == []


def test_slowly_monotone_input_is_kept():
    ts = (0, Fraction(1, 2), 2, Fraction(7, 2))
    g = WeightedGraph.linear(4, [(0, "<=", 2, 2)], M=3)
    assert slowly_monotone_normalize(g, ts) == ts


def test_two_large_gaps():
    g = WeightedGraph.linear(4, [(3, "<", -1, 0)], M=2)
    ts = (0, Fraction(5, 2), Fraction(11, 2), Fraction(37, 4))
    out = slowly_monotone_normalize(g, ts)
    assert satisfies(g, out) == [] and is_slowly_monotone(g, out)


def test_normalize_requires_a_realization():
    with pytest.raises(NotRealizable):
        slowly_monotone_normalize(FIG6, (0, 0, 0, 0, 0))


@settings(max_examples=300, deadline=None)
@given(linear_graphs(), st.lists(st.fractions(0, 20, max_denominator=7), min_size=6, max_size=6))
def test_normalize_keeps_realizations(g, raw):
    ts = tuple(itertools.accumulate(raw[:g.node_count]))
    if satisfies(g, ts):
        return
    out = slowly_monotone_normalize(g, ts)
    assert satisfies(g, out) == [] and is_slowly_monotone(g, out)


# ---------------------------------------------------------------- modular distances

def test_fig6_residue_distances():
    g = WeightedGraph.linear(5, [], M=3)
    tsm = residues((0, 0, 2, 3, 4), 3)
    assert tsm == (0, 0, 2, 0, 1)
    assert d_tsm(3, tsm, 0, 2) == 2
    assert d_plus(g, tsm, 0, 4) == 3 and is_big(g, tsm, 0, 4)
    assert d_plus(g, tsm, 4, 0) == -3
    assert all(d_plus(g, tsm, u, u) == 0 for u in range(5))
    assert not is_big(g, tsm, 0, 1)


def test_bound_one_makes_everything_zero():
    g = WeightedGraph.linear(4, [], M=1)
    tsm = (0, 0, 0, 0)
    for u in range(4):
        for v in range(u, 4):
            assert d_plus(g, tsm, u, v) == 0 and not is_big(g, tsm, u, v)


def test_is_big_needs_order():
    g = WeightedGraph.linear(3, [], M=2)
    with pytest.raises(ValueError):
        is_big(g, (0, 1, 0), 2, 0)


def test_tsm_operations_reject_non_linear_graphs():
    with pytest.raises(GraphSemanticError):
        weakly_satisfies(gen_anbm(2, 2), (0, 0, 0, 0))


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 4).flatmap(lambda M: st.tuples(st.just(M), st.lists(st.integers(0, M - 1), min_size=1,
                                                                          max_size=6))))
def test_distance_identities(arg):
    M, tsm = arg
    n = len(tsm)
    g = WeightedGraph.linear(n, [], M)
    for u in range(n):
        for v in range(u, n):
            assert d_plus(g, tsm, v, u) == -d_plus(g, tsm, u, v)
            steps = sum(d_tsm(M, tsm, w, w + 1) for w in range(u, v))
            assert d_plus(g, tsm, u, v) == min(M, steps)
            assert is_big(g, tsm, u, v) == (d_plus(g, tsm, u, v) == M)


# ---------------------------------------------------------------- weak satisfaction and fractions

def test_weak_satisfaction_examples():
    g = WeightedGraph.linear(2, [(0, "<=", 0, 1)], M=2)
    assert not weakly_satisfies(g, (0, 1))
    assert weakly_satisfies(g, (0, 0))
    assert weakly_satisfies(WeightedGraph.linear(3, [], M=2), (1, 0, 1))
    with pytest.raises(ValueError):
        weakly_satisfies(g, (0,))


def test_fractional_relation_examples():
    g = WeightedGraph.linear(2, [(0, "<", 1, 1)], M=3)
    geq, gt = fractional_relations(g, (0, 1))
    assert (0, 1) in gt and (0, 1) in geq
    geq, gt = fractional_relations(WeightedGraph.linear(2, [], M=3), (1, 1))
    assert geq == {(1, 0)} and gt == set()


def test_forced_fractional_contradiction():
    strict = WeightedGraph.linear(2, [(0, "<", 0, 1), (1, "<=", 0, 0)], M=1)
    closed = WeightedGraph.linear(2, [(0, "<=", 0, 1), (1, "<=", 0, 0)], M=1)
    assert not check_tsm_certificate(strict, (0, 0))
    assert check_tsm_certificate(closed, (0, 0))
    assert search_certificate(strict) is None and not check_realizable(strict)


@settings(max_examples=300, deadline=None)
@given(linear_graphs(max_nodes=5, max_M=3), st.data())
def test_fractional_relations_invariants(g, data):
    tsm = data.draw(st.lists(st.integers(0, g.M - 1), min_size=g.node_count, max_size=g.node_count))
    geq, gt = fractional_relations(g, tsm)
    assert gt <= geq
    if all(c == "<=" for _, c, _, _ in g.constraint_edges):
        assert check_tsm_certificate(g, tsm) == weakly_satisfies(g, tsm)


# ---------------------------------------------------------------- certificates

def test_fig4_certificates():
    cert = search_certificate(FIG4)
    assert cert is not None and check_tsm_certificate(FIG4, cert)
    assert satisfies(FIG4, realization_from_certificate(FIG4, cert)) == []
    assert search_certificate(FIG4_MOD) is None
    assert search_certificate(WeightedGraph.linear(1, [], M=2)) == (0,)


def test_realization_from_trivial_certificates():
    assert realization_from_certificate(WeightedGraph.linear(3, [], M=2), (0, 0, 0)) == (0, 0, 0)
    closed = WeightedGraph.linear(3, [(0, "<=", 1, 2), (2, "<=", -1, 0)], M=2)
    cert = search_certificate(closed)
    ts = realization_from_certificate(closed, cert)
    assert all(t.denominator == 1 for t in ts) and satisfies(closed, ts) == []


def test_invalid_certificate_is_refused():
    with pytest.raises(NotRealizable):
        realization_from_certificate(WeightedGraph.linear(2, [(0, "<=", 0, 1)], M=2), (0, 1))


def test_candidate_cap():
    with pytest.raises(ResourceWarning):
        search_certificate(FIG4_MOD, max_candidates=10)


@settings(max_examples=300, deadline=None)
@given(linear_graphs())
def test_certificate_search_matches_solver(g):
    res = check_realizable(g)
    cert = search_certificate(g)
    assert (cert is not None) == res.realizable
    if cert is not None:
        assert satisfies(g, realization_from_certificate(g, cert)) == []
        # residues of a normalized realization are a certificate too
        ts = slowly_monotone_normalize(g, res.ts)
        assert check_tsm_certificate(g, residues(ts, g.M))


@settings(max_examples=200, deadline=None)
@given(linear_graphs(closed=True))
def test_closed_graphs_need_only_weak_satisfaction(g):
    weak = any(weakly_satisfies(g, tsm) for tsm in itertools.product(range(g.M), repeat=g.node_count))
    assert weak == check_realizable(g).realizable

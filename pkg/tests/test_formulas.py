import pytest
from hypothesis import given, settings, strategies as st

from timedgraphs import data_path
from timedgraphs.graphs import LabeledGraph, WeightedGraph, weight_alphabet
from timedgraphs.formulas.realizability import (
    gen_closed_realizability, gen_mixed_realizability, named_subformulas, residue_props,
)
from timedgraphs.formulas.system import (
    SpecError, check_spec, gen_emptiness_formula, gen_modelcheck_formula, gen_run_feasibility_formula,
    gen_system_formula,
)
from timedgraphs.formulas.timing import gen_timing_interpretation
from timedgraphs.pdl import EMPTY, symbols, eval_eq, eval_path, eval_sentence, parse_sentence
from timedgraphs.pdl.semantics import apply_interpretation
from timedgraphs.realizability import check_tsm_certificate, fractional_relations, weakly_satisfies
from timedgraphs.timed import (
    Signature, build_T_graph, build_weighted_graph, enumerate_runs, feasible, parse_system, system_from_doc,
)
from timedgraphs.analysis import unlabeled


@st.composite
def residue_graphs(draw, max_nodes=5, max_M=3, closed=False):
    n = draw(st.integers(1, max_nodes))
    M = draw(st.integers(1, max_M))
    cmps = ["<="] if closed else ["<", "<="]
    cons = draw(st.sets(st.tuples(st.integers(0, n - 1), st.sampled_from(cmps), st.integers(-M + 1, M - 1),
                                  st.integers(0, n - 1)), max_size=6))
    tsm = draw(st.lists(st.integers(0, M - 1), min_size=n, max_size=n))
    return WeightedGraph.linear(n, cons, M), tuple(tsm)


def with_residues(w, tsm):
    base = w.to_labeled()
    labels = tuple(frozenset({f"p{r}"}) for r in tsm)
    return LabeledGraph(w.node_count, labels, base.edges, frozenset(residue_props(w.M)), weight_alphabet(w.M))


def steps(tsm, M, u, v):
    """Sum of modular steps along the chain 0..n-1 from u up to v."""
    return sum((tsm[k + 1] - tsm[k]) % M for k in range(u, v))


# ---------------------------------------------------------------- realizability building blocks

@settings(max_examples=150, deadline=None)
@given(residue_graphs())
def test_small_big_and_distance_relations(arg):
    w, tsm = arg
    M, n = w.M, w.node_count
    g = with_residues(w, tsm)
    parts = named_subformulas(M)
    big = {(u, v) for u in range(n) for v in range(u + 1, n)
           if any((tsm[a] - tsm[u]) % M + (tsm[b] - tsm[a]) % M >= M
                  for a in range(u + 1, v + 1) for b in range(a + 1, v + 1))}
    assert eval_path(g, parts["big"]) == big
    for (i, j), f in parts["small"].items():
        want = {(u, v) for u in range(n) for v in range(u, n)
                if tsm[u] == i and tsm[v] == j and (u, v) not in big}
        assert eval_path(g, f) == want
    for a, f in parts["distance"].items():
        want = {(u, v) for u in range(n) for v in range(u, n) if steps(tsm, M, u, v) < M and
                steps(tsm, M, u, v) == a}
        want |= {(v, u) for u in range(n) for v in range(u, n) if steps(tsm, M, u, v) < M and
                 steps(tsm, M, u, v) == -a}
        assert eval_path(g, f) == want


@settings(max_examples=150, deadline=None)
@given(residue_graphs())
def test_sentences_match_direct_residue_checks(arg):
    w, tsm = arg
    g = with_residues(w, tsm)
    parts = named_subformulas(w.M)
    assert eval_sentence(g, parts["partition"])
    assert eval_sentence(g, parts["weak"]) == weakly_satisfies(w, tsm)
    geq, gt = fractional_relations(w, tsm)
    assert eval_path(g, parts["geq_fr"]) == geq
    assert eval_path(g, parts["gt_fr"]) == gt
    assert eval_sentence(g, gen_mixed_realizability(w.M).body) == check_tsm_certificate(w, tsm)


@settings(max_examples=100, deadline=None)
@given(residue_graphs(closed=True))
def test_closed_body_is_weak_satisfaction(arg):
    w, tsm = arg
    g = with_residues(w, tsm)
    assert eval_sentence(g, gen_closed_realizability(w.M).body) == weakly_satisfies(w, tsm)
    assert eval_sentence(g, named_subformulas(w.M, mixed=False)["weak"]) == weakly_satisfies(w, tsm)
    assert "geq_fr" not in named_subformulas(w.M, mixed=False)


def test_partition_needs_exactly_one_residue():
    w = WeightedGraph.linear(2, [], M=2)
    part = named_subformulas(2)["partition"]
    base = w.to_labeled()
    for labels in [({"p0", "p1"}, {"p0"}), (set(), {"p1"})]:
        g = LabeledGraph(2, labels, base.edges, frozenset(residue_props(2)), weight_alphabet(2))
        assert not eval_sentence(g, part)


def test_bound_one_has_no_big_pairs():
    parts = named_subformulas(1)
    assert parts["big"] == EMPTY
    assert list(parts["distance"]) == [0]
    w = WeightedGraph.linear(3, [(0, "<=", 0, 2)], M=1)
    assert eval_path(with_residues(w, (0, 0, 0)), parts["distance"][0]) == {(u, v) for u in range(3) for v in range(3)}


def test_strictness_matters_only_in_the_mixed_formula():
    strict = WeightedGraph.linear(2, [(0, "<", 0, 1), (1, "<=", 0, 0)], M=1)
    closed = WeightedGraph.linear(2, [(0, "<=", 0, 1), (1, "<=", 0, 0)], M=1)
    assert eval_eq(closed.to_labeled(), gen_mixed_realizability(1))[0]
    assert eval_eq(closed.to_labeled(), gen_closed_realizability(1))[0]
    assert not eval_eq(strict.to_labeled(), gen_mixed_realizability(1))[0]


def test_bad_bound():
    with pytest.raises(ValueError):
        named_subformulas(0)


# ---------------------------------------------------------------- timing interpretation

def test_untimed_signature_interprets_every_weight_as_empty():
    sig = Signature(ds=(("d", "stack"),), props=())
    interp = gen_timing_interpretation(sig, 3, alphabet=["nop", "w(d)", "r(d)"])
    assert all(p == EMPTY for s, p in interp.edges.items() if s != "succ")
    assert len(interp.edges) == 1 + 2 * 5


def test_interpretation_errors():
    sig = Signature(clocks=("x",))
    with pytest.raises(ValueError, match="unknown"):
        gen_timing_interpretation(sig, 2, features={"teleport"})
    with pytest.raises(ValueError, match="renaming"):
        gen_timing_interpretation(sig, 2, features={"age"}, renaming=True)


def test_disabled_feature_drops_its_bounds():
    T = parse_system(data_path("stack.json").read_text())
    run = next(r for r in enumerate_runs(T, 5) if any("s>1" in l or "1<s" in l for l in r.labels))
    g = build_T_graph(run, T)
    direct = build_weighted_graph(g, T.sig, T.M).constraint_edges
    every = gen_timing_interpretation(T.sig, T.M, alphabet=T.alphabet)
    no_age = gen_timing_interpretation(T.sig, T.M, features={"diagonals", "clock-ds", "event"},
                                       alphabet=T.alphabet)
    assert apply_interpretation(g, every, M=T.M).constraint_edges == direct
    assert apply_interpretation(g, no_age, M=T.M).constraint_edges < direct


def test_interpretation_without_alphabet_is_the_same_relation():
    T = parse_system(data_path("stack_queue_events.json").read_text())
    full = gen_timing_interpretation(T.sig, T.M)
    trimmed = gen_timing_interpretation(T.sig, T.M, alphabet=T.alphabet)
    used = frozenset().union(*(symbols(p)[0] for p in full.edges.values()))
    for run in list(enumerate_runs(T, 5))[:20]:
        g = build_T_graph(run, T)
        wide = g.with_alphabets(sigma=used | T.alphabet)
        assert apply_interpretation(wide, full, M=T.M) == apply_interpretation(g, trimmed, M=T.M)


# ---------------------------------------------------------------- system formulas

def stack_system():
    return parse_system(data_path("stack.json").read_text())


def untimed_stack(finals=("q",)):
    return system_from_doc({"ds": [{"name": "s", "kind": "stack"}], "states": ["i", "q"], "initial": "i",
                            "finals": list(finals), "transitions": [
                                {"from": "i", "instr": [["nop"]], "to": "q"},
                                {"from": "q", "instr": [["write", "s"]], "to": "q"},
                                {"from": "q", "instr": [["read", "s"]], "to": "q"}]})


def shape(n, ds_edges, sym="s"):
    return LabeledGraph(n, tuple(frozenset() for _ in range(n)),
                        frozenset({(i, "succ", i + 1) for i in range(n - 1)} | {(u, sym, v) for u, v in ds_edges}),
                        frozenset(), frozenset({"succ", sym}))


def test_system_formula_accepts_run_shapes():
    T = stack_system()
    for run in enumerate_runs(T, 5):
        assert eval_eq(unlabeled(build_T_graph(run, T)), gen_system_formula(T))[0]


def test_system_formula_rejects_crossing_stack_edges():
    T = untimed_stack()
    xi = gen_system_formula(T)
    assert eval_eq(shape(5, [(1, 4), (2, 3)]), xi)[0]
    assert not eval_eq(shape(5, [(1, 3), (2, 4)]), xi)[0]
    assert not eval_eq(shape(3, [(1, 1)]), xi)[0]
    assert not eval_eq(shape(3, [(2, 1)]), xi)[0]


def test_system_without_finals_has_empty_language():
    T = untimed_stack(finals=())
    assert not eval_eq(shape(1, []), gen_system_formula(T))[0]
    assert not eval_eq(shape(3, [(1, 2)]), gen_system_formula(T))[0]


def test_emptiness_formula_sees_timing():
    doc = {"clocks": ["x"], "M": 2, "states": ["i", "q", "f"], "initial": "i", "finals": ["f"],
           "transitions": [{"from": "i", "instr": [["nop"], ["reset", "x"]], "to": "q"},
                           {"from": "q", "instr": [["guard", "x", "<", 0]], "to": "f"}]}
    T = system_from_doc(doc)
    g = shape(2, [])
    assert eval_eq(g, gen_system_formula(T))[0]
    assert not eval_eq(g, gen_emptiness_formula(T))[0]
    doc["transitions"][1]["instr"] = [["guard", "x", "<=", 0]]
    T = system_from_doc(doc)
    ok, witness = eval_eq(g, gen_emptiness_formula(T))
    assert ok and witness["at:f"] == {1}


def test_run_feasibility_formula_uses_graph_labels():
    T = stack_system()
    psi = gen_run_feasibility_formula(T)
    sigma = frozenset(T.alphabet)
    seen = set()
    for run in enumerate_runs(T, 5):
        got = eval_eq(build_T_graph(run, T).with_alphabets(sigma=sigma), psi)[0]
        assert got == bool(feasible(T, run))
        seen.add(got)
    assert seen == {True, False}


def test_spec_checks():
    T = parse_system(data_path("req_grant.json").read_text())
    spec = parse_sentence(data_path("req_grant_spec.sexp").read_text())
    check_spec(T, spec)
    for bad in ["(E (prop x:=0))", "(E (prop at:q))", "(E (ex-path (edge d) (top)))"]:
        with pytest.raises(SpecError):
            check_spec(T, parse_sentence(bad))
    with pytest.raises(SpecError):
        gen_modelcheck_formula(T, parse_sentence("(exists (a) (E (prop a)))"))


def test_trivial_spec_has_no_counterexample():
    T = parse_system(data_path("req_grant.json").read_text())
    f = gen_modelcheck_formula(T, parse_sentence("(E (top))"))
    for n in (1, 2, 3):
        assert not eval_eq(shape(n, []), f)[0]

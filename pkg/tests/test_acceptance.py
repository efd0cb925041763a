"""Acceptance criteria, one test each.  Every test prints one PASS/FAIL line
(collected again in the terminal summary) before asserting."""

import itertools
import math
import random
import time

import numpy as np

from timedgraphs import data_path
from timedgraphs.analysis import anbm_table, cross_validate, interpretation_agreement
from timedgraphs.formulas.realizability import gen_closed_realizability, gen_mixed_realizability
from timedgraphs.formulas.system import gen_emptiness_formula, gen_system_formula
from timedgraphs.graphs import WeightedGraph, parse_weighted, satisfies
from timedgraphs.pdl.ast import formula_size, intersection_width
from timedgraphs.pdl.semantics import eval_eq
from timedgraphs.realizability import (
    check_cycle, check_realizable, check_tsm_certificate, d_plus, is_big, is_slowly_monotone,
    residues, search_certificate, slowly_monotone_normalize,
    weakly_satisfies,
)
from timedgraphs.timed import Signature, build_T_graph, build_weighted_graph, run_from_instructions

from oracle import lp_realizable

# Time limits in seconds.
FIG_LIMIT = 1.0
GRID_LIMIT = 600.0
INTERP_LIMIT = 300.0
ANBM_LIMIT = 1.0
# Relative residual allowed for the polynomial size fit.
FIT_TOLERANCE = 0.05
RANDOM_INSTANCES = 500
RANDOM_SEED = 20240611


# ---------------------------------------------------------------- shared grid

def exhaustive_family(closed=False):
    """Linear graphs with n <= 4, M <= 3 and at most 3 constraint edges
    between distinct nodes."""
    comparators = ("<=",) if closed else ("<", "<=")
    for n in range(1, 5):
        for M in range(1, 4):
            edges = [(u, c, w, v) for u in range(n) for v in range(n) if u != v
                     for c in comparators for w in range(-M + 1, M)]
            for k in range(4):
                for cons in itertools.combinations(edges, k):
                    yield WeightedGraph.linear(n, cons, M)


def random_family():
    rng = random.Random(RANDOM_SEED)
    for _ in range(RANDOM_INSTANCES):
        n = rng.randint(1, 6)
        M = rng.randint(1, 4)
        cons = {(rng.randrange(n), rng.choice(("<", "<=")), rng.randint(-M + 1, M - 1), rng.randrange(n))
                for _ in range(rng.randint(0, 7))}
        yield WeightedGraph.linear(n, cons, M)


_GRID = {}


def grid_results():
    """Run the three routes over both families once; later criteria reuse it."""
    if _GRID:
        return _GRID
    start = time.perf_counter()
    rows = []
    for source, family in (("exhaustive", exhaustive_family()), ("random", random_family())):
        for g in family:
            direct = check_realizable(g)
            tsm = search_certificate(g)
            formula, _ = eval_eq(g.to_labeled(), gen_mixed_realizability(g.M))
            rows.append((source, g, direct, tsm, formula))
    _GRID["rows"] = rows
    _GRID["seconds"] = time.perf_counter() - start
    return _GRID


# ---------------------------------------------------------------- criteria

def test_criterion_01_fig4(report):
    start = time.perf_counter()
    g = parse_weighted(data_path("fig4.json").read_text())
    bad = parse_weighted(data_path("fig4-mod.json").read_text())
    ok_res = check_realizable(g)
    bad_res = check_realizable(bad)
    elapsed = time.perf_counter() - start
    cyc = bad_res.cycle
    ok = (ok_res.realizable and not satisfies(g, ok_res.ts)
          and not bad_res.realizable and check_cycle(bad, cyc)
          and sorted(cyc.nodes) == [0, 1, 2, 3] and elapsed < FIG_LIMIT)
    report(1, ok, f"fig4 realizable ts={[str(t) for t in ok_res.ts]}; modified refuted by cycle "
                  f"{list(cyc.nodes)} weight {cyc.weight} strict={cyc.strict}; {elapsed:.3f}s")
    assert ok


FIG3_EDGES = {(0, "<=", 0, 1), (1, "<=", 0, 0), (2, "<", -2, 1), (2, "<=", 1, 3), (2, "<", 6, 5),
              (3, "<=", 5, 7), (7, "<", -4, 3), (5, "<", 3, 6), (7, "<=", -2, 5)}


def fig2_run():
    sig = Signature(clocks=("x", "y"), ds=(("d", "queue"),))
    steps = [
        [["nop"], ["reset", "x"], ["reset", "y"]],
        [["write", "d"], ["guard", "x", "=", 0]],
        [["nop"], ["reset", "y"]],
        [["write", "d"], ["guard", "y", "<=", 1]],
        [["read", "d"], ["diag-dc", "d", "y", ">", 2]],
        [["nop"], ["reset", "x"]],
        [["write", "d"]],
        [["read", "d"], ["age", "d", ">", 4], ["age", "d", "<=", 5], ["guard", "x", ">=", 2]],
        [["nop"], ["diag-cc", "y", "x", "<", 6]],
        [["read", "d"], ["diag-cd", "x", "d", "<", 3]],
    ]
    return sig, run_from_instructions(sig, steps)


def test_criterion_02_fig2_to_fig3(report):
    start = time.perf_counter()
    sig, run = fig2_run()
    w = build_weighted_graph(build_T_graph(run, sig), sig, 7)
    elapsed = time.perf_counter() - start
    got = set(w.constraint_edges)
    ok = got == FIG3_EDGES and elapsed < FIG_LIMIT
    report(2, ok, f"{len(got)} constraint edges, missing {sorted(FIG3_EDGES - got)}, "
                  f"extra {sorted(got - FIG3_EDGES)}; {elapsed:.3f}s")
    assert ok


def fig9_run():
    sig = Signature(clocks=("x1", "x2", "x3", "x4"), ds=(("d1", "stack"), ("d2", "stack")))
    steps = [
        [["nop"], ["reset", "x1"], ["reset", "x2"], ["reset", "x3"], ["reset", "x4"]],
        [["write", "d1"], ["assign", "d1", "x1"], ["reset", "x2"]],
        [["read", "d1"], ["assign", "x2", "d1"], ["reset", "x1"], ["assign", "x4", "x2"]],
        [["write", "d2"], ["assign", "d2", "x2"], ["reset", "x2"], ["assign", "x3", "x4"]],
        [["read", "d2"], ["assign", "x4", "d2"], ["guard", "x3", "<", 3]],
        [["guard", "x4", "<", 4]],
    ]
    return sig, run_from_instructions(sig, steps, renaming=True)


def test_criterion_03_fig9_renaming(report):
    start = time.perf_counter()
    sig, run = fig9_run()
    w = build_weighted_graph(build_T_graph(run, sig), sig, 5)
    elapsed = time.perf_counter() - start
    expected = {(1, "<", 3, 4), (0, "<", 4, 5)}
    ok = set(w.constraint_edges) == expected and elapsed < FIG_LIMIT
    report(3, ok, f"edges {sorted(w.constraint_edges)}; {elapsed:.3f}s")
    assert ok


def test_criterion_04_three_routes_agree(report):
    grid = grid_results()
    rows = grid["rows"]
    bad = []
    lp_bad = []
    for source, g, direct, tsm, formula in rows:
        verdicts = (direct.realizable, tsm is not None, formula)
        if len(set(verdicts)) != 1:
            bad.append((g, verdicts))
        if source == "random" and lp_realizable(g.node_count, g.order_edges, g.constraint_edges) != verdicts[0]:
            lp_bad.append(g)
    n_exh = sum(1 for r in rows if r[0] == "exhaustive")
    n_real = sum(1 for r in rows if r[2].realizable)
    ok = not bad and not lp_bad and grid["seconds"] < GRID_LIMIT
    report(4, ok, f"{n_exh} exhaustive + {len(rows) - n_exh} random graphs ({n_real} realizable), "
                  f"{len(bad)} disagreements, {len(lp_bad)} LP-oracle mismatches; {grid['seconds']:.0f}s")
    assert ok, bad[:3]


def test_criterion_05_closed_graphs(report):
    start = time.perf_counter()
    bad = []
    count = 0
    for g in exhaustive_family(closed=True):
        count += 1
        direct = check_realizable(g).realizable
        formula, _ = eval_eq(g.to_labeled(), gen_closed_realizability(g.M))
        weak = any(weakly_satisfies(g, (0,) + rest)
                   for rest in itertools.product(range(g.M), repeat=g.node_count - 1))
        if not direct == formula == weak:
            bad.append((g, direct, formula, weak))
    elapsed = time.perf_counter() - start
    ok = not bad
    report(5, ok, f"{count} closed graphs, {len(bad)} disagreements among solver, closed formula "
                  f"and weak-satisfaction search; {elapsed:.0f}s")
    assert ok, bad[:3]


def test_criterion_06_normal_form_and_distances(report):
    rows = grid_results()["rows"]
    violations = []
    checked = 0
    for _, g, direct, _, _ in rows:
        if not direct.realizable:
            continue
        checked += 1
        ts = slowly_monotone_normalize(g, direct.ts)
        if satisfies(g, ts) or not is_slowly_monotone(g, ts):
            violations.append((g, "normal form"))
            continue
        tsm = residues(ts, g.M)
        if not weakly_satisfies(g, tsm) or not check_tsm_certificate(g, tsm):
            violations.append((g, "certificate"))
        order = g.chain()
        for i, u in enumerate(order):
            for v in order[i:]:
                gap = math.floor(ts[v]) - math.floor(ts[u])
                dp = d_plus(g, tsm, u, v)
                if dp != min(gap, g.M) or is_big(g, tsm, u, v) != (dp == g.M):
                    violations.append((g, u, v))
    ok = not violations
    report(6, ok, f"{checked} realizable graphs normalized, {len(violations)} violations of the "
                  f"normal form or of the distance/bigness identities")
    assert ok, violations[:3]


INTERP_SYSTEMS = ("stack", "queue", "stack_queue_events")


def test_criterion_07_interpretation_agreement(report, systems):
    start = time.perf_counter()
    counts = {}
    bad = []
    for name in INTERP_SYSTEMS:
        rows = interpretation_agreement(systems[name], 6)
        counts[name] = len(rows)
        bad += [(name, r) for r in rows if not r["agree"]]
    elapsed = time.perf_counter() - start
    ok = not bad and all(counts.values()) and elapsed < INTERP_LIMIT
    report(7, ok, f"runs up to length 6: {counts}, {len(bad)} disagreements; {elapsed:.1f}s")
    assert ok, bad[:3]


CROSSVAL_SYSTEMS = ("stack", "queue", "stack_queue_events", "req_grant", "message_preservation",
                    "fig9_renaming", "fig2_queue")
MIN_MUTANTS = 30


def test_criterion_08_cross_validation(report, systems):
    start = time.perf_counter()
    discrepancies = 0
    rejected = total = 0
    per_system = {}
    for name in CROSSVAL_SYSTEMS:
        rep = cross_validate(systems[name], 6, name)
        r, t = rep.mutants_rejected
        rejected += r
        total += t
        discrepancies += len(rep.discrepancies)
        runs = sum(1 for x in rep.records if x["kind"] == "run")
        per_system[name] = f"{runs} runs, {r}/{t} mutants"
    elapsed = time.perf_counter() - start
    ok = discrepancies == 0 and total >= MIN_MUTANTS and rejected == total
    report(8, ok, f"L=6: {discrepancies} discrepancies, {rejected}/{total} mutants rejected "
                  f"({'; '.join(f'{k}: {v}' for k, v in per_system.items())}); {elapsed:.1f}s")
    assert ok


def test_criterion_09_anbm_family(report):
    start = time.perf_counter()
    rows = anbm_table(6)
    elapsed = time.perf_counter() - start
    agree = sum(r["agree"] for r in rows)
    ok = agree == len(rows) == 36 and elapsed < ANBM_LIMIT
    report(9, ok, f"{agree}/{len(rows)} verdicts equal n >= m; {elapsed:.3f}s")
    assert ok


def test_criterion_10_intersection_width(report, systems):
    widths = {}
    for M in range(1, 6):
        widths[f"mixed M={M}"] = (intersection_width(gen_mixed_realizability(M)), 2)
        widths[f"closed M={M}"] = (intersection_width(gen_closed_realizability(M)), 1)
    for name, T in systems.items():
        widths[f"emptiness {name}"] = (intersection_width(gen_emptiness_formula(T)), 2)
        widths[f"system {name}"] = (intersection_width(gen_system_formula(T)), 1)
    wrong = {k: v for k, v in widths.items() if v[0] != v[1]}
    ok = not wrong
    report(10, ok, f"{len(widths)} formulas: mixed/emptiness width 2, closed/system width 1; "
                   f"mismatches {wrong}")
    assert ok


def _fit(ms, sizes, degree):
    coeffs = np.polyfit(ms, sizes, degree)
    pred = np.polyval(coeffs, ms)
    return float(np.max(np.abs(pred - sizes) / sizes))


def test_criterion_11_polynomial_size(report):
    ms = np.arange(1, 9, dtype=float)
    dag = np.array([formula_size(gen_mixed_realizability(int(M))) for M in ms], dtype=float)
    tree = np.array([formula_size(gen_mixed_realizability(int(M)), shared=False) for M in ms], dtype=float)
    resid = _fit(ms, dag, 4)
    # local growth exponent between the last two sizes; an exponential
    # would keep increasing it with M
    exponent = math.log(dag[-1] / dag[-2]) / math.log(8 / 7)
    tree_exponent = math.log(tree[-1] / tree[-2]) / math.log(8 / 7)
    ok = resid < FIT_TOLERANCE and exponent <= 4
    report(11, ok, f"shared sizes {dag.astype(int).tolist()}, degree-4 fit relative residual "
                   f"{resid:.4f}, local exponent {exponent:.2f}; unshared tree sizes "
                   f"{tree.astype(int).tolist()} (local exponent {tree_exponent:.2f})")
    assert ok

"""Bounded analyses of timed systems and formula/semantics cross-checks."""

from __future__ import annotations

from dataclasses import dataclass, field

from .graphs import LabeledGraph, WeightedGraph, project
from .pdl.semantics import apply_interpretation, eval_eq, eval_sentence
from .formulas.system import (
    STATE_PREFIX, check_spec, gen_emptiness_formula, gen_run_feasibility_formula, gen_system_formula,
    instruction_alphabet,
    state_props, system_matrix,
)
from .formulas.timing import gen_timing_interpretation
from .realizability import check_realizable
from .timed.constraints import build_weighted_graph, check_run_timing, feasible
from .timed.system import Run, TimedSystem, build_T_graph, enumerate_runs, validate_run


class BoundExceeded(RuntimeError):
    pass


@dataclass
class BoundedVerdict:
    """Outcome of a bounded search.  ``found`` is False only up to ``bound``."""

    found: bool
    bound: int
    checked: int
    run: Run | None = None
    ts: tuple | None = None
    graph: LabeledGraph | None = None

    def to_doc(self) -> dict:
        doc = {"found": self.found, "bound": self.bound, "runs_checked": self.checked}
        if self.run is not None:
            doc["run"] = [sorted(l) for l in self.run.labels]
            doc["states"] = list(self.run.states or ())
            doc["ts"] = [str(t) for t in self.ts]
        return doc


def _runs(T, L, max_runs):
    if L < 1:
        raise ValueError("bound must be at least 1")
    count = 0
    for run in enumerate_runs(T, L):
        count += 1
        if max_runs is not None and count > max_runs:
            raise BoundExceeded(f"more than {max_runs} runs up to length {L}")
        yield run


def _verified_ts(T, run):
    res = feasible(T, run)
    if not res:
        return None
    problems = check_run_timing(T.sig, run, res.ts)
    if problems:
        raise AssertionError(f"timestamps fail the direct timing check: {problems[0]}")
    return res.ts


def check_emptiness_bounded(T: TimedSystem, L: int, max_runs: int | None = None) -> BoundedVerdict:
    """First feasible accepted run of length at most L, if any."""
    checked = 0
    for run in _runs(T, L, max_runs):
        checked += 1
        ts = _verified_ts(T, run)
        if ts is not None:
            return BoundedVerdict(True, L, checked, run, ts, build_T_graph(run, T))
    return BoundedVerdict(False, L, checked)


def model_check_bounded(T: TimedSystem, spec, L: int, max_runs: int | None = None) -> BoundedVerdict:
    """First feasible run whose propositions violate ``spec``, if any."""
    check_spec(T, spec)
    checked = 0
    for run in _runs(T, L, max_runs):
        checked += 1
        g = project(build_T_graph(run, T), T.sig.props).with_alphabets(sigma=frozenset(T.sig.props))
        if eval_sentence(g, spec):
            continue
        ts = _verified_ts(T, run)
        if ts is not None:
            return BoundedVerdict(True, L, checked, run, ts, g)
    return BoundedVerdict(False, L, checked)


# ---------------------------------------------------------------- cross validation

def unlabeled(g: LabeledGraph) -> LabeledGraph:
    """Shape of a run graph: labels dropped, edges kept."""
    return LabeledGraph(g.node_count, tuple(frozenset() for _ in range(g.node_count)), g.edges,
                        frozenset(), g.gamma)


def _key(g: LabeledGraph):
    return g.node_count, g.edges


def edge_mutants(g: LabeledGraph, ds_names) -> list[tuple[str, LabeledGraph]]:
    """Graphs obtained by deleting, retargeting or reversing one
    data-structure edge, or by exchanging the targets of two."""
    out = []
    ds = sorted(e for e in g.edges if e[1] in ds_names)
    rest = g.edges - set(ds)
    n = g.node_count

    def make(edges):
        return LabeledGraph(n, g.labels, frozenset(edges), g.sigma, g.gamma)

    for k, (u, d, v) in enumerate(ds):
        others = set(ds) - {(u, d, v)}
        out.append((f"delete {u}-{d}->{v}", make(rest | others)))
        out.append((f"reverse {u}-{d}->{v}", make(rest | others | {(v, d, u)})))
        for w in range(n):
            if w not in (u, v) and (u, d, w) not in others:
                out.append((f"retarget {u}-{d}->{v} to {w}", make(rest | others | {(u, d, w)})))
        for u2, d2, v2 in ds[k + 1:]:
            if d2 == d:
                swapped = others - {(u2, d2, v2)} | {(u, d, v2), (u2, d, v)}
                out.append((f"swap targets of {u}->{v} and {u2}->{v2}", make(rest | swapped)))
    return out


def state_mutants(T: TimedSystem, run: Run) -> list[tuple[str, LabeledGraph, bool]]:
    """Fully labeled run graphs with one position's state changed.

    Each entry carries whether the changed state sequence is still an
    accepting path for the same labels (then it is no corruption)."""
    g = build_T_graph(run, T)
    sigma = frozenset(instruction_alphabet(T)) | frozenset(state_props(T))
    out = []
    for i in range(len(run)):
        for q in T.states:
            if q == run.states[i]:
                continue
            states = run.states[:i] + (q,) + run.states[i + 1:]
            labels = tuple(l | {STATE_PREFIX + s} for l, s in zip(run.labels, states))
            still_valid = not validate_run(T, Run(run.labels, states))
            out.append((f"state {i} := {q}", LabeledGraph(g.node_count, labels, g.edges, sigma, g.gamma),
                        still_valid))
    return out


@dataclass
class Report:
    system: str
    bound: int
    records: list = field(default_factory=list)

    @property
    def discrepancies(self) -> list:
        return [r for r in self.records if not r["agree"]]

    @property
    def mutants_rejected(self) -> tuple[int, int]:
        muts = [r for r in self.records if r["kind"].startswith("mutant") and not r["semantic"]]
        return sum(1 for r in muts if not r["formula"]), len(muts)


def cross_validate(T: TimedSystem, L: int, name: str = "system", mutants: bool = True,
                   max_runs: int | None = None, max_steps: int | None = None) -> Report:
    """Compare the emptiness formula with run enumeration on every run shape
    up to length L, and check that corrupted shapes are rejected."""
    psi = gen_emptiness_formula(T)
    xi = gen_system_formula(T)
    matrix = system_matrix(T)
    shapes = {}      # shape key -> (graph, feasible?, first run)
    runs = []
    for run in _runs(T, L, max_runs):
        ok = bool(feasible(T, run))
        runs.append((run, ok))
        g = unlabeled(build_T_graph(run, T))
        key = _key(g)
        if key in shapes:
            g0, f0, r0 = shapes[key]
            shapes[key] = (g0, f0 or ok, r0)
        else:
            shapes[key] = (g, ok, run)
    report = Report(name, L)
    per_run = gen_run_feasibility_formula(T)
    sigma = frozenset(instruction_alphabet(T))
    for r_idx, (run, sem) in enumerate(runs):
        g = build_T_graph(run, T).with_alphabets(sigma=sigma)
        got, _ = eval_eq(g, per_run, max_steps)
        report.records.append({"id": f"{name}/run{r_idx}", "kind": "run", "nodes": g.node_count,
                               "semantic": sem, "formula": got, "agree": got == sem})
    for idx, (key, (g, sem, run)) in enumerate(shapes.items()):
        got, wit = eval_eq(g, psi, max_steps)
        in_lang, _ = eval_eq(g, xi, max_steps)
        rec = {"id": f"{name}/shape{idx}", "kind": "run-shape", "nodes": g.node_count,
               "semantic": sem, "formula": got, "system_formula": in_lang,
               "agree": got == sem and in_lang}
        report.records.append(rec)
    if not mutants:
        return report
    seen = set(shapes)
    for idx, (key, (g, sem, run)) in enumerate(shapes.items()):
        for desc, m in edge_mutants(g, set(T.sig.ds_names)):
            k = _key(m)
            if k in seen:
                continue
            seen.add(k)
            # every run shape with at most L nodes was enumerated above
            got, _ = eval_eq(m, psi, max_steps)
            in_lang, _ = eval_eq(m, xi, max_steps)
            report.records.append({"id": f"{name}/shape{idx}/{desc}", "kind": "mutant-edge",
                                   "nodes": m.node_count, "semantic": False, "formula": got,
                                   "system_formula": in_lang, "agree": not got and not in_lang})
    for r_idx, (run, _) in enumerate(runs):
        for desc, m, valid in state_mutants(T, run):
            got = eval_sentence(m, matrix)
            report.records.append({"id": f"{name}/run{r_idx}/{desc}", "kind": "mutant-state",
                                   "nodes": m.node_count, "semantic": valid, "formula": got,
                                   "agree": got == valid})
    return report


# ---------------------------------------------------------------- a^n b^m family

def gen_anbm(n: int, m: int) -> WeightedGraph:
    """Two chains a_1..a_n (forward, steps at most 1) and b_1..b_m (ordered
    backwards, steps at least 1), glued by zero-weight edges a_n -> b_1 and
    b_m -> a_1.  Realizable iff n >= m."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    a = list(range(n))
    b = list(range(n, n + m))
    order = {(a[i], a[i + 1]) for i in range(n - 1)} | {(b[j + 1], b[j]) for j in range(m - 1)}
    cons = {(a[i], "<=", 1, a[i + 1]) for i in range(n - 1)}
    cons |= {(b[j], "<=", -1, b[j + 1]) for j in range(m - 1)}
    cons |= {(a[-1], "<=", 0, b[0]), (b[-1], "<=", 0, a[0])}
    return WeightedGraph(n + m, 2, frozenset(order), frozenset(cons))


def anbm_table(max_n: int) -> list[dict]:
    rows = []
    for n in range(1, max_n + 1):
        for m in range(1, max_n + 1):
            res = check_realizable(gen_anbm(n, m))
            rows.append({"n": n, "m": m, "realizable": res.realizable, "expected": n >= m,
                         "agree": res.realizable == (n >= m)})
    return rows


# ---------------------------------------------------------------- interpretation check

def interpretation_agreement(T: TimedSystem, L: int, max_runs: int | None = None) -> list[dict]:
    """For every run up to length L, compare the weighted graph built from
    the run's bounds with the one obtained through the timing interpretation."""
    interp = gen_timing_interpretation(T.sig, T.M, alphabet=instruction_alphabet(T), renaming=T.renaming)
    out = []
    for k, run in enumerate(_runs(T, L, max_runs)):
        g = build_T_graph(run, T)
        direct = build_weighted_graph(g, T.sig, T.M)
        logical = apply_interpretation(g, interp, M=T.M)
        out.append({"run": k, "nodes": len(run), "direct": sorted(direct.constraint_edges),
                    "interpreted": sorted(logical.constraint_edges),
                    "agree": direct == logical})
    return out

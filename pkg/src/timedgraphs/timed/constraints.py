"""Timing constraints of runs as weighted graphs.

Every clock value, data-structure age and event distance occurring in a
run equals ``ts(end) - ts(start)`` for two positions of the run.  The
start of a clock value is the position of the reset it descends from
(following assignments and values passed through data structures); the
start of a freshly written value is its write position.  Each bound then
becomes one weighted edge.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..graphs import SUCC, LabeledGraph, WeightedGraph
from ..realizability import check_realizable
from .instructions import Assign, Bound, Read, Reset, Signature, Write, parse_label
from .system import Run, TimedSystem, build_T_graph


class TimingError(ValueError):
    pass


@dataclass(frozen=True)
class Provenance:
    edge: tuple
    position: int
    label: str


def _atoms(sig, labels):
    return [parse_label(sig, l) for l in labels]


def _ds_edges(g: LabeledGraph, sig: Signature) -> dict:
    """read position -> (write position, data structure)"""
    out = {}
    for u, s, v in g.edges:
        if s != SUCC and s in sig.ds_names:
            out[v] = (u, s)
    return out


def value_origins(g: LabeledGraph, sig: Signature):
    """Forward simulation of where values come from.

    Returns ``(clock_in, read_origin)``: ``clock_in[i][x]`` is the reset
    position the value of ``x`` on entering position ``i`` descends from
    (``None`` if never reset) and ``read_origin[i]`` is the start position
    of the value read at ``i``.
    """
    order = g.chain()
    src = _ds_edges(g, sig)
    cur = {x: None for x in sig.clocks}
    stored = {}
    clock_in = [None] * g.node_count
    read_origin = {}
    for i in order:
        atoms = _atoms(sig, g.labels[i])
        clock_in[i] = dict(cur)
        for a in atoms:
            if isinstance(a, Write):
                srcs = [b.src for b in atoms if isinstance(b, Assign) and b.dst == a.ds]
                stored[i] = cur[srcs[0]] if srcs else i
        read_val = None
        for a in atoms:
            if isinstance(a, Read):
                if i not in src:
                    raise TimingError(f"position {i} reads {a.ds} without a matching write")
                j, _ = src[i]
                read_val = stored[j]
                read_origin[i] = read_val
        new = dict(cur)
        for a in atoms:
            if isinstance(a, Reset):
                new[a.clock] = i
            elif isinstance(a, Assign) and a.dst in sig.clocks:
                new[a.dst] = cur[a.src] if a.src in sig.clocks else read_val
        cur = new
    return clock_in, read_origin


def constraint_edges(g: LabeledGraph, sig: Signature) -> list[Provenance]:
    """Weighted edges implied by the bounds of a run graph, with their source."""
    order = g.chain()
    clock_in, read_origin = value_origins(g, sig)
    events = {}
    for pos, i in enumerate(order):
        for l in g.labels[i]:
            events.setdefault(l, []).append(pos)
    out = []
    for pos, i in enumerate(order):
        for label in sorted(g.labels[i]):
            a = parse_label(sig, label)
            if not isinstance(a, Bound):
                continue
            t = a.term

            def origin(name):
                if name in sig.clocks:
                    o = clock_in[i][name]
                    if o is None:
                        raise TimingError(f"position {i}: clock {name} is used before any reset")
                    return o
                if i not in read_origin:
                    raise TimingError(f"position {i}: {name} is used without a read")
                return read_origin[i]

            if t[0] in ("clock", "age"):
                start, end = origin(t[1]), i
            elif t[0] == "diff":
                start, end = origin(t[1]), origin(t[2])
            else:
                later = [p for p in events.get(t[1], []) if p > pos]
                if not later:
                    # no future event: the bound cannot hold
                    out.append(Provenance((i, "<", 0, i), i, label))
                    continue
                start, end = i, order[later[0]]
            if a.upper:
                e = (start, a.cmp, a.const, end)
            else:
                e = (end, a.cmp, -a.const, start)
            out.append(Provenance(e, i, label))
    return out


def build_weighted_graph(g: LabeledGraph, sig: Signature, M: int | None = None) -> WeightedGraph:
    """Weighted graph on the positions of a run graph: successor order plus
    one constraint per bound."""
    cons = frozenset(p.edge for p in constraint_edges(g, sig))
    if M is None:
        M = 1 + max((abs(w) for _, _, w, _ in cons), default=0)
    order = frozenset((u, v) for u, s, v in g.edges if s == SUCC)
    return WeightedGraph(g.node_count, M, order, cons)


def run_weighted_graph(T: TimedSystem, run: Run) -> WeightedGraph:
    return build_weighted_graph(build_T_graph(run, T), T.sig, T.M)


def feasible(T: TimedSystem, run: Run):
    """Realizability result of the timing constraints of ``run``."""
    return check_realizable(run_weighted_graph(T, run))


# ---------------------------------------------------------------- origin tracking

def _clock_steps(sig: Signature, g: LabeledGraph, i: int, x: str, dst_of_read: dict):
    """Positions/clocks the value held by ``x`` on entering ``i`` moves to."""
    n = g.node_count
    atoms = _atoms(sig, g.labels[i])
    out = []
    overwritten = any((isinstance(a, Reset) and a.clock == x) or (isinstance(a, Assign) and a.dst == x)
                      for a in atoms)
    for a in atoms:
        if isinstance(a, Assign) and a.src == x and a.dst in sig.clocks and i + 1 < n:
            out.append((i + 1, a.dst))
        if isinstance(a, Assign) and a.src == x and a.dst in sig.ds_names and i in dst_of_read:
            r = dst_of_read[i]
            for b in _atoms(sig, g.labels[r]):
                if isinstance(b, Assign) and b.src == a.dst and r + 1 < n:
                    out.append((r + 1, b.dst))
    if not overwritten and i + 1 < n:
        out.append((i + 1, x))
    return out


def track_origin(g: LabeledGraph, sig: Signature, u: int, x: str, v: int, y: str) -> bool:
    """Whether the value held by clock ``x`` on entering ``u`` is the value
    held by clock ``y`` on entering ``v``.

    Values move along assignments ``y:=x``, through a data structure via
    ``d:=x`` at a write and ``y:=d`` at the matching read, and stay put
    when a clock is not overwritten.
    """
    dst_of_read = {a: b for a, s, b in g.edges if s in sig.ds_names}
    seen = {(u, x)}
    stack = [(u, x)]
    while stack:
        i, c = stack.pop()
        if (i, c) == (v, y):
            return True
        for nxt in _clock_steps(sig, g, i, c, dst_of_read):
            if nxt not in seen and nxt[0] <= v:
                seen.add(nxt)
                stack.append(nxt)
    return False


def origin_of(g: LabeledGraph, sig: Signature, v: int, y: str):
    """(position, clock) of the reset the value of ``y`` at ``v`` descends from."""
    for u in range(v - 1, -1, -1):
        for a in _atoms(sig, g.labels[u]):
            if isinstance(a, Reset) and track_origin(g, sig, u + 1, a.clock, v, y):
                return u, a.clock
    return None


def last_reset(g: LabeledGraph, x: str, v: int):
    """Last position strictly before ``v`` resetting ``x``."""
    for u in range(v - 1, -1, -1):
        if f"{x}:=0" in g.labels[u]:
            return u
    return None


# ---------------------------------------------------------------- numeric check

def check_run_timing(sig: Signature, run: Run, ts: Sequence) -> list[str]:
    """Violations of the timing bounds of ``run`` under timestamps ``ts``.

    This simulates clock values and stored data-structure values directly
    and does not use run graphs or weighted graphs.
    """
    problems = []
    n = len(run)
    if len(ts) != n:
        return [f"expected {n} timestamps, got {len(ts)}"]
    ts = [Fraction(t) for t in ts]
    if n and ts[0] < 0:
        problems.append("negative first timestamp")
    value = {x: None for x in sig.clocks}
    content = {d: [] for d in sig.ds_names}
    for i in range(n):
        if i and ts[i] < ts[i - 1]:
            problems.append(f"time decreases at position {i}")
        if i:
            for x in value:
                if value[x] is not None:
                    value[x] += ts[i] - ts[i - 1]
        atoms = _atoms(sig, run.labels[i])
        read_val = None
        for a in atoms:
            if isinstance(a, Read):
                q = content[a.ds]
                if not q:
                    problems.append(f"position {i}: read from empty {a.ds}")
                    continue
                wt, base = q.pop() if sig.ds_kind(a.ds) == "stack" else q.pop(0)
                read_val = base + (ts[i] - wt)

        def val(name):
            if name in sig.clocks:
                return value[name]
            return read_val

        for a in atoms:
            if not isinstance(a, Bound):
                continue
            t = a.term
            if t[0] in ("clock", "age"):
                x = val(t[1])
            elif t[0] == "diff":
                p, q = val(t[1]), val(t[2])
                x = None if p is None or q is None else p - q
            else:
                later = [j for j in range(i + 1, n) if t[1] in run.labels[j]]
                x = ts[later[0]] - ts[i] if later else None
            if x is None:
                problems.append(f"position {i}: {a.label} refers to an undefined value")
                continue
            if a.upper:
                ok = x < a.const if a.cmp == "<" else x <= a.const
            else:
                ok = a.const < x if a.cmp == "<" else a.const <= x
            if not ok:
                problems.append(f"position {i}: {a.label} fails with value {x}")
        for a in atoms:
            if isinstance(a, Write):
                srcs = [b.src for b in atoms if isinstance(b, Assign) and b.dst == a.ds]
                base = value[srcs[0]] if srcs else Fraction(0)
                if base is None:
                    problems.append(f"position {i}: stores an undefined clock")
                    base = Fraction(0)
                content[a.ds].append((ts[i], base))
        new = dict(value)
        for a in atoms:
            if isinstance(a, Reset):
                new[a.clock] = Fraction(0)
            elif isinstance(a, Assign) and a.dst in sig.clocks:
                new[a.dst] = value[a.src] if a.src in sig.clocks else read_val
        value = new
    return problems

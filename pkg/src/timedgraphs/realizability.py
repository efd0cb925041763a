"""Realizability of weighted graphs by timestamps.

Two independent routes are provided.  The direct route solves the
difference constraints with Bellman-Ford over lexicographic weights
(integer part, number of strict edges) and returns either an exact rational
realization or a cycle that cannot be satisfied.  The modular route works
with timestamps modulo M (residues) and decides realizability through the
fractional-order certificate, from which a realization is rebuilt.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .graphs import WeightedGraph, satisfies


class NotRealizable(ValueError):
    pass


# ---------------------------------------------------------------- direct route

@dataclass(frozen=True)
class Step:
    """One traversal step of a constraint cycle.

    ``kind`` is ``"constraint"`` for ``ts(dst) - ts(src) cmp weight`` or
    ``"order"`` for an order edge ``dst <= src`` walked backwards
    (meaning ``ts(dst) - ts(src) <= 0``).
    """

    kind: str
    src: int
    dst: int
    cmp: str
    weight: int


@dataclass(frozen=True)
class NegativeCycle:
    steps: tuple

    @property
    def nodes(self) -> tuple:
        return tuple(s.src for s in self.steps)

    @property
    def weight(self) -> int:
        return sum(s.weight for s in self.steps)

    @property
    def strict(self) -> bool:
        return any(s.cmp == "<" for s in self.steps)

    def is_contradictory(self) -> bool:
        return self.weight < 0 or (self.weight == 0 and self.strict)

    def to_doc(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "weight": self.weight,
            "strict": self.strict,
            "steps": [[s.kind, s.src, s.cmp, s.weight, s.dst] for s in self.steps],
        }


@dataclass(frozen=True)
class RealizabilityResult:
    realizable: bool
    ts: tuple | None = None
    cycle: NegativeCycle | None = None

    def __bool__(self):
        return self.realizable


def _difference_edges(g: WeightedGraph) -> list[Step]:
    steps = []
    for u, c, w, v in sorted(g.constraint_edges):
        steps.append(Step("constraint", u, v, c, w))
    for u, v in sorted(g.order_edges):
        steps.append(Step("order", v, u, "<=", 0))
    return steps


def check_cycle(g: WeightedGraph, cycle: NegativeCycle) -> bool:
    """True iff ``cycle`` is a closed walk over edges of ``g`` that no
    timestamp assignment can satisfy."""
    if not cycle.steps:
        return False
    available = set(_difference_edges(g))
    for a, b in zip(cycle.steps, cycle.steps[1:] + cycle.steps[:1]):
        if a not in available or a.dst != b.src:
            return False
    return cycle.is_contradictory()


def check_realizable(g: WeightedGraph) -> RealizabilityResult:
    """Decide realizability by shortest paths.

    Strict edges get an infinitesimal extra weight ``-eps``.  Potentials are
    pairs (a, b) compared lexicographically, standing for ``a + b*eps``.  A
    shortest path uses at most n-1 edges so ``eps = 1/(n+1)`` is small enough
    to turn potentials into exact rational timestamps.
    """
    n = g.node_count
    if n == 0:
        return RealizabilityResult(True, ())
    steps = _difference_edges(g)
    dist = [(0, 0)] * n
    pred: list[Step | None] = [None] * n
    last = -1
    for _ in range(n):
        last = -1
        for s in steps:
            a, b = dist[s.src]
            cand = (a + s.weight, b - (1 if s.cmp == "<" else 0))
            if cand < dist[s.dst]:
                dist[s.dst] = cand
                pred[s.dst] = s
                last = s.dst
        if last < 0:
            break
    if last >= 0:
        v = last
        for _ in range(n):
            v = pred[v].src
        cyc = []
        u = v
        while True:
            s = pred[u]
            cyc.append(s)
            u = s.src
            if u == v:
                break
        cyc.reverse()
        return RealizabilityResult(False, cycle=NegativeCycle(tuple(cyc)))
    eps = Fraction(1, n + 1)
    ts = [a + b * eps for a, b in dist]
    low = min(ts)
    ts = tuple(t - low for t in ts)
    if satisfies(g, ts):
        raise AssertionError("shortest-path potentials do not realize the graph")
    return RealizabilityResult(True, ts)


# ---------------------------------------------------------------- slowly monotone form

def _floor(x) -> int:
    return math.floor(x)


def is_slowly_monotone(g: WeightedGraph, ts: Sequence) -> bool:
    order = g.chain()
    return all(_floor(ts[b]) - _floor(ts[a]) < g.M for a, b in zip(order, order[1:]))


def slowly_monotone_normalize(g: WeightedGraph, ts: Sequence) -> tuple:
    """Realization of a linear graph whose integer parts grow by less than M
    per step, obtained by moving every suffix after a large gap down to
    just above ``M - 1`` past the gap's start."""
    if satisfies(g, ts):
        raise NotRealizable("the given timestamps do not realize the graph")
    order = g.chain()
    M = g.M
    vals = [Fraction(ts[u]) for u in order]
    for i in range(len(vals) - 1):
        a, b = vals[i], vals[i + 1]
        if _floor(b) - _floor(a) < M:
            continue
        fa = a - _floor(a)
        fb = b - _floor(b)
        base = _floor(a) + M - 1
        t = base + fb if fb > fa else base + (fa + 1) / 2
        shift = t - b
        for j in range(i + 1, len(vals)):
            vals[j] += shift
    out = [Fraction(0)] * len(vals)
    for pos, u in enumerate(order):
        out[u] = vals[pos]
    out = tuple(out)
    if satisfies(g, out) or not is_slowly_monotone(g, out):
        raise AssertionError("normalization broke the realization")
    return out


# ---------------------------------------------------------------- residues

def residues(ts: Sequence, M: int) -> tuple:
    """Integer parts of the timestamps modulo M."""
    return tuple(_floor(t) % M for t in ts)


class _Chain:
    """Prefix sums of modular steps along the order chain."""

    def __init__(self, g: WeightedGraph, tsm: Sequence):
        if len(tsm) != g.node_count:
            raise ValueError(f"expected {g.node_count} residues, got {len(tsm)}")
        M = g.M
        self.M = M
        self.order = g.chain()
        self.pos = {u: i for i, u in enumerate(self.order)}
        self.tsm = tuple(int(r) % M for r in tsm)
        prefix = [0]
        for a, b in zip(self.order, self.order[1:]):
            prefix.append(prefix[-1] + (self.tsm[b] - self.tsm[a]) % M)
        self.prefix = prefix

    def d(self, u, v) -> int:
        return (self.tsm[v] - self.tsm[u]) % self.M

    def d_plus(self, u, v) -> int:
        i, j = self.pos[u], self.pos[v]
        if i <= j:
            return min(self.M, self.prefix[j] - self.prefix[i])
        return -min(self.M, self.prefix[i] - self.prefix[j])

    def big(self, u, v) -> bool:
        """Some u <= w1 < w2 <= v has d(u, w1) + d(w1, w2) >= M."""
        i, j = self.pos[u], self.pos[v]
        span = self.order[i:j + 1]
        for a in range(len(span)):
            for b in range(a + 1, len(span)):
                if self.d(u, span[a]) + self.d(span[a], span[b]) >= self.M:
                    return True
        return False


def d_tsm(M: int, tsm: Sequence, u: int, v: int) -> int:
    return (tsm[v] - tsm[u]) % M


def d_plus(g: WeightedGraph, tsm: Sequence, u: int, v: int) -> int:
    """Capped forward distance along the chain; negated when v precedes u."""
    return _Chain(g, tsm).d_plus(u, v)


def is_big(g: WeightedGraph, tsm: Sequence, u: int, v: int) -> bool:
    c = _Chain(g, tsm)
    if c.pos[u] > c.pos[v]:
        raise ValueError("is_big expects u to precede v")
    return c.big(u, v)


def _weak_by_cases(c: _Chain, g: WeightedGraph) -> bool:
    for u, _, w, v in g.constraint_edges:
        if c.pos[u] <= c.pos[v]:
            if not c.big(u, v) and c.d(u, v) > w:
                return False
            if c.big(u, v):
                return False
        else:
            if not c.big(v, u) and c.d(v, u) < -w:
                return False
    return True


def _weak_by_distance(c: _Chain, g: WeightedGraph) -> bool:
    return all(c.d_plus(u, v) <= w for u, _, w, v in g.constraint_edges)


def weakly_satisfies(g: WeightedGraph, tsm: Sequence) -> bool:
    """Whether the residues respect every constraint up to fractional parts."""
    c = _Chain(g, tsm)
    a = _weak_by_cases(c, g)
    b = _weak_by_distance(c, g)
    if a != b:
        raise AssertionError("weak satisfaction checks disagree")
    return a


def _fr_by_cases(c: _Chain, g: WeightedGraph):
    geq, gt = set(), set()
    for u, cmp, w, v in g.constraint_edges:
        if c.pos[u] <= c.pos[v]:
            hit = not c.big(u, v) and c.d(u, v) == w
        else:
            hit = not c.big(v, u) and c.d(v, u) == -w
        if hit:
            geq.add((u, v))
            if cmp == "<":
                gt.add((u, v))
    for a, b in zip(c.order, c.order[1:]):
        if c.d(b, a) == 0:
            geq.add((b, a))
    return geq, gt


def _fr_by_distance(c: _Chain, g: WeightedGraph):
    geq, gt = set(), set()
    for u, cmp, w, v in g.constraint_edges:
        if c.d_plus(u, v) == w:
            geq.add((u, v))
            if cmp == "<":
                gt.add((u, v))
    for a, b in zip(c.order, c.order[1:]):
        if c.d_plus(b, a) == 0:
            geq.add((b, a))
    return geq, gt


def fractional_relations(g: WeightedGraph, tsm: Sequence):
    """Pairs (a, b) forced to satisfy frac(ts(a)) >= frac(ts(b)), and the
    sub-relation where the inequality must be strict.

    Returns ``(geq, gt)`` as sets of node pairs.
    """
    c = _Chain(g, tsm)
    a = _fr_by_cases(c, g)
    b = _fr_by_distance(c, g)
    if a != b:
        raise AssertionError("fractional relation constructions disagree")
    return a


def _closure(n: int, pairs) -> list[set]:
    succ = [set() for _ in range(n)]
    for a, b in pairs:
        succ[a].add(b)
    reach = []
    for s in range(n):
        seen = {s}
        stack = [s]
        while stack:
            x = stack.pop()
            for y in succ[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        reach.append(seen)
    return reach


def _certificate_ok(g: WeightedGraph, c: _Chain) -> bool:
    if not _weak_by_distance(c, g):
        return False
    geq, gt = _fr_by_distance(c, g)
    reach = _closure(g.node_count, geq)
    return not any(a in reach[b] for a, b in gt)


def check_tsm_certificate(g: WeightedGraph, tsm: Sequence) -> bool:
    """Weak satisfaction plus: no strict fractional pair closes a cycle."""
    if not weakly_satisfies(g, tsm):
        return False
    geq, gt = fractional_relations(g, tsm)
    reach = _closure(g.node_count, geq)
    return not any(a in reach[b] for a, b in gt)


def realization_from_certificate(g: WeightedGraph, tsm: Sequence) -> tuple:
    """Timestamps realizing ``g`` built from a valid residue certificate.

    The integer part follows the modular steps along the chain; the fraction
    counts strict pairs on the longest descending path of the fractional
    order, scaled by ``1/(n+1)``.
    """
    if not check_tsm_certificate(g, tsm):
        raise NotRealizable("residues are not a certificate")
    c = _Chain(g, tsm)
    n = g.node_count
    whole = [0] * n
    for pos, u in enumerate(c.order):
        whole[u] = c.prefix[pos]
    geq, gt = fractional_relations(g, tsm)
    # longest number of strict pairs on a path starting at each node
    depth = [0] * n
    for _ in range(n + 1):
        changed = False
        for a, b in geq:
            cand = depth[b] + (1 if (a, b) in gt else 0)
            if cand > depth[a]:
                depth[a] = cand
                changed = True
        if not changed:
            break
    else:
        raise AssertionError("strict pair on a fractional cycle")
    ts = tuple(Fraction(whole[u]) + Fraction(depth[u], n + 1) for u in range(n))
    problems = satisfies(g, ts)
    if problems:
        raise AssertionError(f"rebuilt timestamps fail: {problems[0]}")
    return ts


def search_certificate(g: WeightedGraph, max_candidates: int | None = None):
    """Smallest residue certificate in lexicographic order of the chain, or None.

    Residues only matter up to a common shift, so the first chain node is
    fixed to 0.  Raises ``ResourceWarning`` past ``max_candidates``.
    """
    n = g.node_count
    if n == 0:
        return ()
    M = g.M
    order = g.chain()
    tried = 0
    for rest in itertools.product(range(M), repeat=n - 1):
        tried += 1
        if max_candidates is not None and tried > max_candidates:
            raise ResourceWarning(f"more than {max_candidates} residue vectors")
        tsm = [0] * n
        for u, r in zip(order[1:], rest):
            tsm[u] = r
        if _certificate_ok(g, _Chain(g, tsm)):
            return tuple(tsm)
    return None

"""Formulas expressing realizability of linear weighted graphs.

Propositions ``p0 .. p{M-1}`` guess the integer part of each timestamp
modulo M.  The formulas check that this guess weakly satisfies every
constraint and, for strict constraints, that the induced order on
fractional parts has no cycle through a strict pair.
"""

from __future__ import annotations

from functools import lru_cache

from ..graphs import SUCC, weight_symbol
from ..pdl.ast import (
    EMPTY, Inv, Loop, Quantified, Test, alt, cap, conj, disj, edge, everywhere, inv, neg,
    nowhere, plus, prop, sent_and, seq, star,
)


def residue_props(M: int) -> tuple:
    return tuple(f"p{i}" for i in range(M))


class _Builder:
    """Shared subformulas for one bound M."""

    def __init__(self, M: int, mixed: bool):
        if M < 1:
            raise ValueError("M must be positive")
        self.M = M
        self.mixed = mixed
        self.succ = edge(SUCC)
        self.back = inv(self.succ)
        self.p = [prop(n) for n in residue_props(M)]
        self.tp = [Test(x) for x in self.p]
        self._small = {}
        self._steps = {}
        self._w = {}

    def delta(self, i, j):
        return (j - i) % self.M

    def weight_edge(self, a):
        """Any constraint edge of weight a (both comparators when mixed)."""
        if a not in self._w:
            le = edge(weight_symbol("<=", a))
            self._w[a] = alt(le, edge(weight_symbol("<", a))) if self.mixed else le
        return self._w[a]

    def step(self, k, l):
        key = (k, l)
        if key not in self._steps:
            self._steps[key] = seq(self.tp[k], self.succ, self.tp[l])
        return self._steps[key]

    def small(self, i, j):
        """Pairs u <= v with residues i, j whose modular distance stays below M."""
        key = (i, j)
        if key in self._small:
            return self._small[key]
        if i <= j:
            inner = alt(*[self.step(k, l) for k in range(i, j + 1) for l in range(k, j + 1)])
            f = seq(self.tp[i], star(inner), self.tp[j])
        else:
            f = alt(*[seq(self.small(i, k), self.succ, self.small(l, j))
                      for l in range(0, j + 1) for k in range(i, self.M)])
        self._small[key] = f
        return f

    def big(self):
        """Pairs u < v with two intermediate steps adding up to at least M."""
        M = self.M
        terms = []
        for i in range(M):
            for j in range(M):
                for k in range(M):
                    if self.delta(i, j) + self.delta(j, k) >= M:
                        terms.append(seq(self.tp[i], plus(self.succ), self.tp[j], plus(self.succ),
                                         self.tp[k], star(self.succ)))
        return alt(*terms) if terms else EMPTY

    def partition(self):
        M = self.M
        return everywhere(disj(*[conj(self.p[i], *[neg(self.p[j]) for j in range(M) if j != i])
                                 for i in range(M)]))

    def forward(self):
        M = self.M
        big = self.big()
        first = disj(*[Loop(seq(big, inv(self.weight_edge(a)))) for a in range(-M + 1, M)])
        second = []
        for a in range(-M + 1, M):
            for i in range(M):
                for j in range(M):
                    if self.delta(i, j) > a:
                        second.append(Loop(seq(self.tp[i], self.weight_edge(a), self.tp[j], plus(self.back))))
        return sent_and(nowhere(first), nowhere(disj(*second)))

    def backward(self):
        M = self.M
        terms = []
        for a in range(-M + 1, M):
            for i in range(M):
                for j in range(M):
                    if self.delta(i, j) < -a:
                        terms.append(Loop(seq(self.small(i, j), self.weight_edge(a))))
        return nowhere(disj(*terms))

    def weak(self):
        return sent_and(self.partition(), self.forward(), self.backward())

    def distance_is(self, a):
        """Pairs (u, v) whose capped signed residue distance equals a."""
        M = self.M
        terms = []
        if a >= 0:
            terms += [self.small(i, j) for i in range(M) for j in range(M) if self.delta(i, j) == a]
        if a <= 0:
            terms += [Inv(self.small(j, i)) for i in range(M) for j in range(M) if self.delta(j, i) == -a]
        return alt(*terms)

    def fractional(self):
        M = self.M
        geq_terms, gt_terms = [], []
        for a in range(-M + 1, M):
            dist = self.distance_is(a)
            geq_terms.append(cap(self.weight_edge(a), dist))
            gt_terms.append(cap(edge(weight_symbol("<", a)), dist))
        geq_terms += [seq(self.tp[i], self.back, self.tp[i]) for i in range(M)]
        return alt(*geq_terms), alt(*gt_terms)


def weak_realizability_body(M: int, mixed: bool):
    return _Builder(M, mixed).weak()


@lru_cache(maxsize=16)
def gen_closed_realizability(M: int) -> Quantified:
    """Sentence true on a linear graph with only non-strict constraints
    (weights below M in absolute value) iff it is realizable."""
    return Quantified(residue_props(M), weak_realizability_body(M, mixed=False))


def fractional_relation_paths(M: int):
    """(geq, gt) path expressions over residue propositions and weight edges."""
    return _Builder(M, mixed=True).fractional()


@lru_cache(maxsize=16)
def gen_mixed_realizability(M: int) -> Quantified:
    """Sentence true on a linear graph with strict and non-strict
    constraints (weights below M in absolute value) iff it is realizable."""
    b = _Builder(M, mixed=True)
    geq, gt = b.fractional()
    body = sent_and(b.weak(), nowhere(Loop(seq(gt, star(geq)))))
    return Quantified(residue_props(M), body)


def named_subformulas(M: int, mixed: bool = True) -> dict:
    """Building blocks of the realizability formulas, by name.

    ``small`` maps residue pairs (i, j) to their path expression and
    ``distance`` maps weights a to the pairs whose capped residue distance is a.
    """
    b = _Builder(M, mixed)
    out = {
        "partition": b.partition(),
        "big": b.big(),
        "small": {(i, j): b.small(i, j) for i in range(M) for j in range(M)},
        "distance": {a: b.distance_is(a) for a in range(-M + 1, M)},
        "forward": b.forward(),
        "backward": b.backward(),
        "weak": b.weak(),
    }
    if mixed:
        out["geq_fr"], out["gt_fr"] = b.fractional()
    return out

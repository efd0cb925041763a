"""Interpretation of weighted edges inside graphs of timed runs.

The edge symbol for ``(cmp, a)`` is mapped to a path expression relating
exactly the positions ``u, v`` for which the run's bounds impose
``ts(v) - ts(u) cmp a``.  Path building blocks:

* ``origin(x)`` relates the reset position a value of clock ``x``
  descends from to each position holding that value;
* ``stored(d)`` relates the start position of a value read from ``d``
  (the write, or the origin of the clock copied into ``d``) to the read.
"""

from __future__ import annotations

from ..graphs import SUCC, weight_symbol
from ..pdl.ast import (
    EMPTY, Auto, Diamond, Inv, PathAutomaton, Test, alt, conj, edge, inv, neg, prop, seq, star,
)
from ..pdl.semantics import Interpretation
from ..timed.instructions import Signature

FEATURES = frozenset({"diagonals", "age", "clock-ds", "event", "renaming"})


class _Paths:
    def __init__(self, sig: Signature, alphabet, features, renaming):
        self.sig = sig
        self.alphabet = alphabet
        self.features = features
        self.succ = edge(SUCC)
        self.back = inv(self.succ)
        self._origin = {}
        self._stored = {}
        self.renaming = renaming
        self.track = self._tracker() if renaming else None

    def has(self, label):
        return self.alphabet is None or label in self.alphabet

    def test(self, label):
        return Test(prop(label))

    def _tracker(self):
        sig = self.sig
        trans = []
        for x in sig.clocks:
            for y in sig.clocks:
                lab = f"{x}:={y}"
                if self.has(lab):
                    trans.append((y, seq(self.test(lab), self.succ), x))
            for d in sig.ds_names:
                for y in sig.clocks:
                    put, get = f"{d}:={y}", f"{x}:={d}"
                    if self.has(put) and self.has(get):
                        trans.append((y, seq(self.test(put), edge(d), self.test(get), self.succ), x))
        return PathAutomaton("track", tuple(sig.clocks), tuple(trans))

    def origin(self, x):
        """From the reset a value of x descends from, to positions holding it."""
        if x in self._origin:
            return self._origin[x]
        if not self.renaming:
            lab = f"{x}:=0"
            if not self.has(lab):
                p = EMPTY
            else:
                reset = seq(self.back, star(seq(Test(neg(prop(lab))), self.back)), self.test(lab))
                p = Inv(reset)
        else:
            p = alt(*[seq(self.test(f"{x0}:=0"), self.succ, Auto(self.track, x0, x))
                      for x0 in self.sig.clocks if self.has(f"{x0}:=0")])
        self._origin[x] = p
        return p

    def stored(self, d):
        """From the start of the value read from d, to the read."""
        if d in self._stored:
            return self._stored[d]
        copies = [x for x in self.sig.clocks if self.has(f"{d}:={x}")]
        if not copies:
            p = edge(d)
        else:
            fresh = seq(Test(conj(*[neg(prop(f"{d}:={x}")) for x in copies])), edge(d))
            p = alt(fresh, *[seq(self.origin(x), self.test(f"{d}:={x}"), edge(d)) for x in copies])
        self._stored[d] = p
        return p

    def until_next(self, a):
        """From a position to the next strictly later position with event a."""
        return seq(self.succ, star(seq(Test(neg(prop(a))), self.succ)), self.test(a))

    # -------------------------------------------------------- bounds

    def upper(self, cmp, c):
        """Pairs (u, v) with an upper bound giving ts(v) - ts(u) cmp c."""
        sig, f, terms = self.sig, self.features, []
        for x in sig.clocks:
            lab = f"{x}{cmp}{c}"
            if self.has(lab):
                terms.append(seq(self.origin(x), self.test(lab)))
        if "age" in f:
            for d in sig.ds_names:
                lab = f"{d}{cmp}{c}"
                if self.has(lab):
                    terms.append(seq(self.stored(d), self.test(lab)))
        if "diagonals" in f:
            for x in sig.clocks:
                for y in sig.clocks:
                    lab = f"{x}-{y}{cmp}{c}"
                    if x != y and self.has(lab):
                        terms.append(seq(self.origin(x), self.test(lab), Inv(self.origin(y))))
        if "clock-ds" in f:
            for x in sig.clocks:
                for d in sig.ds_names:
                    lab = f"{x}-{d}{cmp}{c}"
                    if self.has(lab):
                        terms.append(seq(self.origin(x), self.test(lab), Inv(self.stored(d))))
                    lab = f"{d}-{x}{cmp}{c}"
                    if self.has(lab):
                        terms.append(seq(self.stored(d), self.test(lab), Inv(self.origin(x))))
        if "event" in f:
            for a in sig.props:
                lab = f"next_{a}{cmp}{c}"
                if self.has(lab):
                    terms.append(seq(self.test(lab), self.until_next(a)))
        return terms

    def lower(self, cmp, c):
        """Pairs (u, v) with a lower bound giving ts(v) - ts(u) cmp -c."""
        sig, f, terms = self.sig, self.features, []
        for x in sig.clocks:
            lab = f"{c}{cmp}{x}"
            if self.has(lab):
                terms.append(seq(self.test(lab), Inv(self.origin(x))))
        if "age" in f:
            for d in sig.ds_names:
                lab = f"{c}{cmp}{d}"
                if self.has(lab):
                    terms.append(seq(self.test(lab), Inv(self.stored(d))))
        if "diagonals" in f:
            for x in sig.clocks:
                for y in sig.clocks:
                    lab = f"{c}{cmp}{x}-{y}"
                    if x != y and self.has(lab):
                        terms.append(seq(self.origin(y), self.test(lab), Inv(self.origin(x))))
        if "clock-ds" in f:
            for x in sig.clocks:
                for d in sig.ds_names:
                    lab = f"{c}{cmp}{d}-{x}"
                    if self.has(lab):
                        terms.append(seq(self.origin(x), self.test(lab), Inv(self.stored(d))))
                    lab = f"{c}{cmp}{x}-{d}"
                    if self.has(lab):
                        terms.append(seq(self.stored(d), self.test(lab), Inv(self.origin(x))))
        if "event" in f:
            for a in sig.props:
                lab = f"{c}{cmp}next_{a}"
                if self.has(lab):
                    terms.append(Inv(seq(self.test(lab), self.until_next(a))))
        return terms

    def unmatched_events(self, M):
        """Self-loops at positions bounding the time to an event that never comes."""
        if "event" not in self.features:
            return []
        terms = []
        for a in self.sig.props:
            labs = []
            for c in range(M):
                for cmp in ("<", "<="):
                    for lab in (f"next_{a}{cmp}{c}", f"{c}{cmp}next_{a}"):
                        if self.has(lab):
                            labs.append(prop(lab))
            if labs:
                never = neg(Diamond(seq(self.succ, star(seq(Test(neg(prop(a))), self.succ))), prop(a)))
                for lab in labs:
                    terms.append(Test(conj(lab, never)))
        return terms


def gen_timing_interpretation(sig: Signature, M: int, features=None, alphabet=None,
                              renaming: bool = False) -> Interpretation:
    """Interpretation of the successor and all weight symbols below M.

    ``alphabet`` (the node labels that can occur) lets terms mentioning
    impossible labels be dropped.  ``features`` restricts the kinds of bounds
    considered; by default all are.
    """
    features = FEATURES if features is None else frozenset(features)
    unknown = features - FEATURES
    if unknown:
        raise ValueError(f"unknown timing features {sorted(unknown)}")
    if renaming and "renaming" not in features:
        raise ValueError("renaming requested but the renaming feature is disabled")
    paths = _Paths(sig, None if alphabet is None else frozenset(alphabet), features, renaming)
    edges = {SUCC: paths.succ}
    for a in range(-(M - 1), M):
        for cmp in ("<", "<="):
            terms = []
            if a >= 0:
                terms += paths.upper(cmp, a)
            if a <= 0:
                terms += paths.lower(cmp, -a)
            if a == 0 and cmp == "<":
                terms += paths.unmatched_events(M)
            edges[weight_symbol(cmp, a)] = alt(*terms) if terms else EMPTY
    return Interpretation({}, edges)

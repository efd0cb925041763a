"""Evaluation of formulas on labeled graphs, and interpretations."""

from __future__ import annotations

import os
from collections import OrderedDict
from dataclasses import dataclass, field

from ..graphs import SUCC, LabeledGraph, WeightedGraph, parse_weight_symbol
from . import ast as A
from .engine import Program, ResourceLimit, UndeclaredSymbol, node_set, relation

__all__ = [
    "eval_state", "eval_path", "eval_sentence", "eval_eq", "compile_formula",
    "Interpretation", "backward_translate", "apply_interpretation",
    "UndeclaredSymbol", "ResourceLimit",
]

_CACHE: "OrderedDict[int, tuple[object, Program]]" = OrderedDict()
_CACHE_SIZE = 64


def default_max_steps() -> int:
    return int(os.environ.get("TIMEDGRAPHS_MAX_STEPS", str(5 * 10**7)))


def compile_formula(f) -> Program:
    """Compile (and cache by identity) a formula of any sort."""
    hit = _CACHE.get(id(f))
    if hit is not None and hit[0] is f:
        _CACHE.move_to_end(id(f))
        return hit[1]
    if isinstance(f, A.Quantified):
        prog = Program([f.body], quantified=f.props)
    else:
        prog = Program([f])
    _CACHE[id(f)] = (f, prog)
    if len(_CACHE) > _CACHE_SIZE:
        _CACHE.popitem(last=False)
    return prog


def _as_labeled(g):
    return g.to_labeled() if isinstance(g, WeightedGraph) else g


def eval_state(g, f) -> frozenset[int]:
    """Set of nodes of ``g`` satisfying the state formula ``f``."""
    if not isinstance(f, A.STATE_TYPES):
        raise TypeError("expected a state formula")
    g = _as_labeled(g)
    prog = compile_formula(f)
    return node_set(prog.run(g), prog.roots[0], g.node_count)


def eval_path(g, p) -> frozenset[tuple[int, int]]:
    """Relation denoted by path expression ``p`` on ``g``."""
    if not isinstance(p, A.PATH_TYPES):
        raise TypeError("expected a path expression")
    g = _as_labeled(g)
    prog = compile_formula(p)
    return relation(prog.run(g), prog.roots[0], g.node_count)


def eval_sentence(g, s) -> bool:
    if not isinstance(s, A.SENTENCE_TYPES):
        raise TypeError("expected a sentence")
    g = _as_labeled(g)
    prog = compile_formula(s)
    return bool(prog.run(g)[prog.roots[0], 0, 0])


def eval_eq(g, s, max_steps: int | None = None):
    """Decide an existentially quantified sentence.

    Returns ``(True, witness)`` where the witness maps each quantified
    proposition to its node set (the lexicographically least labeling when
    positions are ordered node by node), or ``(False, None)``.
    """
    g = _as_labeled(g)
    if not isinstance(s, A.Quantified):
        ok = eval_sentence(g, s)
        return ok, ({} if ok else None)
    prog = compile_formula(s)
    witness = prog.search(g, max_steps=max_steps or default_max_steps())
    return (witness is not None), witness


# ---------------------------------------------------------------- interpretations

@dataclass
class Interpretation:
    """Maps node propositions to state formulas and edge symbols to paths."""

    props: dict = field(default_factory=dict)
    edges: dict = field(default_factory=dict)


class _Translator:
    def __init__(self, interp: Interpretation, keep: frozenset):
        self.i = interp
        self.keep = keep
        self.memo: dict = {}
        self.autos: dict = {}

    def __call__(self, x):
        key = id(x)
        if key in self.memo:
            return self.memo[key][1]
        y = self._do(x)
        self.memo[key] = (x, y)
        return y

    def _do(self, x):
        t = self
        if isinstance(x, A.Top):
            return x
        if isinstance(x, A.Prop):
            if x.name in self.keep:
                return x
            if x.name not in self.i.props:
                raise UndeclaredSymbol(f"interpretation does not define proposition {x.name!r}")
            return self.i.props[x.name]
        if isinstance(x, A.Edge):
            if x.symbol not in self.i.edges:
                raise UndeclaredSymbol(f"interpretation does not define edge symbol {x.symbol!r}")
            return self.i.edges[x.symbol]
        if isinstance(x, A.Not):
            return A.Not(t(x.arg))
        if isinstance(x, A.Or):
            return A.Or(tuple(t(p) for p in x.parts))
        if isinstance(x, A.And):
            return A.And(tuple(t(p) for p in x.parts))
        if isinstance(x, A.Diamond):
            return A.Diamond(t(x.path), t(x.arg))
        if isinstance(x, A.Loop):
            return A.Loop(t(x.path))
        if isinstance(x, A.Test):
            return A.Test(t(x.arg))
        if isinstance(x, A.Alt):
            return A.Alt(tuple(t(p) for p in x.parts))
        if isinstance(x, A.Seq):
            return A.Seq(tuple(t(p) for p in x.parts))
        if isinstance(x, A.Star):
            return A.Star(t(x.arg))
        if isinstance(x, A.Inv):
            return A.Inv(t(x.arg))
        if isinstance(x, A.Cap):
            return A.Cap(t(x.left), t(x.right))
        if isinstance(x, A.Auto):
            aut = x.automaton
            if aut.name not in self.autos:
                self.autos[aut.name] = A.PathAutomaton(
                    aut.name, aut.states, tuple((q, t(p), r) for q, p, r in aut.transitions))
            return A.Auto(self.autos[aut.name], x.source, x.target)
        if isinstance(x, A.SomeNode):
            return A.SomeNode(t(x.arg))
        if isinstance(x, A.SentNot):
            return A.SentNot(t(x.arg))
        if isinstance(x, A.SentOr):
            return A.SentOr(tuple(t(p) for p in x.parts))
        if isinstance(x, A.SentAnd):
            return A.SentAnd(tuple(t(p) for p in x.parts))
        if isinstance(x, A.Quantified):
            return A.Quantified(x.props, t(x.body))
        raise TypeError(f"not a formula: {x!r}")


def backward_translate(f, interp: Interpretation, keep=()):
    """Substitute interpreted meanings for propositions and edge symbols.

    Quantified propositions of ``f`` and those listed in ``keep`` are left
    alone.  Shared subformulas stay shared in the result.
    """
    bound = set(keep)
    if isinstance(f, A.Quantified):
        bound |= set(f.props)
    return _Translator(interp, frozenset(bound))(f)


def apply_interpretation(g: LabeledGraph, interp: Interpretation, M: int | None = None):
    """The graph whose labels and edges are the interpreted meanings on ``g``.

    When every edge symbol is the successor or a weight symbol and no
    propositions are interpreted, a :class:`WeightedGraph` is returned.
    """
    roots, names = [], []
    for p, f in sorted(interp.props.items()):
        roots.append(f)
        names.append(("prop", p))
    for s, p in sorted(interp.edges.items()):
        roots.append(p)
        names.append(("edge", s))
    prog = Program(roots)
    regs = prog.run(g)
    n = g.node_count
    labels = [set() for _ in range(n)]
    edges = set()
    for (kind, name), reg in zip(names, prog.roots):
        if kind == "prop":
            for u in node_set(regs, reg, n):
                labels[u].add(name)
        else:
            for u, v in relation(regs, reg, n):
                edges.add((u, name, v))
    weighted = not interp.props and all(s == SUCC or parse_weight_symbol(s) for s in interp.edges)
    if weighted:
        order = {(u, v) for u, s, v in edges if s == SUCC}
        cons = set()
        for u, s, v in edges:
            if s != SUCC:
                c, w = parse_weight_symbol(s)
                cons.add((u, c, w, v))
        if M is None:
            M = 1 + max((abs(w) for _, _, w, _ in cons), default=0)
        return WeightedGraph(n, M, frozenset(order), frozenset(cons))
    return LabeledGraph(n, tuple(frozenset(l) for l in labels), frozenset(edges),
                        frozenset(interp.props), frozenset(interp.edges))

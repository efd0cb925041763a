"""Abstract syntax of state formulas, path expressions and sentences.

State formulas denote node sets, path expressions denote binary relations
and sentences denote truth values.  ``And``/``SentAnd`` are kept as nodes
for compactness; they are definable from negation and disjunction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union


# ---------------------------------------------------------------- state formulas

@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Prop:
    name: str


@dataclass(frozen=True)
class Not:
    arg: "State"


@dataclass(frozen=True)
class Or:
    parts: tuple  # empty tuple means false


@dataclass(frozen=True)
class And:
    parts: tuple  # empty tuple means true


@dataclass(frozen=True)
class Diamond:
    """Nodes with a path-successor satisfying ``arg``."""

    path: "Path"
    arg: "State"


@dataclass(frozen=True)
class Loop:
    """Nodes related to themselves by ``path``."""

    path: "Path"


# ---------------------------------------------------------------- path expressions

@dataclass(frozen=True)
class Edge:
    symbol: str


@dataclass(frozen=True)
class Test:
    arg: "State"


@dataclass(frozen=True)
class Alt:
    parts: tuple  # empty tuple means the empty relation


@dataclass(frozen=True)
class Seq:
    parts: tuple  # empty tuple means the identity


@dataclass(frozen=True)
class Star:
    arg: "Path"


@dataclass(frozen=True)
class Inv:
    arg: "Path"


@dataclass(frozen=True)
class Cap:
    left: "Path"
    right: "Path"


@dataclass(frozen=True)
class PathAutomaton:
    """Finite automaton whose transitions are labeled by path expressions."""

    name: str
    states: tuple
    transitions: tuple  # of (source_state, Path, target_state)

    def __post_init__(self):
        for q, _, r in self.transitions:
            if q not in self.states or r not in self.states:
                raise ValueError(f"automaton {self.name}: unknown state in transition {q}->{r}")


@dataclass(frozen=True)
class Auto:
    """Pairs (u, v) such that some run of ``automaton`` goes from
    (u, ``source``) to (v, ``target``), composing transition relations."""

    automaton: PathAutomaton
    source: str
    target: str

    def __post_init__(self):
        if self.source not in self.automaton.states or self.target not in self.automaton.states:
            raise ValueError(f"automaton {self.automaton.name} has no state {self.source} or {self.target}")


# ---------------------------------------------------------------- sentences

@dataclass(frozen=True)
class SomeNode:
    """True iff some node satisfies ``arg``."""

    arg: "State"


@dataclass(frozen=True)
class SentNot:
    arg: "Sentence"


@dataclass(frozen=True)
class SentOr:
    parts: tuple


@dataclass(frozen=True)
class SentAnd:
    parts: tuple


@dataclass(frozen=True)
class Quantified:
    """Existentially quantified node propositions in front of a sentence."""

    props: tuple
    body: "Sentence"


State = Union[Top, Prop, Not, Or, And, Diamond, Loop]
Path = Union[Edge, Test, Alt, Seq, Star, Inv, Cap, Auto]
Sentence = Union[SomeNode, SentNot, SentOr, SentAnd]

STATE_TYPES = (Top, Prop, Not, Or, And, Diamond, Loop)
PATH_TYPES = (Edge, Test, Alt, Seq, Star, Inv, Cap, Auto)
SENTENCE_TYPES = (SomeNode, SentNot, SentOr, SentAnd)


# ---------------------------------------------------------------- constructors

TOP = Top()
FALSE = Or(())
EMPTY = Alt(())


def prop(name: str) -> Prop:
    return Prop(name)


def edge(symbol: str) -> Edge:
    return Edge(symbol)


def test(f) -> Test:
    return Test(f)


def neg(f):
    return Not(f)


def disj(*fs):
    return fs[0] if len(fs) == 1 else Or(tuple(fs))


def conj(*fs):
    return fs[0] if len(fs) == 1 else And(tuple(fs))


def implies(a, b):
    return Or((Not(a), b))


def iff(a, b):
    return And((implies(a, b), implies(b, a)))


def diamond(p, f=TOP) -> Diamond:
    return Diamond(p, f)


def alt(*ps):
    return ps[0] if len(ps) == 1 else Alt(tuple(ps))


def seq(*ps):
    return ps[0] if len(ps) == 1 else Seq(tuple(ps))


def star(p) -> Star:
    return Star(p)


def plus(p):
    return Seq((p, Star(p)))


def inv(p) -> Inv:
    return Inv(p)


def cap(a, b) -> Cap:
    return Cap(a, b)


def some(f) -> SomeNode:
    return SomeNode(f)


def everywhere(f) -> SentNot:
    """Every node satisfies ``f``."""
    return SentNot(SomeNode(Not(f)))


def nowhere(f) -> SentNot:
    return SentNot(SomeNode(f))


def sent_and(*ss):
    return ss[0] if len(ss) == 1 else SentAnd(tuple(ss))


def sent_or(*ss):
    return ss[0] if len(ss) == 1 else SentOr(tuple(ss))


# ---------------------------------------------------------------- traversal

def children(x) -> tuple:
    if isinstance(x, (Top, Prop, Edge)):
        return ()
    if isinstance(x, (Not, Test, Star, Inv, SomeNode, SentNot)):
        return (x.arg,)
    if isinstance(x, (Or, And, Alt, Seq, SentOr, SentAnd)):
        return x.parts
    if isinstance(x, Diamond):
        return (x.path, x.arg)
    if isinstance(x, Loop):
        return (x.path,)
    if isinstance(x, Cap):
        return (x.left, x.right)
    if isinstance(x, Auto):
        return tuple(p for _, p, _ in x.automaton.transitions)
    if isinstance(x, Quantified):
        return (x.body,)
    raise TypeError(f"not a formula: {x!r}")


def iter_nodes(root):
    """Each distinct (by identity) subformula once, children before parents."""
    seen = set()
    out = []
    stack = [(root, False)]
    while stack:
        x, done = stack.pop()
        if done:
            out.append(x)
            continue
        if id(x) in seen:
            continue
        seen.add(id(x))
        stack.append((x, True))
        for c in reversed(children(x)):
            if id(c) not in seen:
                stack.append((c, False))
    return out


def _payload(x):
    if isinstance(x, Prop):
        return x.name
    if isinstance(x, Edge):
        return x.symbol
    if isinstance(x, Auto):
        a = x.automaton
        return (a.name, a.states, tuple((q, r) for q, _, r in a.transitions), x.source, x.target)
    if isinstance(x, Quantified):
        return x.props
    return None


def formula_size(root, shared: bool = True) -> int:
    """Number of constructor occurrences.

    With ``shared`` (default) structurally equal subformulas are counted once,
    which is the size of the formula represented as a DAG.  Otherwise the size
    of the fully expanded syntax tree is returned.
    """
    canon: dict = {}
    ids: dict[int, int] = {}
    tree: dict[int, int] = {}
    for x in iter_nodes(root):
        key = (type(x).__name__, _payload(x), tuple(ids[id(c)] for c in children(x)))
        ids[id(x)] = canon.setdefault(key, len(canon))
        tree[id(x)] = 1 + sum(tree[id(c)] for c in children(x))
    return len(canon) if shared else tree[id(root)]


def intersection_width(root) -> int:
    """Largest intersection width of a path subformula (at least 1)."""
    width: dict[int, int] = {}
    best = 1
    for x in iter_nodes(root):
        cs = children(x)
        if isinstance(x, (Edge, Test)):
            w = 1
        elif isinstance(x, Cap):
            w = width[id(x.left)] + width[id(x.right)]
        elif isinstance(x, (Alt, Seq, Star, Inv, Auto)):
            w = max((width[id(c)] for c in cs), default=1)
        else:
            w = 0
        width[id(x)] = w
        best = max(best, w)
    return best


def symbols(root) -> tuple[frozenset[str], frozenset[str]]:
    """Free node propositions and edge symbols of a formula."""
    props, edges = set(), set()
    bound = set()
    for x in iter_nodes(root):
        if isinstance(x, Prop):
            props.add(x.name)
        elif isinstance(x, Edge):
            edges.add(x.symbol)
        elif isinstance(x, Quantified):
            bound |= set(x.props)
    return frozenset(props - bound), frozenset(edges)

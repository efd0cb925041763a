"""Labeled graphs, weighted graphs and their JSON/DOT encodings."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

SUCC = "succ"
COMPARATORS = ("<", "<=")

_WEIGHT_SYMBOL = re.compile(r"^(<=|<)(-?\d+)$")


class GraphError(Exception):
    """Base class for graph input errors."""


class GraphSyntaxError(GraphError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class GraphSemanticError(GraphError):
    pass


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


def weight_symbol(cmp: str, w: int) -> str:
    """Edge symbol used for a weighted edge inside a labeled graph, e.g. '<=-2'."""
    if cmp not in COMPARATORS:
        raise ValueError(f"bad comparator {cmp!r}")
    return f"{cmp}{int(w)}"


def parse_weight_symbol(sym: str) -> tuple[str, int] | None:
    m = _WEIGHT_SYMBOL.match(sym)
    if m is None:
        return None
    return m.group(1), int(m.group(2))


def weight_alphabet(M: int) -> frozenset[str]:
    """All edge symbols of weighted graphs with bound M, plus the successor."""
    syms = {SUCC}
    for w in range(-(M - 1), M):
        for cmp in COMPARATORS:
            syms.add(weight_symbol(cmp, w))
    return frozenset(syms)


@dataclass(frozen=True)
class LabeledGraph:
    """A finite graph with sets of node labels and labeled edges.

    ``sigma`` and ``gamma`` are the declared node and edge alphabets.  When
    left as ``None`` they default to the symbols actually used.
    """

    node_count: int
    labels: tuple[frozenset[str], ...]
    edges: frozenset[tuple[int, str, int]]
    sigma: frozenset[str] | None = None
    gamma: frozenset[str] | None = None

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(frozenset(l) for l in self.labels))
        object.__setattr__(self, "edges", frozenset((int(u), str(s), int(v)) for u, s, v in self.edges))
        if self.sigma is not None:
            object.__setattr__(self, "sigma", frozenset(self.sigma))
        if self.gamma is not None:
            object.__setattr__(self, "gamma", frozenset(self.gamma))

    @property
    def node_alphabet(self) -> frozenset[str]:
        used = frozenset().union(*self.labels) if self.labels else frozenset()
        return used if self.sigma is None else self.sigma | used

    @property
    def edge_alphabet(self) -> frozenset[str]:
        used = frozenset(s for _, s, _ in self.edges)
        return used if self.gamma is None else self.gamma | used

    def relation(self, sym: str) -> set[tuple[int, int]]:
        return {(u, v) for u, s, v in self.edges if s == sym}

    def successors(self, u: int, sym: str = SUCC) -> list[int]:
        return sorted(v for a, s, v in self.edges if a == u and s == sym)

    def is_linear(self) -> bool:
        return _chain(self.node_count, self.relation(SUCC)) is not None

    def chain(self) -> list[int]:
        order = _chain(self.node_count, self.relation(SUCC))
        if order is None:
            raise GraphSemanticError("successor edges do not form a single chain")
        return order

    def with_alphabets(self, sigma=None, gamma=None) -> "LabeledGraph":
        return LabeledGraph(self.node_count, self.labels, self.edges,
                            self.sigma if sigma is None else frozenset(sigma),
                            self.gamma if gamma is None else frozenset(gamma))


@dataclass(frozen=True)
class WeightedGraph:
    """Nodes with an order relation and weighted difference constraints.

    A constraint ``(u, cmp, w, v)`` asks for ``ts(v) - ts(u) cmp w``.
    An order edge ``(u, v)`` asks for ``ts(u) <= ts(v)``.
    """

    node_count: int
    M: int
    order_edges: frozenset[tuple[int, int]]
    constraint_edges: frozenset[tuple[int, str, int, int]]

    def __post_init__(self):
        object.__setattr__(self, "order_edges", frozenset((int(u), int(v)) for u, v in self.order_edges))
        object.__setattr__(self, "constraint_edges",
                           frozenset((int(u), str(c), int(w), int(v)) for u, c, w, v in self.constraint_edges))

    @classmethod
    def linear(cls, n: int, constraints: Iterable[Sequence], M: int | None = None) -> "WeightedGraph":
        """Chain 0 -> 1 -> ... -> n-1 with the given constraints.

        The bound defaults to one more than the largest absolute weight.
        """
        cons = frozenset(tuple(c) for c in constraints)
        if M is None:
            M = 1 + max((abs(c[2]) for c in cons), default=0)
        return cls(n, M, frozenset((i, i + 1) for i in range(n - 1)), cons)

    def is_linear(self) -> bool:
        return _chain(self.node_count, self.order_edges) is not None

    def chain(self) -> list[int]:
        order = _chain(self.node_count, self.order_edges)
        if order is None:
            raise GraphSemanticError("order edges do not form a single chain")
        return order

    def edges_between(self, u: int, v: int) -> list[tuple[str, int]]:
        return sorted((c, w) for a, c, w, b in self.constraint_edges if a == u and b == v)

    def to_labeled(self) -> LabeledGraph:
        """View as a labeled graph over the weight alphabet."""
        edges = {(u, SUCC, v) for u, v in self.order_edges}
        edges |= {(u, weight_symbol(c, w), v) for u, c, w, v in self.constraint_edges}
        return LabeledGraph(self.node_count, tuple(frozenset() for _ in range(self.node_count)),
                            frozenset(edges), frozenset(), weight_alphabet(self.M))


Realization = tuple


def _chain(n: int, rel: set[tuple[int, int]]) -> list[int] | None:
    if n == 0:
        return [] if not rel else None
    if len(rel) != n - 1:
        return None
    nxt, has_pred = {}, set()
    for u, v in rel:
        if u in nxt or v in has_pred or u == v:
            return None
        nxt[u] = v
        has_pred.add(v)
    starts = [u for u in range(n) if u not in has_pred]
    if len(starts) != 1:
        return None
    order = [starts[0]]
    while order[-1] in nxt:
        order.append(nxt[order[-1]])
    return order if len(order) == n else None


def satisfies(g: WeightedGraph, ts: Sequence) -> list[str]:
    """Return the list of violated requirements (empty iff ts realizes g)."""
    problems = []
    if len(ts) != g.node_count:
        return [f"expected {g.node_count} timestamps, got {len(ts)}"]
    for u, v in sorted(g.order_edges):
        if not ts[u] <= ts[v]:
            problems.append(f"order {u}->{v}: {ts[u]} > {ts[v]}")
    for u, c, w, v in sorted(g.constraint_edges):
        d = ts[v] - ts[u]
        ok = d < w if c == "<" else d <= w
        if not ok:
            problems.append(f"constraint ({u},{c},{w},{v}): difference {d}")
    return problems


def validate(g) -> list[Diagnostic]:
    """Structural checks; an empty list means the graph is well formed."""
    out = []
    n = g.node_count
    if isinstance(g, LabeledGraph):
        if len(g.labels) != n:
            out.append(Diagnostic("label-count", f"{len(g.labels)} label sets for {n} nodes"))
        for u, s, v in g.edges:
            if not (0 <= u < n and 0 <= v < n):
                out.append(Diagnostic("dangling-edge", f"edge ({u},{s},{v}) leaves the node range"))
        if not out and g.relation(SUCC) and not g.is_linear():
            out.append(Diagnostic("not-linear", "successor edges do not form a single path through all nodes"))
        if g.sigma is not None:
            extra = g.node_alphabet - g.sigma
            if extra:
                out.append(Diagnostic("undeclared-label", f"labels {sorted(extra)} not declared"))
        if g.gamma is not None:
            extra = g.edge_alphabet - g.gamma
            if extra:
                out.append(Diagnostic("undeclared-edge", f"edge symbols {sorted(extra)} not declared"))
        return out
    if g.M < 1:
        out.append(Diagnostic("bad-bound", f"M must be positive, got {g.M}"))
    for u, v in g.order_edges:
        if not (0 <= u < n and 0 <= v < n):
            out.append(Diagnostic("dangling-edge", f"order edge ({u},{v}) leaves the node range"))
    for u, c, w, v in g.constraint_edges:
        if not (0 <= u < n and 0 <= v < n):
            out.append(Diagnostic("dangling-edge", f"constraint ({u},{c},{w},{v}) leaves the node range"))
        if c not in COMPARATORS:
            out.append(Diagnostic("bad-comparator", f"comparator {c!r}"))
        if abs(w) > g.M - 1:
            out.append(Diagnostic("weight-out-of-range", f"|{w}| exceeds M-1 = {g.M - 1}"))
    return out


def project(g: LabeledGraph, keep: Iterable[str]) -> LabeledGraph:
    """Restrict node labels to ``keep``; edges are unchanged."""
    keep = frozenset(keep)
    sigma = None if g.sigma is None else g.sigma & keep
    return LabeledGraph(g.node_count, tuple(l & keep for l in g.labels), g.edges, sigma, g.gamma)


# ---------------------------------------------------------------- JSON

def _locate(text: str, token: str) -> tuple[int, int]:
    idx = text.find(json.dumps(token))
    if idx < 0:
        return 0, 0
    line = text.count("\n", 0, idx) + 1
    col = idx - (text.rfind("\n", 0, idx) + 1) + 1
    return line, col


def _load(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphSyntaxError(exc.msg, exc.lineno, exc.colno) from None


def _int(x, what):
    if isinstance(x, bool) or not isinstance(x, int):
        raise GraphSemanticError(f"{what} must be an integer, got {x!r}")
    return x


def parse_graph(text: str):
    """Parse either graph kind; weighted graphs have ``order``/``constraints``/``M``."""
    doc = _load(text)
    if isinstance(doc, dict) and ({"M", "order", "constraints"} & set(doc)):
        return _weighted_from_doc(doc, text)
    return _labeled_from_doc(doc, text)


def parse_labeled(text: str) -> LabeledGraph:
    return _labeled_from_doc(_load(text), text)


def parse_weighted(text: str) -> WeightedGraph:
    return _weighted_from_doc(_load(text), text)


def _labeled_from_doc(doc, text="") -> LabeledGraph:
    if not isinstance(doc, dict) or "nodes" not in doc:
        raise GraphSemanticError("expected an object with a 'nodes' field")
    n = _int(doc["nodes"], "nodes")
    labels = doc.get("labels", [[] for _ in range(n)])
    if len(labels) != n:
        raise GraphSemanticError(f"{len(labels)} label sets for {n} nodes")
    edges = []
    for e in doc.get("edges", []):
        if not isinstance(e, list) or len(e) != 3:
            raise GraphSemanticError(f"edge must be [src, label, dst], got {e!r}")
        u, lab, v = e
        if lab == SUCC:
            sym = SUCC
        elif isinstance(lab, str) and lab.startswith("ds:") and len(lab) > 3:
            sym = lab[3:]
        else:
            line, col = _locate(text, lab) if isinstance(lab, str) else (0, 0)
            raise GraphSyntaxError(f"edge label {lab!r} is neither 'succ' nor 'ds:NAME'", line, col)
        edges.append((_int(u, "edge source"), sym, _int(v, "edge target")))
    g = LabeledGraph(n, tuple(frozenset(l) for l in labels), frozenset(edges),
                     frozenset(doc["sigma"]) if "sigma" in doc else None,
                     frozenset(doc["gamma"]) if "gamma" in doc else None)
    problems = validate(g)
    if problems:
        raise GraphSemanticError("; ".join(map(str, problems)))
    return g


def _weighted_from_doc(doc, text="") -> WeightedGraph:
    if not isinstance(doc, dict) or "nodes" not in doc:
        raise GraphSemanticError("expected an object with a 'nodes' field")
    n = _int(doc["nodes"], "nodes")
    order = []
    for e in doc.get("order", []):
        if not isinstance(e, list) or len(e) != 2:
            raise GraphSemanticError(f"order edge must be [u, v], got {e!r}")
        order.append((_int(e[0], "order source"), _int(e[1], "order target")))
    cons = []
    for e in doc.get("constraints", []):
        if not isinstance(e, list) or len(e) != 4:
            raise GraphSemanticError(f"constraint must be [u, cmp, w, v], got {e!r}")
        u, c, w, v = e
        if c not in COMPARATORS:
            line, col = _locate(text, c) if isinstance(c, str) else (0, 0)
            raise GraphSyntaxError(f"malformed comparator {c!r}", line, col)
        cons.append((_int(u, "constraint source"), c, _int(w, "weight"), _int(v, "constraint target")))
    if "M" in doc:
        M = _int(doc["M"], "M")
    else:
        M = 1 + max((abs(w) for _, _, w, _ in cons), default=0)
    g = WeightedGraph(n, M, frozenset(order), frozenset(cons))
    problems = validate(g)
    if problems:
        raise GraphSemanticError("; ".join(map(str, problems)))
    return g


def _edge_key(e):
    return (e[0], e[2], e[1])


def to_doc(g) -> dict:
    if isinstance(g, WeightedGraph):
        return {
            "nodes": g.node_count,
            "M": g.M,
            "order": [list(e) for e in sorted(g.order_edges)],
            "constraints": [list(e) for e in sorted(g.constraint_edges, key=lambda e: (e[0], e[3], e[1], e[2]))],
        }
    doc = {
        "nodes": g.node_count,
        "labels": [sorted(l) for l in g.labels],
        "edges": [[u, SUCC if s == SUCC else "ds:" + s, v] for u, s, v in sorted(g.edges, key=_edge_key)],
    }
    if g.sigma is not None:
        doc["sigma"] = sorted(g.sigma)
    if g.gamma is not None:
        doc["gamma"] = sorted(g.gamma)
    return doc


def to_json(g) -> str:
    return json.dumps(to_doc(g))


# ---------------------------------------------------------------- DOT

def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def to_dot(g, name: str = "G") -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    if isinstance(g, WeightedGraph):
        for u in range(g.node_count):
            lines.append(f'  n{u} [label="{u}"];')
        for u, v in sorted(g.order_edges):
            lines.append(f"  n{u} -> n{v} [style=bold];")
        for u, c, w, v in sorted(g.constraint_edges):
            lines.append(f'  n{u} -> n{v} [label="{_dot_escape(c + str(w))}", style=dashed, constraint=false];')
    else:
        for u in range(g.node_count):
            lab = ",".join(sorted(g.labels[u]))
            lines.append(f'  n{u} [label="{u}: {_dot_escape(lab)}"];')
        for u, s, v in sorted(g.edges, key=_edge_key):
            if s == SUCC:
                lines.append(f"  n{u} -> n{v} [style=bold];")
            else:
                lines.append(f'  n{u} -> n{v} [label="{_dot_escape(s)}", constraint=false];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)

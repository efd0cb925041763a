"""Small graphs drawn in the figures, with 0-based node indices."""

from timedgraphs.graphs import SUCC, LabeledGraph


def fig1_graph() -> LabeledGraph:
    labels = [{"p", "s"}, {"q", "s"}, {"p", "q"}, {"r"}, {"q"}, {"q", "s"}]
    edges = {(i, SUCC, i + 1) for i in range(5)}
    edges |= {(2, "d", 5), (0, "e", 3), (3, "f", 5), (2, "c", 0)}
    return LabeledGraph(6, tuple(map(frozenset, labels)), frozenset(edges),
                        frozenset("pqrs"), frozenset({SUCC, "c", "d", "e", "f"}))


def chain(n, labels=None, extra=()) -> LabeledGraph:
    labels = labels or [set() for _ in range(n)]
    edges = {(i, SUCC, i + 1) for i in range(n - 1)} | set(extra)
    return LabeledGraph(n, tuple(map(frozenset, labels)), frozenset(edges))

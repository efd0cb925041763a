"""Hypothesis strategies for random graphs and formulas."""

import itertools

from hypothesis import strategies as st

from timedgraphs.graphs import SUCC, LabeledGraph
from timedgraphs.pdl import ast as A

PROPS = ("a", "b", "c")
EDGES = (SUCC, "d", "e")
_NAMES = itertools.count()


@st.composite
def graphs(draw, max_nodes=6, props=PROPS, edge_symbols=EDGES, linear=True):
    n = draw(st.integers(1, max_nodes))
    labels = draw(st.lists(st.sets(st.sampled_from(props)), min_size=n, max_size=n))
    others = [s for s in edge_symbols if s != SUCC or not linear]
    edges = set(draw(st.sets(st.tuples(st.integers(0, n - 1), st.sampled_from(others), st.integers(0, n - 1)),
                             max_size=2 * n)))
    if linear:
        edges |= {(i, SUCC, i + 1) for i in range(n - 1)}
    return LabeledGraph(n, tuple(map(frozenset, labels)), frozenset(edges), frozenset(props),
                        frozenset(edge_symbols))


def _automaton(path):
    return st.builds(
        lambda ts: A.PathAutomaton(f"T{next(_NAMES)}", ("q0", "q1"), tuple(ts)),
        st.lists(st.tuples(st.sampled_from(("q0", "q1")), path, st.sampled_from(("q0", "q1"))),
                 min_size=1, max_size=3))


def formulas(props=PROPS, edge_symbols=EDGES):
    """Returns (state, path, sentence) strategies."""
    atom_state = st.one_of(st.just(A.TOP), st.sampled_from(props).map(A.Prop))
    atom_path = st.sampled_from(edge_symbols).map(A.Edge)

    def extend_state(inner):
        state, path = inner
        return st.one_of(
            state.map(A.Not),
            st.lists(state, max_size=3).map(lambda xs: A.Or(tuple(xs))),
            st.lists(state, max_size=3).map(lambda xs: A.And(tuple(xs))),
            st.builds(A.Diamond, path, state),
            path.map(A.Loop),
        )

    def extend_path(p):
        s = st.one_of(atom_state, st.builds(A.Diamond, p, atom_state), p.map(A.Loop))
        return st.one_of(
            s.map(A.Test),
            st.lists(p, max_size=3).map(lambda xs: A.Alt(tuple(xs))),
            st.lists(p, max_size=3).map(lambda xs: A.Seq(tuple(xs))),
            p.map(A.Star),
            p.map(A.Inv),
            st.builds(A.Cap, p, p),
        )

    path = st.recursive(atom_path, extend_path, max_leaves=8)
    path = st.one_of(path, st.builds(
        lambda aut, q, r: A.Auto(aut, q, r), _automaton(path), st.sampled_from(("q0", "q1")),
        st.sampled_from(("q0", "q1"))))
    state = st.recursive(atom_state, lambda s: extend_state((s, path)), max_leaves=6)
    sentence = st.recursive(state.map(A.SomeNode), lambda s: st.one_of(
        s.map(A.SentNot),
        st.lists(s, min_size=1, max_size=3).map(lambda xs: A.SentOr(tuple(xs))),
        st.lists(s, min_size=1, max_size=3).map(lambda xs: A.SentAnd(tuple(xs)))), max_leaves=4)
    return state, path, sentence


# ---------------------------------------------------------------- timed runs

def timed_signature():
    from timedgraphs.timed import Signature
    return Signature(clocks=("x", "y"), ds=(("s", "stack"), ("q", "queue")), props=("a", "b"))


RUN_M = 4
_CMPS = ("<", "<=", ">", ">=", "=")


@st.composite
def timed_runs(draw, max_len=7, renaming=False):
    """Valid instruction sequences over ``timed_signature()``."""
    from timedgraphs.timed import run_from_instructions
    sig = timed_signature()
    n = draw(st.integers(1, max_len))
    const = st.integers(0, RUN_M - 1)
    steps = [[["nop"], ["reset", "x"], ["reset", "y"]]]
    content = {"s": 0, "q": 0}
    for k in range(1, n):
        step = []
        remaining = n - k
        pending = content["s"] + content["q"]
        options = ["none"]
        if pending < remaining - 1:
            options += ["write s", "write q"]
        options += [f"read {d}" for d in ("s", "q") if content[d]]
        if pending >= remaining:
            options = [f"read {d}" for d in ("s", "q") if content[d]]
        op = draw(st.sampled_from(options))
        read = None
        if op == "none":
            step.append(["nop"])
        else:
            kind, d = op.split()
            step.append([kind, d])
            content[d] += 1 if kind == "write" else -1
            if kind == "read":
                read = d
        assigned = set()
        for x in ("x", "y"):
            if draw(st.booleans()) and draw(st.booleans()):
                step.append(["reset", x])
                assigned.add(x)
        if renaming:
            if op.startswith("write") and draw(st.booleans()):
                step.append(["assign", op.split()[1], draw(st.sampled_from(("x", "y")))])
            for x in ("x", "y"):
                if x not in assigned and draw(st.booleans()):
                    src = draw(st.sampled_from(("x", "y") + ((read,) if read else ())))
                    step.append(["assign", x, src])
                    assigned.add(x)
        for _ in range(draw(st.integers(0, 3))):
            kind = draw(st.sampled_from(("guard", "diag", "next", "age", "diag-ds")))
            cmp = draw(st.sampled_from(_CMPS))
            c = draw(const)
            if kind == "guard":
                step.append(["guard", draw(st.sampled_from(("x", "y"))), cmp, c])
            elif kind == "diag":
                a, b = draw(st.permutations(("x", "y")))
                step.append(["diag", a, b, cmp, draw(st.integers(-RUN_M + 1, RUN_M - 1))])
            elif kind == "next":
                step.append(["next", draw(st.sampled_from(("a", "b"))), cmp, c])
            elif read and kind == "age":
                step.append(["age", read, cmp, c])
            elif read:
                x = draw(st.sampled_from(("x", "y")))
                pair = [read, x] if draw(st.booleans()) else [x, read]
                step.append(["diag"] + pair + [cmp, draw(st.integers(-RUN_M + 1, RUN_M - 1))])
        for e in ("a", "b"):
            if draw(st.integers(0, 3)) == 0:
                step.append(["event", e])
        steps.append(step)
    return sig, run_from_instructions(sig, steps, renaming=renaming)

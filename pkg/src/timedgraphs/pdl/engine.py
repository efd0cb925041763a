"""Bit-parallel evaluation of formulas.

Formulas are compiled into a straight-line tape of operations over
registers.  A register holds either a node set (one machine word) or a
binary relation (one word per source node), so graphs are limited to 64
nodes.  Every register carries a lower and an upper approximation; with a
fully specified labeling both coincide, with unknown labels they bracket
all completions, which is what the labeling search uses for pruning.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from . import ast as A

MAX_NODES = 64

(OP_TOP, OP_FALSE, OP_PROP, OP_NOT, OP_OR, OP_AND, OP_DIAM, OP_LOOP,
 OP_EDGE, OP_TEST, OP_EMPTY, OP_IDENT, OP_ALT, OP_SEQ, OP_STAR, OP_INV, OP_CAP, OP_AUTO,
 OP_SOME, OP_SNOT, OP_SOR, OP_SAND, OP_STRUE, OP_SFALSE) = range(24)

_U0 = np.uint64(0)
_U1 = np.uint64(1)


@njit(cache=True)
def _full(n):
    if n == 64:
        return ~np.uint64(0)
    return (np.uint64(1) << np.uint64(n)) - np.uint64(1)


@njit(cache=True)
def _compose(regs, dst, a, b, k, n):
    for u in range(n):
        row = regs[a, k, u]
        acc = np.uint64(0)
        w = 0
        while row != 0 and w < n:
            if (row >> np.uint64(w)) & np.uint64(1):
                acc |= regs[b, k, w]
                row &= ~(np.uint64(1) << np.uint64(w))
            w += 1
        regs[dst, k, u] = acc


@njit(cache=True)
def _auto(regs, dst, start, stop, nstates, q0, q1, tr, k, n):
    reach = np.zeros((nstates, n), dtype=np.uint64)
    for u in range(n):
        reach[q0, u] = np.uint64(1) << np.uint64(u)
    changed = True
    while changed:
        changed = False
        for t in range(start, stop):
            q = tr[t, 0]
            r = tr[t, 1]
            lab = tr[t, 2]
            for u in range(n):
                row = reach[q, u]
                if row == 0:
                    continue
                acc = np.uint64(0)
                for w in range(n):
                    if (row >> np.uint64(w)) & np.uint64(1):
                        acc |= regs[lab, k, w]
                new = reach[r, u] | acc
                if new != reach[r, u]:
                    reach[r, u] = new
                    changed = True
    for u in range(n):
        regs[dst, k, u] = reach[q1, u]


@njit(cache=True)
def execute(tape, n, edges, lab_lo, lab_hi, aut_off, aut_ns, aut_tr, regs):
    full = _full(n)
    one = np.uint64(1)
    for i in range(tape.shape[0]):
        op = tape[i, 0]
        d = tape[i, 1]
        a = tape[i, 2]
        b = tape[i, 3]
        if op == OP_TOP:
            regs[d, 0, 0] = full
            regs[d, 1, 0] = full
        elif op == OP_FALSE:
            regs[d, 0, 0] = 0
            regs[d, 1, 0] = 0
        elif op == OP_PROP:
            regs[d, 0, 0] = lab_lo[a]
            regs[d, 1, 0] = lab_hi[a]
        elif op == OP_NOT:
            lo = regs[a, 0, 0]
            regs[d, 0, 0] = full & ~regs[a, 1, 0]
            regs[d, 1, 0] = full & ~lo
        elif op == OP_OR:
            regs[d, 0, 0] = regs[a, 0, 0] | regs[b, 0, 0]
            regs[d, 1, 0] = regs[a, 1, 0] | regs[b, 1, 0]
        elif op == OP_AND:
            regs[d, 0, 0] = regs[a, 0, 0] & regs[b, 0, 0]
            regs[d, 1, 0] = regs[a, 1, 0] & regs[b, 1, 0]
        elif op == OP_DIAM:
            for k in range(2):
                s = regs[b, k, 0]
                res = np.uint64(0)
                for u in range(n):
                    if regs[a, k, u] & s:
                        res |= one << np.uint64(u)
                regs[d, k, 0] = res
        elif op == OP_LOOP:
            for k in range(2):
                res = np.uint64(0)
                for u in range(n):
                    if (regs[a, k, u] >> np.uint64(u)) & one:
                        res |= one << np.uint64(u)
                regs[d, k, 0] = res
        elif op == OP_EDGE:
            for u in range(n):
                regs[d, 0, u] = edges[a, u]
                regs[d, 1, u] = edges[a, u]
        elif op == OP_TEST:
            for k in range(2):
                s = regs[a, k, 0]
                for u in range(n):
                    bit = one << np.uint64(u)
                    regs[d, k, u] = s & bit
        elif op == OP_EMPTY:
            for u in range(n):
                regs[d, 0, u] = 0
                regs[d, 1, u] = 0
        elif op == OP_IDENT:
            for u in range(n):
                regs[d, 0, u] = one << np.uint64(u)
                regs[d, 1, u] = one << np.uint64(u)
        elif op == OP_ALT:
            for k in range(2):
                for u in range(n):
                    regs[d, k, u] = regs[a, k, u] | regs[b, k, u]
        elif op == OP_CAP:
            for k in range(2):
                for u in range(n):
                    regs[d, k, u] = regs[a, k, u] & regs[b, k, u]
        elif op == OP_SEQ:
            for k in range(2):
                _compose(regs, d, a, b, k, n)
        elif op == OP_STAR:
            for k in range(2):
                for u in range(n):
                    regs[d, k, u] = regs[a, k, u] | (one << np.uint64(u))
                for m in range(n):
                    mb = one << np.uint64(m)
                    rm = regs[d, k, m]
                    for u in range(n):
                        if regs[d, k, u] & mb:
                            regs[d, k, u] |= rm
        elif op == OP_INV:
            for k in range(2):
                for v in range(n):
                    regs[d, k, v] = 0
                for u in range(n):
                    row = regs[a, k, u]
                    ub = one << np.uint64(u)
                    for v in range(n):
                        if (row >> np.uint64(v)) & one:
                            regs[d, k, v] |= ub
        elif op == OP_AUTO:
            c = tape[i, 4]
            for k in range(2):
                _auto(regs, d, aut_off[a], aut_off[a + 1], aut_ns[a], b, c, aut_tr, k, n)
        elif op == OP_SOME:
            regs[d, 0, 0] = 1 if regs[a, 0, 0] != 0 else 0
            regs[d, 1, 0] = 1 if regs[a, 1, 0] != 0 else 0
        elif op == OP_SNOT:
            lo = regs[a, 0, 0]
            regs[d, 0, 0] = one - regs[a, 1, 0]
            regs[d, 1, 0] = one - lo
        elif op == OP_SOR:
            regs[d, 0, 0] = regs[a, 0, 0] | regs[b, 0, 0]
            regs[d, 1, 0] = regs[a, 1, 0] | regs[b, 1, 0]
        elif op == OP_SAND:
            regs[d, 0, 0] = regs[a, 0, 0] & regs[b, 0, 0]
            regs[d, 1, 0] = regs[a, 1, 0] & regs[b, 1, 0]
        elif op == OP_STRUE:
            regs[d, 0, 0] = 1
            regs[d, 1, 0] = 1
        elif op == OP_SFALSE:
            regs[d, 0, 0] = 0
            regs[d, 1, 0] = 0


@njit(cache=True)
def search(tape, n, edges, lab_lo, lab_hi, aut_off, aut_ns, aut_tr, regs, root, qprops, max_steps):
    """Depth-first search for a labeling of the ``qprops`` making ``root`` true.

    Positions are assigned node by node, each proposition false before true,
    so the first labeling found is the lexicographically least one.  Returns
    (status, steps) with status 1 = found (labels left in lab_lo), 0 = none,
    -1 = step budget exhausted.
    """
    nq = qprops.shape[0]
    total = n * nq
    full = _full(n)
    one = np.uint64(1)
    for j in range(nq):
        lab_lo[qprops[j]] = 0
        lab_hi[qprops[j]] = full
    choice = np.zeros(total + 1, dtype=np.int64)
    depth = 0  # number of assigned positions
    steps = 0
    while True:
        execute(tape, n, edges, lab_lo, lab_hi, aut_off, aut_ns, aut_tr, regs)
        steps += 1
        lo = regs[root, 0, 0]
        hi = regs[root, 1, 0]
        backtrack = False
        if hi == 0:
            backtrack = True
        elif lo != 0 or depth == total:
            for pos in range(depth, total):
                k = qprops[pos % nq]
                bit = one << np.uint64(pos // nq)
                lab_hi[k] &= ~bit
            return 1, steps
        else:
            if steps >= max_steps:
                return -1, steps
            k = qprops[depth % nq]
            bit = one << np.uint64(depth // nq)
            lab_hi[k] &= ~bit
            choice[depth] = 0
            depth += 1
        if backtrack:
            if steps >= max_steps:
                return -1, steps
            while depth > 0 and choice[depth - 1] == 1:
                depth -= 1
                k = qprops[depth % nq]
                bit = one << np.uint64(depth // nq)
                lab_lo[k] &= ~bit
                lab_hi[k] |= bit
            if depth == 0:
                return 0, steps
            pos = depth - 1
            k = qprops[pos % nq]
            bit = one << np.uint64(pos // nq)
            lab_lo[k] |= bit
            lab_hi[k] |= bit
            choice[pos] = 1


class UndeclaredSymbol(ValueError):
    pass


class ResourceLimit(RuntimeError):
    pass


class Program:
    """Compiled tape for a fixed list of root formulas.

    Structurally equal subformulas share a register.
    """

    def __init__(self, roots, quantified=()):
        self.props: dict[str, int] = {}
        self.edge_syms: dict[str, int] = {}
        self.automata: dict[str, int] = {}
        self._aut_objs: list = []
        self._aut_rows: list = []
        self._aut_ns: list = []
        self._rows: list = []
        self._keys: dict = {}
        self._memo: dict = {}
        self._keep = []  # keep roots alive so ids stay valid
        for p in quantified:
            self._prop(p)
        self.quantified = tuple(quantified)
        self.roots = [self._compile(r) for r in roots]
        tape = np.array(self._rows, dtype=np.int64).reshape(-1, 6)
        self.tape = tape
        self.nregs = len(self._rows)
        offs = [0]
        for rows in self._aut_rows:
            offs.append(offs[-1] + len(rows))
        self.aut_off = np.array(offs, dtype=np.int64)
        self.aut_ns = np.array(self._aut_ns or [0], dtype=np.int64)
        flat = [r for rows in self._aut_rows for r in rows]
        self.aut_tr = np.array(flat or [[0, 0, 0]], dtype=np.int64).reshape(-1, 3)
        self.prop_names = sorted(self.props, key=self.props.get)
        self.edge_names = sorted(self.edge_syms, key=self.edge_syms.get)
        self._keep = list(roots)

    def _prop(self, name):
        return self.props.setdefault(name, len(self.props))

    def _emit(self, op, a=0, b=0, c=0, d=0):
        key = (op, a, b, c, d)
        reg = self._keys.get(key)
        if reg is None:
            reg = len(self._rows)
            self._rows.append((op, reg, a, b, c, d))
            self._keys[key] = reg
        return reg

    def _fold(self, op, regs, unit_op):
        if not regs:
            return self._emit(unit_op)
        acc = regs[0]
        for r in regs[1:]:
            acc = self._emit(op, acc, r)
        return acc

    def _compile(self, root):
        order = A.iter_nodes(root)
        memo = self._memo
        for x in order:
            if id(x) in memo:
                continue
            self._keep.append(x)
            memo[id(x)] = self._one(x, memo)
        return memo[id(root)]

    def _one(self, x, memo):
        r = lambda y: memo[id(y)]
        if isinstance(x, A.Top):
            return self._emit(OP_TOP)
        if isinstance(x, A.Prop):
            return self._emit(OP_PROP, self._prop(x.name))
        if isinstance(x, A.Not):
            return self._emit(OP_NOT, r(x.arg))
        if isinstance(x, A.Or):
            return self._fold(OP_OR, [r(p) for p in x.parts], OP_FALSE)
        if isinstance(x, A.And):
            return self._fold(OP_AND, [r(p) for p in x.parts], OP_TOP)
        if isinstance(x, A.Diamond):
            return self._emit(OP_DIAM, r(x.path), r(x.arg))
        if isinstance(x, A.Loop):
            return self._emit(OP_LOOP, r(x.path))
        if isinstance(x, A.Edge):
            return self._emit(OP_EDGE, self.edge_syms.setdefault(x.symbol, len(self.edge_syms)))
        if isinstance(x, A.Test):
            return self._emit(OP_TEST, r(x.arg))
        if isinstance(x, A.Alt):
            return self._fold(OP_ALT, [r(p) for p in x.parts], OP_EMPTY)
        if isinstance(x, A.Seq):
            return self._fold(OP_SEQ, [r(p) for p in x.parts], OP_IDENT)
        if isinstance(x, A.Star):
            return self._emit(OP_STAR, r(x.arg))
        if isinstance(x, A.Inv):
            return self._emit(OP_INV, r(x.arg))
        if isinstance(x, A.Cap):
            return self._emit(OP_CAP, r(x.left), r(x.right))
        if isinstance(x, A.Auto):
            aut = x.automaton
            idx = self.automata.get(aut.name)
            if idx is None:
                idx = len(self._aut_objs)
                self.automata[aut.name] = idx
                self._aut_objs.append(aut)
                qi = {q: i for i, q in enumerate(aut.states)}
                self._aut_rows.append([(qi[q], qi[t], r(p)) for q, p, t in aut.transitions])
                self._aut_ns.append(len(aut.states))
            elif self._aut_objs[idx] != aut:
                raise ValueError(f"two different automata named {aut.name}")
            qi = {q: i for i, q in enumerate(aut.states)}
            return self._emit(OP_AUTO, idx, qi[x.source], qi[x.target])
        if isinstance(x, A.SomeNode):
            return self._emit(OP_SOME, r(x.arg))
        if isinstance(x, A.SentNot):
            return self._emit(OP_SNOT, r(x.arg))
        if isinstance(x, A.SentOr):
            return self._fold(OP_SOR, [r(p) for p in x.parts], OP_SFALSE)
        if isinstance(x, A.SentAnd):
            return self._fold(OP_SAND, [r(p) for p in x.parts], OP_STRUE)
        raise TypeError(f"not a formula: {x!r}")

    # -------------------------------------------------------- binding

    def bind(self, g):
        """Arrays describing graph ``g`` in this program's symbol numbering."""
        n = g.node_count
        if n > MAX_NODES:
            raise ResourceLimit(f"graphs are limited to {MAX_NODES} nodes, got {n}")
        sigma = g.node_alphabet
        gamma = g.edge_alphabet
        quant = set(self.quantified)
        clash = quant & sigma
        if clash:
            raise ValueError(f"quantified propositions {sorted(clash)} already label the graph")
        missing = [p for p in self.props if p not in sigma and p not in quant]
        if missing:
            raise UndeclaredSymbol(f"propositions not in the node alphabet: {sorted(missing)}")
        missing = [s for s in self.edge_syms if s not in gamma]
        if missing:
            raise UndeclaredSymbol(f"edge symbols not in the edge alphabet: {sorted(missing)}")
        edges = np.zeros((max(1, len(self.edge_syms)), max(1, n)), dtype=np.uint64)
        for u, s, v in g.edges:
            k = self.edge_syms.get(s)
            if k is not None:
                edges[k, u] |= np.uint64(1) << np.uint64(v)
        lab = np.zeros(max(1, len(self.props)), dtype=np.uint64)
        for u, ls in enumerate(g.labels):
            bit = np.uint64(1) << np.uint64(u)
            for p in ls:
                k = self.props.get(p)
                if k is not None:
                    lab[k] |= bit
        return edges, lab

    def new_regs(self, n):
        return np.zeros((max(1, self.nregs), 2, max(1, n)), dtype=np.uint64)

    def run(self, g, extra_labels=None):
        """Evaluate on ``g``; ``extra_labels`` maps quantified props to node sets."""
        edges, lab = self.bind(g)
        for p, nodes in (extra_labels or {}).items():
            m = np.uint64(0)
            for u in nodes:
                m |= np.uint64(1) << np.uint64(u)
            lab[self.props[p]] = m
        regs = self.new_regs(g.node_count)
        execute(self.tape, g.node_count, edges, lab, lab.copy(), self.aut_off, self.aut_ns, self.aut_tr, regs)
        return regs

    def search(self, g, root_index=0, max_steps=10**7):
        edges, lab = self.bind(g)
        lab_hi = lab.copy()
        regs = self.new_regs(g.node_count)
        qprops = np.array([self.props[p] for p in self.quantified], dtype=np.int64)
        status, steps = search(self.tape, g.node_count, edges, lab, lab_hi, self.aut_off, self.aut_ns,
                               self.aut_tr, regs, self.roots[root_index], qprops, max_steps)
        if status < 0:
            raise ResourceLimit(f"labeling search exceeded {max_steps} steps")
        if status == 0:
            return None
        out = {}
        for p in self.quantified:
            m = int(lab[self.props[p]])
            out[p] = frozenset(u for u in range(g.node_count) if (m >> u) & 1)
        return out


def node_set(regs, reg, n) -> frozenset[int]:
    m = int(regs[reg, 0, 0])
    return frozenset(u for u in range(n) if (m >> u) & 1)


def relation(regs, reg, n) -> frozenset[tuple[int, int]]:
    out = set()
    for u in range(n):
        m = int(regs[reg, 0, u])
        for v in range(n):
            if (m >> v) & 1:
                out.add((u, v))
    return frozenset(out)

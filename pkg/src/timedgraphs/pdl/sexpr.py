"""S-expression reader and printer for formulas.

Syntax::

    sentence  (E s) (not S) (or S...) (and S...) (exists (p...) S)
    state     (top) (prop NAME) (not s) (or s...) (and s...) (ex-path P [s]) (loop P)
    path      (edge SYM) (inv P) (test s) (alt P...) (seq P...) (star P)
              (cap P P) (auto NAME FROM TO)

Automata used by ``auto`` are declared by wrapping a formula in
``(automata ((NAME (states q...) (trans (q P r)...))...) FORMULA)``.
Atoms containing spaces, parentheses, quotes or ';' are written in double
quotes.
"""

from __future__ import annotations

import re

from . import ast as A


class SExprError(Exception):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class _Atom(str):
    """Atom token remembering its source position."""

    line = 0
    column = 0


class _List(list):
    line = 0
    column = 0


_PLAIN = re.compile(r'[^\s()";]+')


def _tokenize(text: str):
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
        elif ch.isspace():
            i, col = i + 1, col + 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield ch, line, col
            i, col = i + 1, col + 1
        elif ch == '"':
            j, buf = i + 1, []
            while True:
                if j >= n:
                    raise SExprError("unterminated string", line, col)
                if text[j] == "\\" and j + 1 < n:
                    buf.append(text[j + 1])
                    j += 2
                elif text[j] == '"':
                    break
                elif text[j] == "\n":
                    raise SExprError("newline inside string", line, col)
                else:
                    buf.append(text[j])
                    j += 1
            tok = _Atom("".join(buf))
            tok.line, tok.column = line, col
            yield tok, line, col
            col += j + 1 - i
            i = j + 1
        else:
            m = _PLAIN.match(text, i)
            tok = _Atom(m.group())
            tok.line, tok.column = line, col
            yield tok, line, col
            col += m.end() - i
            i = m.end()


def read(text: str):
    """Read exactly one s-expression into nested lists of atoms."""
    stack = [_List()]
    for tok, line, col in _tokenize(text):
        if tok == "(" and not isinstance(tok, _Atom):
            lst = _List()
            lst.line, lst.column = line, col
            stack.append(lst)
        elif tok == ")" and not isinstance(tok, _Atom):
            if len(stack) == 1:
                raise SExprError("unexpected ')'", line, col)
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise SExprError("missing ')'", stack[-1].line, stack[-1].column)
    if len(stack[0]) != 1:
        raise SExprError(f"expected one expression, found {len(stack[0])}", 1, 1)
    return stack[0][0]


# ---------------------------------------------------------------- to AST

def _pos(x):
    return getattr(x, "line", 0), getattr(x, "column", 0)


def _head(x, what):
    if not isinstance(x, list) or not x or not isinstance(x[0], str):
        raise SExprError(f"expected a {what}", *_pos(x))
    return x[0], x[1:]


def _atom(x, what):
    if not isinstance(x, str):
        raise SExprError(f"expected {what}", *_pos(x))
    return str(x)


def _arity(x, args, k):
    if len(args) != k:
        raise SExprError(f"'{x[0]}' takes {k} argument(s), got {len(args)}", *_pos(x))


class _Builder:
    def __init__(self):
        self.automata: dict[str, A.PathAutomaton] = {}

    def state(self, x):
        if isinstance(x, str) and x == "top":
            return A.TOP
        h, args = _head(x, "state formula")
        if h == "top":
            _arity(x, args, 0)
            return A.TOP
        if h == "prop":
            _arity(x, args, 1)
            return A.Prop(_atom(args[0], "a proposition name"))
        if h == "not":
            _arity(x, args, 1)
            return A.Not(self.state(args[0]))
        if h == "or":
            return A.Or(tuple(self.state(a) for a in args))
        if h == "and":
            return A.And(tuple(self.state(a) for a in args))
        if h == "ex-path":
            # (ex-path P) abbreviates (ex-path P (top))
            if len(args) != 1:
                _arity(x, args, 2)
            return A.Diamond(self.path(args[0]), self.state(args[1]) if len(args) == 2 else A.TOP)
        if h == "loop":
            _arity(x, args, 1)
            return A.Loop(self.path(args[0]))
        raise SExprError(f"unknown state constructor '{h}'", *_pos(x))

    def path(self, x):
        h, args = _head(x, "path expression")
        if h == "edge":
            _arity(x, args, 1)
            return A.Edge(_atom(args[0], "an edge symbol"))
        if h == "inv":
            _arity(x, args, 1)
            return A.Inv(self.path(args[0]))
        if h == "test":
            _arity(x, args, 1)
            return A.Test(self.state(args[0]))
        if h == "alt":
            return A.Alt(tuple(self.path(a) for a in args))
        if h == "seq":
            return A.Seq(tuple(self.path(a) for a in args))
        if h == "star":
            _arity(x, args, 1)
            return A.Star(self.path(args[0]))
        if h == "cap":
            _arity(x, args, 2)
            return A.Cap(self.path(args[0]), self.path(args[1]))
        if h == "auto":
            _arity(x, args, 3)
            name = _atom(args[0], "an automaton name")
            if name not in self.automata:
                raise SExprError(f"undeclared automaton '{name}'", *_pos(args[0]))
            try:
                return A.Auto(self.automata[name], _atom(args[1], "a state"), _atom(args[2], "a state"))
            except ValueError as exc:
                raise SExprError(str(exc), *_pos(x)) from None
        raise SExprError(f"unknown path constructor '{h}'", *_pos(x))

    def sentence(self, x):
        h, args = _head(x, "sentence")
        if h == "E":
            _arity(x, args, 1)
            return A.SomeNode(self.state(args[0]))
        if h == "not":
            _arity(x, args, 1)
            return A.SentNot(self.sentence(args[0]))
        if h == "or":
            return A.SentOr(tuple(self.sentence(a) for a in args))
        if h == "and":
            return A.SentAnd(tuple(self.sentence(a) for a in args))
        raise SExprError(f"unknown sentence constructor '{h}'", *_pos(x))

    def declare(self, decls):
        if not isinstance(decls, list):
            raise SExprError("expected a list of automaton declarations", *_pos(decls))
        for d in decls:
            h, args = _head(d, "automaton declaration")
            if len(args) != 2:
                raise SExprError("automaton declaration is (NAME (states ...) (trans ...))", *_pos(d))
            sh, states = _head(args[0], "(states ...)")
            th, trans = _head(args[1], "(trans ...)")
            if sh != "states" or th != "trans":
                raise SExprError("automaton declaration is (NAME (states ...) (trans ...))", *_pos(d))
            ts = []
            for t in trans:
                if not isinstance(t, list) or len(t) != 3:
                    raise SExprError("transition is (FROM PATH TO)", *_pos(t))
                ts.append((_atom(t[0], "a state"), self.path(t[1]), _atom(t[2], "a state")))
            try:
                self.automata[str(h)] = A.PathAutomaton(str(h), tuple(_atom(s, "a state") for s in states),
                                                        tuple(ts))
            except ValueError as exc:
                raise SExprError(str(exc), *_pos(d)) from None


def _unwrap(x, b: _Builder):
    while isinstance(x, list) and x and x[0] == "automata":
        if len(x) != 3:
            raise SExprError("automata wrapper is (automata (DECL...) FORMULA)", *_pos(x))
        b.declare(x[1])
        x = x[2]
    return x


def parse_sentence(text: str):
    """Parse a sentence, possibly with a leading ``exists`` block."""
    b = _Builder()
    x = _unwrap(read(text), b)
    if isinstance(x, list) and x and x[0] == "exists":
        if len(x) != 3 or not isinstance(x[1], list):
            raise SExprError("quantifier block is (exists (p...) SENTENCE)", *_pos(x))
        names = tuple(_atom(p, "a proposition name") for p in x[1])
        if len(set(names)) != len(names):
            raise SExprError("duplicate quantified proposition", *_pos(x))
        return A.Quantified(names, b.sentence(x[2]))
    return b.sentence(x)


def parse_state(text: str):
    b = _Builder()
    return b.state(_unwrap(read(text), b))


def parse_path(text: str):
    b = _Builder()
    return b.path(_unwrap(read(text), b))


# ---------------------------------------------------------------- printing

def quote(atom: str) -> str:
    if atom and _PLAIN.fullmatch(atom) and atom not in ("(", ")"):
        return atom
    return '"' + atom.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _collect_automata(root) -> list[A.PathAutomaton]:
    found: dict[str, A.PathAutomaton] = {}
    order = []
    for x in A.iter_nodes(root):
        if isinstance(x, A.Auto):
            a = x.automaton
            if a.name in found:
                if found[a.name] != a:
                    raise ValueError(f"two different automata named {a.name}")
                continue
            found[a.name] = a
            order.append(a)
    return order


def _emit(x, memo: dict) -> str:
    key = id(x)
    if key in memo:
        return memo[key]
    if isinstance(x, A.Top):
        s = "(top)"
    elif isinstance(x, A.Prop):
        s = f"(prop {quote(x.name)})"
    elif isinstance(x, (A.Not, A.SentNot)):
        s = f"(not {_emit(x.arg, memo)})"
    elif isinstance(x, (A.Or, A.SentOr)):
        s = "(or" + "".join(" " + _emit(p, memo) for p in x.parts) + ")"
    elif isinstance(x, (A.And, A.SentAnd)):
        s = "(and" + "".join(" " + _emit(p, memo) for p in x.parts) + ")"
    elif isinstance(x, A.Diamond):
        s = f"(ex-path {_emit(x.path, memo)} {_emit(x.arg, memo)})"
    elif isinstance(x, A.Loop):
        s = f"(loop {_emit(x.path, memo)})"
    elif isinstance(x, A.Edge):
        s = f"(edge {quote(x.symbol)})"
    elif isinstance(x, A.Inv):
        s = f"(inv {_emit(x.arg, memo)})"
    elif isinstance(x, A.Test):
        s = f"(test {_emit(x.arg, memo)})"
    elif isinstance(x, A.Alt):
        s = "(alt" + "".join(" " + _emit(p, memo) for p in x.parts) + ")"
    elif isinstance(x, A.Seq):
        s = "(seq" + "".join(" " + _emit(p, memo) for p in x.parts) + ")"
    elif isinstance(x, A.Star):
        s = f"(star {_emit(x.arg, memo)})"
    elif isinstance(x, A.Cap):
        s = f"(cap {_emit(x.left, memo)} {_emit(x.right, memo)})"
    elif isinstance(x, A.Auto):
        s = f"(auto {quote(x.automaton.name)} {quote(x.source)} {quote(x.target)})"
    elif isinstance(x, A.SomeNode):
        s = f"(E {_emit(x.arg, memo)})"
    elif isinstance(x, A.Quantified):
        s = "(exists (" + " ".join(quote(p) for p in x.props) + ") " + _emit(x.body, memo) + ")"
    else:
        raise TypeError(f"not a formula: {x!r}")
    memo[key] = s
    return s


def to_sexpr(root) -> str:
    """Canonical single-line text; ``parse_*`` of it gives back ``root``."""
    memo: dict = {}
    body = _emit(root, memo)
    autos = _collect_automata(root)
    if not autos:
        return body
    decls = []
    for a in autos:
        trans = " ".join(f"({quote(q)} {_emit(p, memo)} {quote(r)})" for q, p, r in a.transitions)
        decls.append(f"({quote(a.name)} (states {' '.join(quote(q) for q in a.states)}) (trans {trans}))")
    return f"(automata ({' '.join(decls)}) {body})"

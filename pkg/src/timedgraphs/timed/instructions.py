"""Instructions of timed systems and their node-label encoding.

Every instruction is normalized to one or more atoms.  Each atom has a
textual label used as a node proposition in graphs of runs:

========================  ==============================
nop                       ``nop``
write / read on ``d``     ``w(d)`` / ``r(d)``
message / event ``m``     ``m``
reset                     ``x:=0``
assignment                ``x:=y``, ``x:=d``, ``d:=x``
upper bound               ``x<=3``, ``d<2``, ``x-y<=1``, ``next_a<2``
lower bound               ``3<x``, ``2<=d-x``, ``1<next_a``
========================  ==============================

Comparisons always use ``<`` or ``<=`` with a non-negative constant; ``>``,
``>=`` and ``=`` are rewritten into lower/upper atoms.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
RESERVED = {"nop", "succ"}
DS_KINDS = ("stack", "queue")


class InstructionError(ValueError):
    pass


@dataclass(frozen=True)
class Signature:
    """Declared names of a timed system."""

    clocks: tuple = ()
    ds: tuple = ()  # (name, kind) pairs
    props: tuple = ()
    msgs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "clocks", tuple(self.clocks))
        object.__setattr__(self, "ds", tuple((str(n), str(k)) for n, k in self.ds))
        object.__setattr__(self, "props", tuple(self.props))
        object.__setattr__(self, "msgs", tuple(self.msgs))
        names = list(self.clocks) + [n for n, _ in self.ds] + list(self.props) + list(self.msgs)
        if len(set(names)) != len(names):
            raise InstructionError("clock, data-structure, event and message names must be distinct")
        for nm in names:
            if not NAME.match(nm) or nm in RESERVED or nm.startswith("next_"):
                raise InstructionError(f"invalid name {nm!r}")
        for nm, kind in self.ds:
            if kind not in DS_KINDS:
                raise InstructionError(f"data structure {nm}: kind must be stack or queue, got {kind!r}")

    @property
    def ds_names(self) -> tuple:
        return tuple(n for n, _ in self.ds)

    def ds_kind(self, name: str) -> str:
        for n, k in self.ds:
            if n == name:
                return k
        raise InstructionError(f"unknown data structure {name!r}")

    def kind_of(self, name: str) -> str:
        if name in self.clocks:
            return "clock"
        if name in self.ds_names:
            return "ds"
        if name in self.props:
            return "prop"
        if name in self.msgs:
            return "msg"
        raise InstructionError(f"undeclared name {name!r}")


# ---------------------------------------------------------------- atoms

@dataclass(frozen=True)
class Nop:
    @property
    def label(self):
        return "nop"


@dataclass(frozen=True)
class Write:
    ds: str

    @property
    def label(self):
        return f"w({self.ds})"


@dataclass(frozen=True)
class Read:
    ds: str

    @property
    def label(self):
        return f"r({self.ds})"


@dataclass(frozen=True)
class Name:
    """A message or event proposition."""

    name: str

    @property
    def label(self):
        return self.name


@dataclass(frozen=True)
class Reset:
    clock: str

    @property
    def label(self):
        return f"{self.clock}:=0"


@dataclass(frozen=True)
class Assign:
    """``dst := src`` between clocks, or between a clock and a data structure."""

    dst: str
    src: str

    @property
    def label(self):
        return f"{self.dst}:={self.src}"


@dataclass(frozen=True)
class Bound:
    """``term cmp const`` (upper) or ``const cmp term`` (lower).

    ``term`` is ``("clock", x)``, ``("age", d)``, ``("diff", a, b)`` meaning
    ``a - b``, or ``("next", e)`` for the time until the next event ``e``.
    """

    term: tuple
    cmp: str
    const: int
    upper: bool

    @property
    def term_text(self) -> str:
        t = self.term
        if t[0] == "diff":
            return f"{t[1]}-{t[2]}"
        if t[0] == "next":
            return f"next_{t[1]}"
        return t[1]

    @property
    def label(self):
        if self.upper:
            return f"{self.term_text}{self.cmp}{self.const}"
        return f"{self.const}{self.cmp}{self.term_text}"


Atom = (Nop, Write, Read, Name, Reset, Assign, Bound)


# ---------------------------------------------------------------- normalization

def _bound_atoms(term: tuple, cmp: str, c: int) -> list[Bound]:
    if cmp in ("<", "<="):
        return [Bound(term, cmp, c, True)]
    if cmp == ">":
        return [Bound(term, "<", c, False)]
    if cmp == ">=":
        return [Bound(term, "<=", c, False)]
    if cmp in ("=", "=="):
        return [Bound(term, "<=", c, True), Bound(term, "<=", c, False)]
    raise InstructionError(f"bad comparator {cmp!r}")


def make_bound(sig: Signature, names: list, cmp: str, c) -> list[Bound]:
    """Atoms for ``names[0] cmp c`` or ``names[0] - names[1] cmp c``."""
    if isinstance(c, bool) or not isinstance(c, int):
        raise InstructionError(f"constant must be an integer, got {c!r}")
    if len(names) == 1:
        nm = names[0]
        kind = sig.kind_of(nm)
        if kind == "clock":
            term = ("clock", nm)
        elif kind == "ds":
            term = ("age", nm)
        else:
            raise InstructionError(f"{nm!r} is not a clock or data structure")
        if c < 0:
            raise InstructionError(f"constant for {nm} must be non-negative")
        return _bound_atoms(term, cmp, c)
    a, b = names
    ka, kb = sig.kind_of(a), sig.kind_of(b)
    if ka not in ("clock", "ds") or kb not in ("clock", "ds"):
        raise InstructionError(f"difference {a}-{b} needs clocks or data structures")
    if ka == "ds" and kb == "ds":
        raise InstructionError(f"difference {a}-{b} of two data structures is not supported")
    if a == b:
        raise InstructionError(f"difference {a}-{b} of a name with itself")
    if c < 0:
        # a - b cmp c  <=>  -c (mirror cmp) b - a
        mirror = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "=": "=", "==": "="}
        if cmp not in mirror:
            raise InstructionError(f"bad comparator {cmp!r}")
        return _bound_atoms(("diff", b, a), mirror[cmp], -c)
    return _bound_atoms(("diff", a, b), cmp, c)


def make_next(sig: Signature, event: str, cmp: str, c) -> list[Bound]:
    if event not in sig.props:
        raise InstructionError(f"event clock on undeclared event {event!r}")
    if isinstance(c, bool) or not isinstance(c, int) or c < 0:
        raise InstructionError(f"event clock constant must be a non-negative integer, got {c!r}")
    return _bound_atoms(("next", event), cmp, c)


def parse_instruction(sig: Signature, spec: list) -> list:
    """Atoms for one JSON instruction such as ``["guard", "x", "<=", 1]``."""
    if not isinstance(spec, list) or not spec or not isinstance(spec[0], str):
        raise InstructionError(f"instruction must be a list starting with its kind, got {spec!r}")
    kind, args = spec[0], spec[1:]

    def need(k):
        if len(args) != k:
            raise InstructionError(f"{kind}: expected {k} argument(s), got {args!r}")

    if kind == "nop":
        need(0)
        return [Nop()]
    if kind in ("write", "read"):
        if len(args) not in (1, 2):
            raise InstructionError(f"{kind}: expected data structure and optional message")
        d = args[0]
        if sig.kind_of(d) != "ds":
            raise InstructionError(f"{kind}: {d!r} is not a data structure")
        out = [Write(d) if kind == "write" else Read(d)]
        if len(args) == 2:
            if args[1] not in sig.msgs:
                raise InstructionError(f"undeclared message {args[1]!r}")
            out.append(Name(args[1]))
        return out
    if kind == "reset":
        need(1)
        if sig.kind_of(args[0]) != "clock":
            raise InstructionError(f"reset: {args[0]!r} is not a clock")
        return [Reset(args[0])]
    if kind in ("guard", "age"):
        need(3)
        return make_bound(sig, [args[0]], args[1], args[2])
    if kind in ("diag", "diag-cc", "diag-cd", "diag-dc"):
        need(4)
        return make_bound(sig, [args[0], args[1]], args[2], args[3])
    if kind == "next":
        need(3)
        return make_next(sig, args[0], args[1], args[2])
    if kind in ("assign", "rename-cc", "rename-cd", "rename-dc"):
        need(2)
        dst, src = args
        kd, ks = sig.kind_of(dst), sig.kind_of(src)
        if (kd, ks) not in (("clock", "clock"), ("clock", "ds"), ("ds", "clock")):
            raise InstructionError(f"assign {dst}:={src} needs a clock on at least one side")
        return [Assign(dst, src)]
    if kind in ("prop", "event"):
        need(1)
        if args[0] not in sig.props:
            raise InstructionError(f"undeclared event {args[0]!r}")
        return [Name(args[0])]
    raise InstructionError(f"unknown instruction kind {kind!r}")


# ---------------------------------------------------------------- labels back to atoms

_TERM = r"(next_[A-Za-z_][A-Za-z0-9_]*|[A-Za-z_][A-Za-z0-9_]*-[A-Za-z_][A-Za-z0-9_]*|[A-Za-z_][A-Za-z0-9_]*)"
_UPPER = re.compile(rf"^{_TERM}(<=|<)(\d+)$")
_LOWER = re.compile(rf"^(\d+)(<=|<){_TERM}$")
_ASSIGN = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*):=([A-Za-z_][A-Za-z0-9_]*|0)$")
_RW = re.compile(r"^([wr])\(([A-Za-z_][A-Za-z0-9_]*)\)$")


def _term(sig: Signature, text: str) -> tuple:
    if text.startswith("next_") and text[5:] in sig.props:
        return ("next", text[5:])
    if "-" in text:
        a, b = text.split("-")
        return ("diff", a, b)
    k = sig.kind_of(text)
    return ("clock", text) if k == "clock" else ("age", text)


def parse_label(sig: Signature, label: str):
    """Inverse of ``atom.label``."""
    if label == "nop":
        return Nop()
    m = _RW.match(label)
    if m:
        if sig.kind_of(m.group(2)) != "ds":
            raise InstructionError(f"label {label!r} names no data structure")
        return Write(m.group(2)) if m.group(1) == "w" else Read(m.group(2))
    m = _ASSIGN.match(label)
    if m:
        return Reset(m.group(1)) if m.group(2) == "0" else Assign(m.group(1), m.group(2))
    m = _UPPER.match(label)
    if m:
        return Bound(_term(sig, m.group(1)), m.group(2), int(m.group(3)), True)
    m = _LOWER.match(label)
    if m:
        return Bound(_term(sig, m.group(3)), m.group(2), int(m.group(1)), False)
    if label in sig.props or label in sig.msgs:
        return Name(label)
    raise InstructionError(f"unrecognized label {label!r}")


@dataclass(frozen=True)
class InstructionSet:
    """Normalized atoms of one transition."""

    atoms: frozenset = field(default_factory=frozenset)

    @property
    def labels(self) -> frozenset:
        return frozenset(a.label for a in self.atoms)


def check_atoms(sig: Signature, atoms, M: int | None = None) -> list[str]:
    """Well-formedness problems of one transition's atoms."""
    problems = []
    ds_ops = [a for a in atoms if isinstance(a, (Write, Read))]
    if len(ds_ops) > 1:
        problems.append("more than one data-structure operation")
    msgs = [a for a in atoms if isinstance(a, Name) and a.name in sig.msgs]
    if msgs and not ds_ops:
        problems.append("message without a data-structure operation")
    if len(msgs) > 1:
        problems.append("more than one message")
    targets = {}
    for a in atoms:
        if isinstance(a, Reset):
            targets.setdefault(a.clock, []).append(a)
        elif isinstance(a, Assign):
            targets.setdefault(a.dst, []).append(a)
            if a.dst in sig.ds_names and Write(a.dst) not in atoms:
                problems.append(f"{a.label} without w({a.dst})")
            if a.src in sig.ds_names and Read(a.src) not in atoms:
                problems.append(f"{a.label} without r({a.src})")
        elif isinstance(a, Bound):
            if M is not None and a.const > M - 1:
                problems.append(f"constant in {a.label} exceeds M-1 = {M - 1}")
            t = a.term
            if t[0] == "age" and Read(t[1]) not in atoms:
                problems.append(f"{a.label} checks the age of {t[1]} without reading it")
            if t[0] == "diff":
                for nm in t[1:]:
                    if nm in sig.ds_names and Read(nm) not in atoms:
                        problems.append(f"{a.label} uses {nm} without reading it")
    for nm, ops in targets.items():
        if len(ops) > 1:
            problems.append(f"{nm} is assigned more than once")
    return problems

"""Timed automata over stacks and queues, their runs and run graphs."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator

from ..graphs import SUCC, LabeledGraph
from .instructions import (
    Assign, InstructionError, Name, Nop, Read, Reset, Signature, Write, check_atoms,
    parse_instruction, parse_label,
)


class SystemSpecError(ValueError):
    """Malformed system description."""


class InvalidRun(ValueError):
    pass


@dataclass(frozen=True)
class Transition:
    src: str
    atoms: frozenset
    dst: str

    @property
    def labels(self) -> frozenset:
        return frozenset(a.label for a in self.atoms)


@dataclass(frozen=True)
class TimedSystem:
    """Finite automaton whose transitions carry instruction sets.

    ``M`` bounds all constants (each is at most ``M - 1``).  With
    ``renaming`` every clock not reset or assigned by a transition is
    given an explicit identity assignment ``x:=x``.
    """

    sig: Signature
    M: int
    states: tuple
    initial: str
    finals: frozenset
    transitions: tuple
    renaming: bool = False

    @property
    def alphabet(self) -> frozenset:
        out = set(self.sig.props) | set(self.sig.msgs)
        for t in self.transitions:
            out |= t.labels
        return frozenset(out)

    def edge_alphabet(self) -> frozenset:
        return frozenset({SUCC, *self.sig.ds_names})


def _complete_identity(sig: Signature, atoms: set) -> set:
    assigned = {a.clock for a in atoms if isinstance(a, Reset)}
    assigned |= {a.dst for a in atoms if isinstance(a, Assign)}
    for x in sig.clocks:
        if x not in assigned:
            atoms.add(Assign(x, x))
    return atoms


def system_from_doc(doc: dict) -> TimedSystem:
    if not isinstance(doc, dict):
        raise SystemSpecError("system description must be a JSON object")
    try:
        sig = Signature(
            clocks=tuple(doc.get("clocks", [])),
            ds=tuple((d["name"], d.get("kind", "stack")) for d in doc.get("ds", [])),
            props=tuple(doc.get("props", [])),
            msgs=tuple(doc.get("msgs", [])),
        )
    except (KeyError, TypeError) as exc:
        raise SystemSpecError(f"bad declarations: {exc}") from None
    states = tuple(doc.get("states", []))
    if not states:
        raise SystemSpecError("no states declared")
    initial = doc.get("initial")
    if initial not in states:
        raise SystemSpecError(f"initial state {initial!r} is not declared")
    finals = frozenset(doc.get("finals", []))
    if not finals <= set(states):
        raise SystemSpecError(f"unknown final states {sorted(finals - set(states))}")
    renaming = bool(doc.get("renaming", False))
    trans = []
    max_const = 0
    for k, t in enumerate(doc.get("transitions", [])):
        try:
            src, dst = t["from"], t["to"]
            atoms = set()
            for ins in t.get("instr", []):
                atoms.update(parse_instruction(sig, ins))
        except (KeyError, TypeError) as exc:
            raise SystemSpecError(f"transition {k}: missing field {exc}") from None
        except InstructionError as exc:
            raise SystemSpecError(f"transition {k}: {exc}") from None
        if src not in states or dst not in states:
            raise SystemSpecError(f"transition {k}: unknown state")
        if renaming:
            atoms = _complete_identity(sig, atoms)
        elif any(isinstance(a, Assign) for a in atoms):
            raise SystemSpecError(f"transition {k}: assignments need \"renaming\": true")
        for a in atoms:
            if hasattr(a, "const"):
                max_const = max(max_const, a.const)
        trans.append(Transition(src, frozenset(atoms), dst))
    M = doc.get("M", max_const + 1)
    if isinstance(M, bool) or not isinstance(M, int) or M < 1:
        raise SystemSpecError(f"M must be a positive integer, got {M!r}")
    system = TimedSystem(sig, M, states, initial, finals, tuple(trans), renaming)
    problems = validate_system(system)
    if problems:
        raise SystemSpecError("; ".join(problems))
    return system


def parse_system(text: str) -> TimedSystem:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SystemSpecError(f"{exc.msg} (line {exc.lineno}, column {exc.colno})") from None
    return system_from_doc(doc)


def load_system(path) -> TimedSystem:
    with open(path) as fh:
        return parse_system(fh.read())


def validate_system(T: TimedSystem) -> list[str]:
    problems = []
    for k, t in enumerate(T.transitions):
        for p in check_atoms(T.sig, t.atoms, T.M):
            problems.append(f"transition {k}: {p}")
        if t.src == T.initial:
            missing = [x for x in T.sig.clocks if Reset(x) not in t.atoms]
            if missing or Nop() not in t.atoms:
                problems.append(f"transition {k} leaves the initial state without nop and resets of all clocks")
    return problems


# ---------------------------------------------------------------- runs

@dataclass(frozen=True)
class Run:
    """Sequence of instruction-label sets, optionally with the automaton
    states reached after each step and the transition indices taken."""

    labels: tuple
    states: tuple | None = None
    path: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(frozenset(l) for l in self.labels))

    def __len__(self):
        return len(self.labels)


def run_from_instructions(sig: Signature, steps: list, renaming: bool = False) -> Run:
    """Build a run directly from JSON-style instruction lists per position."""
    labels = []
    for k, step in enumerate(steps):
        atoms = set()
        for ins in step:
            atoms.update(parse_instruction(sig, ins))
        if renaming:
            atoms = _complete_identity(sig, atoms)
        problems = check_atoms(sig, atoms)
        if problems:
            raise InvalidRun(f"position {k}: {problems[0]}")
        labels.append(frozenset(a.label for a in atoms))
    return Run(tuple(labels))


def ds_matching(sig: Signature, labels) -> list[tuple[int, str, int]]:
    """(write position, data structure, read position) for every matched pair."""
    pending = {d: [] for d in sig.ds_names}
    out = []
    for i, ls in enumerate(labels):
        atoms = [parse_label(sig, l) for l in ls]
        msg = next((a.name for a in atoms if isinstance(a, Name) and a.name in sig.msgs), None)
        for a in atoms:
            if isinstance(a, Write):
                pending[a.ds].append((i, msg))
            elif isinstance(a, Read):
                q = pending[a.ds]
                if not q:
                    raise InvalidRun(f"position {i}: read from empty {a.ds}")
                j, m = q.pop() if sig.ds_kind(a.ds) == "stack" else q.pop(0)
                if m != msg:
                    raise InvalidRun(f"position {i}: read message {msg} but {m} was written at {j}")
                out.append((j, a.ds, i))
    left = [d for d, q in pending.items() if q]
    if left:
        raise InvalidRun(f"unread values remain in {', '.join(sorted(left))}")
    return out


def validate_sequence(sig: Signature, run: Run) -> list[str]:
    """Validity of the operation sequence alone: every read finds a value,
    nothing is left unread, and the first position starts all clocks."""
    problems = []
    if len(run) == 0:
        return ["empty run"]
    try:
        ds_matching(sig, run.labels)
    except (InvalidRun, InstructionError) as exc:
        problems.append(str(exc))
    first = run.labels[0]
    if "nop" not in first or any(f"{x}:=0" not in first for x in sig.clocks):
        problems.append("first position must contain nop and reset every clock")
    return problems


def validate_run(T: TimedSystem, run: Run) -> list[str]:
    """Problems preventing ``run`` from being an accepted run of ``T``."""
    problems = validate_sequence(T.sig, run)
    if problems == ["empty run"]:
        return problems
    # automaton path: subset construction over states
    current = {T.initial}
    for i, ls in enumerate(run.labels):
        nxt = set()
        for t in T.transitions:
            if t.src in current and t.labels == ls:
                if run.states is None or run.states[i] == t.dst:
                    nxt.add(t.dst)
        if not nxt:
            problems.append(f"position {i}: no transition matches")
            return problems
        current = nxt
    if not current & T.finals:
        problems.append("run does not end in a final state")
    return problems


def enumerate_runs(T: TimedSystem, L: int, max_runs: int | None = None) -> Iterator[Run]:
    """Accepted runs of length 1..L with valid data-structure use.

    Runs are produced by length, then lexicographically by the indices of
    the transitions taken.
    """
    sig = T.sig
    ds_index = {d: k for k, d in enumerate(sig.ds_names)}
    kinds = [sig.ds_kind(d) for d in sig.ds_names]
    info = []
    for t in T.transitions:
        op = None
        msg = next((a.name for a in t.atoms if isinstance(a, Name) and a.name in sig.msgs), None)
        for a in t.atoms:
            if isinstance(a, Write):
                op = ("w", ds_index[a.ds], msg)
            elif isinstance(a, Read):
                op = ("r", ds_index[a.ds], msg)
        info.append(op)
    empty = tuple(() for _ in sig.ds_names)
    frontier = [((), T.initial, empty)]
    count = 0
    for _length in range(1, L + 1):
        nxt = []
        for path, state, contents in frontier:
            for k, t in enumerate(T.transitions):
                if t.src != state:
                    continue
                op = info[k]
                c = contents
                if op is not None:
                    kind, d, msg = op
                    items = c[d]
                    if kind == "w":
                        items = items + (msg,)
                    else:
                        if not items:
                            continue
                        if kinds[d] == "stack":
                            if items[-1] != msg:
                                continue
                            items = items[:-1]
                        else:
                            if items[0] != msg:
                                continue
                            items = items[1:]
                    c = c[:d] + (items,) + c[d + 1:]
                nxt.append((path + (k,), t.dst, c))
        for path, state, contents in nxt:
            if state in T.finals and all(not x for x in contents):
                yield Run(tuple(T.transitions[k].labels for k in path),
                          tuple(T.transitions[k].dst for k in path), path)
                count += 1
                if max_runs is not None and count >= max_runs:
                    return
        frontier = nxt


def build_T_graph(run: Run, system_or_sig) -> LabeledGraph:
    """Graph of a run: successor chain plus one edge per matched write/read."""
    if isinstance(system_or_sig, TimedSystem):
        sig = system_or_sig.sig
        sigma = system_or_sig.alphabet
    else:
        sig = system_or_sig
        sigma = None
    n = len(run)
    edges = {(i, SUCC, i + 1) for i in range(n - 1)}
    for j, d, i in ds_matching(sig, run.labels):
        edges.add((j, d, i))
    return LabeledGraph(n, run.labels, frozenset(edges), sigma, frozenset({SUCC, *sig.ds_names}))


def with_states(g: LabeledGraph, run: Run, prefix: str = "at:") -> LabeledGraph:
    """Add the automaton state of each position as a label ``at:<state>``."""
    if run.states is None:
        raise InvalidRun("run carries no states")
    labels = tuple(l | {prefix + s} for l, s in zip(g.labels, run.states))
    sigma = None if g.sigma is None else g.sigma | {prefix + s for s in run.states}
    return LabeledGraph(g.node_count, labels, g.edges, sigma, g.gamma)

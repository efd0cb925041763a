"""Formulas describing the runs of a timed system.

The automaton part guesses a state and an instruction set per position
(propositions ``at:<state>`` and the instruction labels themselves) and
checks that consecutive positions follow transitions and that the
data-structure edges obey their policies.  Combined with the realizability
formula translated through the timing interpretation, it characterizes the
unlabeled graphs of feasible runs.
"""

from __future__ import annotations

from functools import lru_cache

from ..graphs import SUCC
from ..pdl.ast import (
    TOP, Loop, Quantified, SentNot, Test, alt, conj, diamond, disj, edge, everywhere, iff, implies, inv,
    neg, nowhere, plus, prop, sent_and, seq, star, symbols,
)
from ..pdl.semantics import Interpretation, backward_translate
from ..timed.instructions import Read, Write
from ..timed.system import TimedSystem
from .realizability import gen_mixed_realizability, residue_props
from .timing import gen_timing_interpretation

STATE_PREFIX = "at:"
RESIDUE_PREFIX = "tsm:"


class SpecError(ValueError):
    """A specification uses symbols it may not."""


def state_props(T: TimedSystem) -> tuple:
    return tuple(STATE_PREFIX + q for q in T.states)


def instruction_alphabet(T: TimedSystem) -> tuple:
    """Every label that may occur on a position of a run of ``T``."""
    out = set(T.alphabet)
    for d in T.sig.ds_names:
        out |= {Write(d).label, Read(d).label}
    return tuple(sorted(out))


def _exact(labels, sigma, cache):
    key = frozenset(labels)
    if key not in cache:
        cache[key] = conj(*[prop(r) if r in key else neg(prop(r)) for r in sigma])
    return cache[key]


def _unique_state(T):
    qs = [prop(q) for q in state_props(T)]
    return everywhere(disj(*[conj(q, *[neg(o) for o in qs if o is not q]) for q in qs]))


def _transitions(T, sigma):
    at = {q: prop(STATE_PREFIX + q) for q in T.states}
    back = inv(edge(SUCC))
    cache = {}
    inner = disj(*[conj(at[t.dst], diamond(back, at[t.src]), _exact(t.labels, sigma, cache))
                   for t in T.transitions])
    first = disj(*[conj(at[t.dst], _exact(t.labels, sigma, cache))
                   for t in T.transitions if t.src == T.initial])
    last = disj(*[at[q] for q in T.states if q in T.finals])
    return sent_and(
        everywhere(implies(diamond(back), inner)),
        everywhere(implies(neg(diamond(back)), first)),
        everywhere(implies(neg(diamond(edge(SUCC))), last)),
    )


def _data_structures(T):
    succ = edge(SUCC)
    parts = []
    for d, kind in T.sig.ds:
        w, r, e = prop(Write(d).label), prop(Read(d).label), edge(d)
        if kind == "stack":
            nest = star(alt(seq(e, succ), seq(Test(neg(disj(w, r))), succ)))
            parts.append(everywhere(implies(w, Loop(seq(succ, nest, inv(e))))))
        else:
            parts.append(nowhere(Loop(seq(plus(succ), e, plus(succ), inv(e)))))
    for d in T.sig.ds_names:
        e = edge(d)
        bad = alt(seq(plus(succ), e), seq(plus(succ), inv(e), e), seq(plus(succ), e, inv(e)))
        parts.append(nowhere(Loop(bad)))
        parts.append(everywhere(iff(prop(Write(d).label), diamond(e))))
        parts.append(everywhere(iff(prop(Read(d).label), diamond(inv(e)))))
    return sent_and(*parts) if parts else everywhere(TOP)


def _single_access(T):
    ops = {d: disj(prop(Write(d).label), prop(Read(d).label)) for d in T.sig.ds_names}
    parts = []
    names = T.sig.ds_names
    for d in names:
        parts.append(nowhere(conj(prop(Write(d).label), prop(Read(d).label))))
        for d2 in names:
            if d2 != d:
                parts.append(nowhere(conj(ops[d], ops[d2])))
    return sent_and(*parts) if parts else everywhere(TOP)


def _messages(T):
    msgs = T.sig.msgs
    if not msgs:
        return everywhere(TOP)
    parts = []
    for d in T.sig.ds_names:
        e = edge(d)
        same = conj(*[iff(prop(m), diamond(e, prop(m))) for m in msgs])
        parts.append(everywhere(implies(prop(Write(d).label), same)))
    access = disj(*[disj(prop(Write(d).label), prop(Read(d).label)) for d in T.sig.ds_names])
    for m in msgs:
        others = [neg(prop(o)) for o in msgs if o != m]
        parts.append(everywhere(implies(prop(m), conj(*others, access))))
    return sent_and(*parts)


def system_matrix(T: TimedSystem):
    """Unquantified body over state and instruction propositions."""
    sigma = instruction_alphabet(T)
    return sent_and(_unique_state(T), _transitions(T, sigma), _data_structures(T),
                    _single_access(T), _messages(T))


@lru_cache(maxsize=32)
def gen_system_formula(T: TimedSystem) -> Quantified:
    """Sentence true on an unlabeled linear graph iff it is the graph of some
    run of ``T`` (timing ignored)."""
    return Quantified(state_props(T) + instruction_alphabet(T), system_matrix(T))


def timing_matrix(T: TimedSystem, features=None):
    """The mixed realizability body with residues renamed and weighted edges
    replaced by their meaning in run graphs."""
    real = gen_mixed_realizability(T.M)
    interp = gen_timing_interpretation(T.sig, T.M, features=features,
                                       alphabet=instruction_alphabet(T), renaming=T.renaming)
    renamed = {p: prop(RESIDUE_PREFIX + p[1:]) for p in residue_props(T.M)}
    return backward_translate(real.body, Interpretation(renamed, interp.edges))


def _residues(T):
    return tuple(RESIDUE_PREFIX + str(i) for i in range(T.M))


def _quantified(T):
    return state_props(T) + instruction_alphabet(T) + _residues(T)


@lru_cache(maxsize=32)
def gen_emptiness_formula(T: TimedSystem, features=None) -> Quantified:
    """Sentence true on an unlabeled linear graph iff it is the graph of a
    feasible run of ``T``."""
    return Quantified(_quantified(T), sent_and(system_matrix(T), timing_matrix(T, features)))


@lru_cache(maxsize=32)
def gen_run_feasibility_formula(T: TimedSystem, features=None) -> Quantified:
    """Same body as the emptiness formula, with instruction labels taken
    from the graph: true on the graph of a run of ``T`` iff it is feasible."""
    return Quantified(state_props(T) + _residues(T), sent_and(system_matrix(T), timing_matrix(T, features)))


def check_spec(T: TimedSystem, spec) -> None:
    props, edges = symbols(spec)
    bad = sorted(props - set(T.sig.props))
    if bad:
        raise SpecError(f"specification may only use the system's propositions, found {bad}")
    bad = sorted(edges - {SUCC, *T.sig.ds_names})
    if bad:
        raise SpecError(f"specification may only use succ and data-structure edges, found {bad}")
    if isinstance(spec, Quantified):
        raise SpecError("specification must be an unquantified sentence")


def gen_modelcheck_formula(T: TimedSystem, spec, features=None) -> Quantified:
    """Sentence true on an unlabeled linear graph iff it is the graph of a
    feasible run of ``T`` whose propositions violate ``spec``."""
    check_spec(T, spec)
    body = sent_and(system_matrix(T), timing_matrix(T, features), SentNot(spec))
    return Quantified(_quantified(T), body)

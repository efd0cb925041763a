"""Propositional dynamic logic with converse, intersection and loops."""

from .ast import *  # noqa: F401,F403
from .semantics import (  # noqa: F401
    Interpretation, ResourceLimit, UndeclaredSymbol, apply_interpretation, backward_translate,
    compile_formula, eval_eq, eval_path, eval_sentence, eval_state,
)
from .sexpr import SExprError, parse_path, parse_sentence, parse_state, to_sexpr  # noqa: F401

"""Timed systems over stacks and queues."""

from .constraints import (  # noqa: F401
    build_weighted_graph, check_run_timing, constraint_edges, feasible, last_reset, origin_of,
    run_weighted_graph, track_origin, value_origins,
)
from .instructions import InstructionError, Signature, parse_instruction, parse_label  # noqa: F401
from .system import (  # noqa: F401
    InvalidRun, Run, SystemSpecError, TimedSystem, build_T_graph, ds_matching, enumerate_runs,
    load_system, parse_system, run_from_instructions, system_from_doc, validate_run, validate_sequence, with_states,
)

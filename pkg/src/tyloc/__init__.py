"""Type error localization via weighted MaxSMT."""
from .constraints import TypingEnv, infer_constraints, load_prelude
from .encoder import assign_weights, build_forest, encode, encode_deep, encode_flat
from .frontend import SourceRange, node_ranges, parse
from .ir import IrDoc, LocEntry, parse_ir, print_ir
from .oracle import brute_force_min_sources, classical_infer, expand, satisfiable
from .pipeline import Report, localize_ir, localize_source, program_to_ir, source_to_ir
from .solver import ErrorSource, SolverConfig, parse_result, run_solver, solve

__version__ = "0.1.0"

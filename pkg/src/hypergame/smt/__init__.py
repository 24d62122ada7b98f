"""SMT-LIB encoding of model checking over probabilistic strategies."""
from .encoder import Block, Encoder, ScopeInfo, SmtScript, emit_smtlib, encode, parse_smtlib
from .sexpr import SexprError, dumps, loads, loads_all
from .solver import (ENV_VAR, Sat, SolverCrashed, SolverError, SolverNotFound, SolverStatus, Unknown,
                     UnparseableOutput, Unsat, configured_solver, parse_status, solve_external)

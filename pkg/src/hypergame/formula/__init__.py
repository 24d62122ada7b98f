"""Formula syntax: tree, parser, printer, desugaring, checks and types."""
from .ast import *  # noqa: F401,F403
from .ast import children, split_prefix, support, walk  # noqa: F401
from .desugar import desugar, is_core  # noqa: F401
from .parser import ParseError, StateQuantNotPrefix, parse_formula, parse_prob_expr, tokenize  # noqa: F401
from .phtype import HasStateQuantifier, PhType, compute_ph_type  # noqa: F401
from .printer import pretty  # noqa: F401
from .wellformed import NotWellFormed, Violation, WellFormedness, check_well_formed, require_well_formed  # noqa: F401

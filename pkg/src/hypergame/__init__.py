"""Model checking of hyper-properties over turn-based stochastic games."""
from .game import (Dtmc, StrategyAutomaton, Tsg, compose_dtmcs, enumerate_kmem_det_strategies,  # noqa: F401
                   enumerate_md_strategies, induce_dtmc, make_game, restrict_strategy, update_strategy,
                   validate_tsg)
from .modelfile import load_model, loads_model  # noqa: F401
from .formula import parse_formula, pretty  # noqa: F401

__version__ = "0.1.0"

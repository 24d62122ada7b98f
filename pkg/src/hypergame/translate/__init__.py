"""Translations from PATL, PATL-1NE, HyperPCTL and HyperSL into HyperSt²."""
from .hyperpctl import BoundedUntilUnsupported, translate_hyperpctl
from .hypersl import (DependencyInfo, DuplicateBinding, HyperSLError, NonUniqueAgent,
                      compute_dependency_info, parse_hypersl, ref_var, translate_hypersl)
from .patl import (NestedNE, PatlError, QuantifierInObjective, UnsupportedConstruct, parse_patl,
                   parse_patl_path, translate_patl, translate_patl_1ne, translate_swsp_ne)


class MissingInitLabel(ValueError):
    pass


def require_init_label(game, label: str = "init") -> None:
    """Translated formulas start from states labelled ``init``; fail early if there are none."""
    if not any(label in labels for labels in game.labels):
        raise MissingInitLabel(f"no state carries the label {label!r}")

import os
import shutil
import sys
from contextlib import contextmanager
from pathlib import Path

import pytest

sys.path.insert(0, os.path.dirname(__file__))

ROOT = Path(__file__).resolve().parent.parent
MODELS = ROOT / "models"

_LINES = []


@pytest.fixture
def models_dir():
    return MODELS


@pytest.fixture
def gpq():
    from hypergame import load_model
    return load_model(MODELS / "gpq.tsg")


@pytest.fixture
def coin():
    from hypergame import load_model
    return load_model(MODELS / "coin.tsg")


def solver_command():
    """Configured solver, else z3 from PATH, else None."""
    from hypergame.smt import configured_solver
    cmd = configured_solver()
    if cmd:
        return cmd
    if shutil.which("z3"):
        return "z3 -smt2 {file}"
    return None


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion."""

    @contextmanager
    def run(number, title):
        info = {}
        try:
            yield info
        except BaseException as exc:
            if isinstance(exc, pytest.skip.Exception):
                _LINES.append((number, "SKIP", title, str(exc)))
            else:
                _LINES.append((number, "FAIL", title, f"{type(exc).__name__}: {exc}"[:300]))
            raise
        _LINES.append((number, "PASS", title, info.get("detail", "")))

    return run


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, status, title, detail in sorted(_LINES):
        line = f"[{status}] {number}. {title}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)

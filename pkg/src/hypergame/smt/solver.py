"""Run an external SMT-LIB solver on an encoded script."""
from __future__ import annotations

import enum
import os
import shlex
import shutil
import subprocess
import tempfile
from typing import Optional

from .encoder import SmtScript, emit_smtlib

ENV_VAR = "HYPERGAME_SOLVER"


class SolverError(RuntimeError):
    pass


class SolverNotFound(SolverError):
    pass


class SolverCrashed(SolverError):
    def __init__(self, stderr: str, returncode: Optional[int] = None):
        self.stderr = stderr
        self.returncode = returncode
        super().__init__(f"solver failed (exit {returncode}): {stderr.strip()[:500]}")


class UnparseableOutput(SolverError):
    pass


class SolverStatus(enum.Enum):
    SAT = "sat"
    UNSAT = "unsat"
    UNKNOWN = "unknown"

    def __str__(self):
        return self.value


Sat, Unsat, Unknown = SolverStatus.SAT, SolverStatus.UNSAT, SolverStatus.UNKNOWN


def configured_solver() -> Optional[str]:
    cmd = os.environ.get(ENV_VAR, "").strip()
    return cmd or None


def _argv(command: str, path: str):
    parts = shlex.split(command)
    if not parts:
        raise SolverNotFound("empty solver command")
    if any("{file}" in p for p in parts):
        parts = [p.replace("{file}", path) for p in parts]
    else:
        parts.append(path)
    return parts


def parse_status(stdout: str) -> SolverStatus:
    for tok in stdout.split():
        tok = tok.strip("()")
        if tok in ("sat", "unsat", "unknown"):
            return SolverStatus(tok)
        if tok == "timeout":
            return Unknown
    raise UnparseableOutput(f"no status in solver output: {stdout.strip()[:200]!r}")


def solve_external(script, command: Optional[str] = None, timeout: Optional[float] = None) -> SolverStatus:
    """Write ``script`` to a temporary file and run ``command`` on it.

    ``command`` is a command line with ``{file}`` where the path goes (it is
    appended when absent); it defaults to ``$HYPERGAME_SOLVER``.
    """
    command = command or configured_solver()
    if not command:
        raise SolverNotFound(f"no solver configured; pass a command or set {ENV_VAR}")
    text = script if isinstance(script, str) else emit_smtlib(script)
    fd, path = tempfile.mkstemp(prefix="hypergame-", suffix=".smt2")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        argv = _argv(command, path)
        if shutil.which(argv[0]) is None:
            raise SolverNotFound(f"solver executable {argv[0]!r} not found")
        try:
            proc = subprocess.run(argv, capture_output=True, text=True, timeout=timeout)
        except subprocess.TimeoutExpired:
            return Unknown
        except OSError as e:
            raise SolverNotFound(str(e)) from e
        try:
            return parse_status(proc.stdout)
        except UnparseableOutput:
            if proc.returncode != 0:
                raise SolverCrashed(proc.stderr or proc.stdout, proc.returncode)
            raise
    finally:
        try:
            os.unlink(path)
        except OSError:
            pass

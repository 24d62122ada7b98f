"""Command-line front end.

Exit codes: 0 true / success, 1 false, 2 error.  ``--json`` switches every
subcommand to a single JSON object on stdout (schemas in ``schemas/``).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from typing import List, Optional

from . import __version__
from .checker import EvalContext, StrategyClass, StrategyLimitExceeded, check, eval_prob_expr
from .formula import (HasStateQuantifier, NotWellFormed, ParseError, check_well_formed, compute_ph_type,
                      parse_formula, parse_prob_expr, pretty, split_prefix, support)
from .game import ModelError, StrategyAutomaton
from .modelfile import load_model, loads_model

EXIT_TRUE, EXIT_FALSE, EXIT_ERROR = 0, 1, 2


class UsageError(ValueError):
    pass


def _read_text(arg: str) -> str:
    """``-`` reads stdin, an existing path reads the file, anything else is inline text."""
    if arg == "-":
        return sys.stdin.read()
    if os.path.isfile(arg):
        with open(arg) as fh:
            return fh.read()
    return arg


def _model(path: str):
    if path == "-":
        return loads_model(sys.stdin.read())
    return load_model(path)


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}")


def _error_json(command, exc) -> dict:
    err = {"kind": type(exc).__name__, "message": str(exc)}
    line = getattr(exc, "line", None)
    if line is not None:
        err["line"] = line
        col = getattr(exc, "col", None)
        if col is not None:
            err["column"] = col
    if isinstance(exc, NotWellFormed):
        err["violations"] = [v.to_json() for v in exc.report.violations]
    return {"command": command, "error": err}


# subcommands ---------------------------------------------------------------


def cmd_check(args):
    game = _model(args.model)
    f = parse_formula(_read_text(args.formula))
    cls = StrategyClass.parse(args.strategy_class)
    t0 = time.perf_counter()
    res = check(game, f, cls, jobs=args.jobs, max_strategies=args.max_strategies)
    out = res.to_json()
    out.update({"command": "check", "class": str(cls), "elapsed_s": time.perf_counter() - t0})
    lines = ["true" if res.verdict else "false"]
    for w in res.witnesses:
        if w["kind"] == "state":
            lines.append(f"  {w['var']} = {w['state']}")
        else:
            lines.append(f"  E{{{','.join(map(str, w['agents']))}}}[{', '.join(w['vars'])}]: "
                         f"{json.dumps(w['strategy'], sort_keys=True)}")
    return (EXIT_TRUE if res.verdict else EXIT_FALSE), out, "\n".join(lines)


def _encode(args):
    from .smt import emit_smtlib, encode
    game = _model(args.model)
    f = parse_formula(_read_text(args.formula))
    if args.memory < 1:
        raise UsageError("--memory must be at least 1")
    script = encode(game, f, args.memory, args.deterministic)
    return script, emit_smtlib(script)


def cmd_encode(args):
    script, text = _encode(args)
    out = {"command": "encode", "logic": script.logic, "declarations": len(script.decls),
           "assertions": len(script.assertions), "blocks": len(script.blocks), "path": args.smt2}
    if args.smt2 and args.smt2 != "-":
        with open(args.smt2, "w") as fh:
            fh.write(text)
        human = f"wrote {args.smt2}"
    else:
        human = text.rstrip("\n")
        out["smtlib"] = text
    return EXIT_TRUE, out, human


def cmd_solve(args):
    from .smt import Sat, Unsat, solve_external
    script, text = _encode(args)
    if args.smt2:
        with open(args.smt2, "w") as fh:
            fh.write(text)
    status = solve_external(text, args.solver, args.solver_timeout)
    verdict = True if status is Sat else False if status is Unsat else None
    out = {"command": "solve", "status": str(status), "verdict": verdict, "memory": args.memory,
           "deterministic": args.deterministic}
    code = EXIT_TRUE if verdict else EXIT_FALSE if verdict is False else EXIT_ERROR
    return code, out, str(status)


def cmd_translate(args):
    from . import translate as tr
    src = _read_text(args.source)
    game = _model(args.model) if args.model else None
    agents = args.agents or (game.num_agents if game else None)
    kind = args.source_logic
    if game is not None and kind != "hyperpctl":
        tr.require_init_label(game)
    if kind == "hyperpctl":
        f = tr.translate_hyperpctl(src)
        agents = 1
    elif kind == "hypersl":
        f = tr.translate_hypersl(src)
        agents = agents or tr.compute_dependency_info(src).num_agents
    else:
        if agents is None:
            raise UsageError("--agents or --model is needed for this translation")
        eps = _frac(args.epsilon)
        if kind == "patl":
            f = tr.translate_patl(src, agents)
        elif kind == "patl-1ne":
            f = tr.translate_patl_1ne(src, agents, eps)
        else:
            ne = tr.parse_patl(src)
            if not isinstance(ne, tr.patl.PNash):
                raise UsageError("swsp-ne expects a single <<C:C'>>max~x (P[..] + P[..]) formula")
            f = tr.translate_swsp_ne(ne.first, ne.second, ne.coalition, ne.op, ne.bound, eps, agents)
    text = pretty(f)
    wf = check_well_formed(f, agents, strict=False)
    out = {"command": "translate", "from": kind, "formula": text, "agents": agents,
           "well_formed": wf.ok, "violations": [v.to_json() for v in wf.violations]}
    return EXIT_TRUE, out, text


def _assignments(pairs: List[str], what: str):
    out = {}
    for p in pairs or []:
        if "=" not in p:
            raise UsageError(f"{what} must look like name=value, got {p!r}")
        k, v = p.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def cmd_simulate(args):
    from .oracles import monte_carlo_prob
    game = _model(args.model)
    expr = parse_prob_expr(_read_text(args.expr))
    at = _assignments(args.at, "--at")
    names = sorted(support(expr))
    for v in names:
        if v not in at:
            init = game.state_with_label("init")
            if not init:
                raise UsageError(f"no --at for {v!r} and no state labelled init")
            at[v] = init[0]
    for v, s in at.items():
        if s not in game.index:
            raise UsageError(f"unknown state {s!r} for {v!r}")
    strat = StrategyAutomaton.from_choices(game, game.agents, _assignments(args.choice, "--choice"))
    strategies = {(v, g): strat for v in at for g in game.agents}
    ctx = EvalContext.create(game, at, strategies)
    if args.samples < 1:
        from .oracles import NonPositiveSamples
        raise NonPositiveSamples("samples must be positive")
    res = monte_carlo_prob(ctx, expr, samples=args.samples, seed=args.seed, horizon=args.horizon,
                           jobs=args.jobs)
    out = res.to_json()
    out["command"] = "simulate"
    human = f"estimate {res.estimate:.6f} +- {res.half_width:.6f} (seed {res.seed}, truncated {res.truncated})"
    if args.exact:
        exact = eval_prob_expr(ctx, expr)
        out["exact"] = str(exact)
        human += f"\nexact {exact}"
    return EXIT_TRUE, out, human


def cmd_nash(args):
    from .oracles import NeQuery, nash_report, swsp_report
    from .translate.patl import embed_path
    game = _model(args.model)
    start = args.start or (game.state_with_label("init") or [None])[0]
    if start is None:
        raise UsageError("--start is required when no state is labelled init")
    coalition = tuple(int(a) for a in args.coalition.split(",") if a.strip())
    objs = tuple(embed_path(o, "x", game.num_agents) for o in args.objectives)
    q = NeQuery(game, start, coalition, objs, _frac(args.epsilon), args.relation, _frac(args.bound))
    rep = swsp_report(q) if args.swsp else nash_report(q)
    out = dict(rep)
    out.update({"command": "nash-oracle", "query": "swsp-ne" if args.swsp else "ne", "start": start})
    return (EXIT_TRUE if rep["verdict"] else EXIT_FALSE), out, "true" if rep["verdict"] else "false"


def cmd_type(args):
    f = parse_formula(_read_text(args.formula))
    prefix, matrix = split_prefix(f)
    t = compute_ph_type(matrix)
    out = {"command": "type", "type": str(t), "ascii": t.ascii, "shape": t.shape, "level": t.level,
           "prefix": [v for _, v in prefix]}
    return EXIT_TRUE, out, str(t)


def cmd_validate(args):
    diags = []
    out = {"command": "validate", "ok": True, "diagnostics": diags}
    game = None
    try:
        game = _model(args.model)
        out["model"] = {"states": len(game.states), "agents": game.num_agents,
                        "actions": len(game.actions)}
    except ModelError as e:
        diags.append({"source": "model", "kind": type(e).__name__, "message": str(e),
                      **({"line": e.line} if getattr(e, "line", None) else {})})
    if args.formula:
        try:
            f = parse_formula(_read_text(args.formula))
            if game is not None:
                for v in check_well_formed(f, game.num_agents, strict=not args.weak).violations:
                    d = v.to_json()
                    d.update({"source": "formula", "kind": d.pop("code")})
                    diags.append(d)
        except ParseError as e:
            diags.append({"source": "formula", "kind": type(e).__name__, "message": e.msg,
                          "line": e.line, "column": e.col})
    out["ok"] = not diags
    human = "ok" if not diags else "\n".join(
        f"{d['source']}: {d['kind']}: {d['message']}" for d in diags)
    return (EXIT_TRUE if not diags else EXIT_ERROR), out, human


# parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hypergame", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="decide a formula on a game")
    p.add_argument("model")
    p.add_argument("formula", help="file, inline text, or - for stdin")
    p.add_argument("--class", dest="strategy_class", default="md", help="md or kmem:K")
    p.add_argument("--max-strategies", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_check)

    for name, func in (("encode", cmd_encode), ("solve", cmd_solve)):
        p = sub.add_parser(name, parents=[common], help=f"{name} the SMT-LIB query")
        p.add_argument("model")
        p.add_argument("formula")
        p.add_argument("--memory", type=int, default=1)
        p.add_argument("--deterministic", action="store_true")
        p.add_argument("--smt2", default=None, help="write the SMT-LIB text here")
        if name == "solve":
            p.add_argument("--solver", default=None, help='command line, e.g. "z3 {file}"')
            p.add_argument("--solver-timeout", type=float, default=None)
        p.set_defaults(func=func)

    p = sub.add_parser("translate", parents=[common], help="translate another logic")
    p.add_argument("--from", dest="source_logic", required=True,
                   choices=["patl", "swsp-ne", "patl-1ne", "hyperpctl", "hypersl"])
    p.add_argument("source")
    p.add_argument("--agents", type=int, default=None)
    p.add_argument("--model", default=None, help="game used for the agent count and init check")
    p.add_argument("--epsilon", default="0")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo estimate of P(path)")
    p.add_argument("model")
    p.add_argument("expr", help="probability expression such as 'P(F goal(x))'")
    p.add_argument("--at", action="append", help="var=state (default: the init state)")
    p.add_argument("--choice", action="append", help="state=action for the joint strategy")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--exact", action="store_true", help="also report the exact value")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("nash-oracle", parents=[common], help="brute-force equilibrium check (MD)")
    p.add_argument("model")
    p.add_argument("--coalition", required=True, help="comma-separated agents")
    p.add_argument("--objectives", nargs=2, required=True, metavar="PATH",
                   help="PATL path formulas for the coalition and the others")
    p.add_argument("--start", default=None)
    p.add_argument("--epsilon", default="0")
    p.add_argument("--swsp", action="store_true", help="social-welfare subgame-perfect query")
    p.add_argument("--relation", default=">=")
    p.add_argument("--bound", default="0")
    p.set_defaults(func=cmd_nash)

    p = sub.add_parser("type", parents=[common], help="polynomial-hierarchy type")
    p.add_argument("formula")
    p.set_defaults(func=cmd_type)

    p = sub.add_parser("validate", parents=[common], help="model and formula diagnostics")
    p.add_argument("model")
    p.add_argument("formula", nargs="?")
    p.add_argument("--weak", action="store_true", help="weak form of the probability-coverage check")
    p.set_defaults(func=cmd_validate)
    return ap


def run(argv: Optional[List[str]] = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:  # argparse reports usage errors itself
        return EXIT_ERROR if e.code else EXIT_TRUE
    try:
        code, out, human = args.func(args)
    except (ParseError, ModelError, NotWellFormed, StrategyLimitExceeded, HasStateQuantifier,
            UsageError, ValueError, RuntimeError, OSError, KeyError) as e:
        if args.json:
            print(json.dumps(_error_json(args.command, e), sort_keys=True), file=stdout)
        else:
            print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR
    if args.json:
        print(json.dumps(out, sort_keys=True, default=str), file=stdout)
    else:
        print(human, file=stdout)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

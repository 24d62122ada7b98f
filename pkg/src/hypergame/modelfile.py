"""Plain-text game files.

    # comment
    agents 2
    state s0 agent=1 labels=init,p
    state s1 agent=2 labels=-
    trans s0 a s1 1/2
    trans s0 a s0 0.5

Probabilities are ``p/q`` or decimals and are read exactly.
"""
from __future__ import annotations

from fractions import Fraction
from pathlib import Path

from .game import BadProbability, ModelError, RawModel, RawState, RawTransition, Tsg, validate_tsg


def _kv(tok: str, key: str, lineno: int) -> str:
    if not tok.startswith(key + "="):
        raise ModelError(f"expected {key}=..., got {tok!r}", lineno)
    return tok[len(key) + 1:]


def parse_model(text: str) -> RawModel:
    agents = None
    states = []
    transitions = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        kw = toks[0]
        if kw == "agents":
            if len(toks) != 2 or not toks[1].isdigit():
                raise ModelError("expected 'agents <k>'", lineno)
            if agents is not None:
                raise ModelError("agent count given twice", lineno)
            agents = int(toks[1])
        elif kw == "state":
            if len(toks) not in (3, 4):
                raise ModelError("expected 'state <name> agent=<i> [labels=...]'", lineno)
            agent = _kv(toks[2], "agent", lineno)
            if not agent.lstrip("-").isdigit():
                raise ModelError(f"bad agent {agent!r}", lineno)
            labels = ()
            if len(toks) == 4:
                lab = _kv(toks[3], "labels", lineno)
                if lab != "-":
                    labels = tuple(x for x in lab.split(",") if x)
            states.append(RawState(toks[1], int(agent), labels, lineno))
        elif kw == "trans":
            if len(toks) != 5:
                raise ModelError("expected 'trans <s> <a> <t> <prob>'", lineno)
            try:
                p = Fraction(toks[4])
            except (ValueError, ZeroDivisionError):
                raise BadProbability(f"cannot read probability {toks[4]!r}", lineno) from None
            transitions.append(RawTransition(toks[1], toks[2], toks[3], p, lineno))
        else:
            raise ModelError(f"unknown directive {kw!r}", lineno)
    if agents is None:
        raise ModelError("missing 'agents <k>' line")
    return RawModel(agents, states, transitions)


def loads_model(text: str) -> Tsg:
    return validate_tsg(parse_model(text))


def load_model(path) -> Tsg:
    return loads_model(Path(path).read_text())


def dumps_model(game: Tsg) -> str:
    lines = [f"agents {game.num_agents}"]
    for i, s in enumerate(game.states):
        labs = ",".join(sorted(game.labels[i])) or "-"
        lines.append(f"state {s} agent={game.owner[i]} labels={labs}")
    for i, s in enumerate(game.states):
        for a, row in game.succ[i].items():
            for j, p in row:
                lines.append(f"trans {s} {a} {game.states[j]} {p}")
    return "\n".join(lines) + "\n"

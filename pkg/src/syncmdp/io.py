"""JSON model, automaton and strategy formats, and CSV traces.

Probabilities are written as "num/den" strings so no binary float ever
appears in a file.
"""

from __future__ import annotations

import csv
import json
from fractions import Fraction
from typing import IO, Any

from .afa import Afa
from .mdp import Mdp, check_distribution, validate
from .strategy import EpsilonSchedule, Segment, Transducer


def fmt(p: Fraction) -> str:
    p = Fraction(p)
    return f"{p.numerator}/{p.denominator}"


def parse_fraction(s: Any) -> Fraction:
    if isinstance(s, bool) or isinstance(s, float):
        raise ValueError(f"probability {s!r} must be an exact fraction string")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError, TypeError):
        raise ValueError(f"bad probability {s!r}") from None


def dumps(obj: Any) -> str:
    """Canonical JSON: sorted keys, fixed separators."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _require(doc: dict, key: str, kind: type):
    if key not in doc:
        raise ValueError(f"missing field {key!r}")
    if not isinstance(doc[key], kind):
        raise ValueError(f"field {key!r} must be a {kind.__name__}")
    return doc[key]


# --------------------------------------------------------------------------
# Models
# --------------------------------------------------------------------------

def mdp_to_json(mdp: Mdp, initial: dict[int, Fraction] | None = None, meta: dict | None = None) -> dict:
    doc: dict[str, Any] = {
        "states": list(mdp.states),
        "actions": list(mdp.actions),
        "transitions": {
            mdp.states[q]: {
                mdp.actions[a]: {mdp.states[s]: fmt(p) for s, p in sorted(row.items())}
                for a, row in enumerate(rows)
            }
            for q, rows in enumerate(mdp.delta)
        },
    }
    if initial is not None:
        doc["initial"] = {mdp.states[q]: fmt(p) for q, p in sorted(initial.items())}
    if meta:
        doc["meta"] = meta
    return doc


def mdp_from_json(doc: Any) -> tuple[Mdp, dict[int, Fraction] | None]:
    """Parse a model document; raises ValueError on any violation."""
    if not isinstance(doc, dict):
        raise ValueError("model must be a JSON object")
    states = _require(doc, "states", list)
    actions = _require(doc, "actions", list)
    trans = _require(doc, "transitions", dict)
    if not all(isinstance(x, str) for x in states + actions):
        raise ValueError("state and action names must be strings")
    parsed = {
        s: {a: {t: parse_fraction(p) for t, p in row.items()} for a, row in by_a.items()}
        for s, by_a in trans.items()
    }
    mdp = Mdp.from_names(states, actions, parsed)
    problems = validate(mdp)
    if problems:
        raise ValueError("invalid model: " + "; ".join(problems))
    initial = None
    if "initial" in doc:
        init = _require(doc, "initial", dict)
        initial = mdp.distribution({s: parse_fraction(p) for s, p in init.items()})
    return mdp, initial


def load_mdp(path: str) -> tuple[Mdp, dict[int, Fraction] | None]:
    with open(path) as f:
        return mdp_from_json(json.load(f))


# --------------------------------------------------------------------------
# Automata
# --------------------------------------------------------------------------

def afa_to_json(afa: Afa) -> dict:
    return {
        "states": list(afa.states),
        "accepting": [afa.states[q] for q in sorted(afa.accepting)],
        "delta": {
            afa.states[q]: [[afa.states[s] for s in sorted(c)] for c in clauses]
            for q, clauses in enumerate(afa.delta)
        },
    }


def afa_from_json(doc: Any) -> Afa:
    if not isinstance(doc, dict):
        raise ValueError("automaton must be a JSON object")
    states = _require(doc, "states", list)
    accepting = _require(doc, "accepting", list)
    delta = _require(doc, "delta", dict)
    for s in states:
        if s not in delta:
            raise ValueError(f"state {s!r} has no formula")
    return Afa.from_names(states, delta, accepting)


def load_afa(path: str) -> Afa:
    with open(path) as f:
        return afa_from_json(json.load(f))


# --------------------------------------------------------------------------
# Strategies
# --------------------------------------------------------------------------

def transducer_to_json(strat: Transducer, mdp: Mdp) -> dict:
    return {
        "kind": "transducer",
        "states": list(mdp.states),
        "actions": list(mdp.actions),
        "modes": strat.modes,
        "initial_mode": strat.initial_mode,
        "update": [
            {mdp.actions[a]: {mdp.states[q]: m for q, m in enumerate(row)}
             for a, row in enumerate(by_a)}
            for by_a in strat.update
        ],
        "next_move": [
            {mdp.states[q]: {mdp.actions[a]: fmt(p) for a, p in sorted(row.items())}
             for q, row in enumerate(rows)}
            for rows in strat.next_move
        ],
    }


def _check_alphabet(doc: dict, mdp: Mdp) -> None:
    if doc.get("states") != list(mdp.states) or doc.get("actions") != list(mdp.actions):
        raise ValueError("strategy was built for different states or actions")


def transducer_from_json(doc: Any, mdp: Mdp) -> Transducer:
    if not isinstance(doc, dict) or doc.get("kind") != "transducer":
        raise ValueError("not a transducer document")
    _check_alphabet(doc, mdp)
    modes = _require(doc, "modes", int)
    update = tuple(
        tuple(tuple(int(by_a[a][q]) for q in mdp.states) for a in mdp.actions)
        for by_a in _require(doc, "update", list)
    )
    next_move = tuple(
        tuple(
            {mdp.action(a): parse_fraction(p) for a, p in rows.get(q, {}).items()}
            for q in mdp.states
        )
        for rows in _require(doc, "next_move", list)
    )
    strat = Transducer(
        mdp.n_states, mdp.n_actions, modes, _require(doc, "initial_mode", int), update, next_move
    )
    problems = strat.problems()
    if problems:
        raise ValueError("invalid strategy: " + "; ".join(problems))
    return strat


def schedule_to_json(schedule: EpsilonSchedule, mdp: Mdp) -> dict:
    return {
        "kind": "schedule",
        "states": list(mdp.states),
        "actions": list(mdp.actions),
        "support": mdp.names(schedule.support),
        "lead_in": (
            None if schedule.lead_in is None else {
                "horizon": schedule.lead_in_horizon,
                "strategy": transducer_to_json(schedule.lead_in, mdp),
            }
        ),
        "segments": [
            {
                "epsilon": fmt(s.epsilon),
                "horizon": s.horizon,
                "peak": fmt(s.peak),
                "strategy": transducer_to_json(s.strategy, mdp),
            }
            for s in schedule.segments
        ],
    }


def schedule_from_json(doc: Any, mdp: Mdp) -> EpsilonSchedule:
    if not isinstance(doc, dict) or doc.get("kind") != "schedule":
        raise ValueError("not a schedule document")
    _check_alphabet(doc, mdp)
    lead = doc.get("lead_in")
    segments = tuple(
        Segment(
            parse_fraction(s["epsilon"]),
            transducer_from_json(s["strategy"], mdp),
            int(s["horizon"]),
            parse_fraction(s["peak"]),
        )
        for s in _require(doc, "segments", list)
    )
    return EpsilonSchedule(
        mdp.state_set(doc.get("support", [])),
        segments,
        None if lead is None else transducer_from_json(lead["strategy"], mdp),
        0 if lead is None else int(lead["horizon"]),
    )


# --------------------------------------------------------------------------
# Traces
# --------------------------------------------------------------------------

def write_trace(out: IO[str], mdp: Mdp, outcome: list[dict[int, Fraction]]) -> None:
    """One row per (step, state) with that state's mass and the step total."""
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["step", "state", "mass", "step_mass"])
    for n, d in enumerate(outcome):
        check_distribution({q: p for q, p in d.items() if p}, mdp.n_states)
        total = fmt(sum(d.values(), Fraction(0)))
        for q in range(mdp.n_states):
            writer.writerow([n, mdp.states[q], fmt(d.get(q, Fraction(0))), total])

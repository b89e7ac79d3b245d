"""Command-line front end.

Exit codes: 0 success, 1 internal consistency failure, 2 input error,
3 resource cap exceeded, 4 instance not winning in the requested mode.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import afa as afa_mod
from .deciders import MODES, DEFAULT_MAX_STATES, TargetSpec, classify, decide
from .errors import NotWinningError, ResourceCapError
from .generators import (
    InstanceSpec,
    gen_almost_hardness,
    gen_fig1,
    gen_fig5,
    gen_limit_hardness,
    gen_mn,
    random_mdp,
)
from .io import (
    dumps,
    fmt,
    load_afa,
    load_mdp,
    mdp_to_json,
    parse_fraction,
    schedule_from_json,
    schedule_to_json,
    transducer_from_json,
    transducer_to_json,
    write_trace,
)
from .mdp import Mdp, dirac, mass, support
from .strategy import (
    DEFAULT_HORIZON_CAP,
    simulate_schedule,
    symbolic_outcome,
    synth_almost_sure_schedule,
    synth_always,
    synth_limit_from,
    synth_sure_from,
)

EXIT_OK, EXIT_INCONSISTENT, EXIT_INPUT, EXIT_CAP, EXIT_NOT_WINNING = 0, 1, 2, 3, 4


class InputError(Exception):
    pass


class InconsistencyError(Exception):
    pass


def _names(values: list[str] | None) -> list[str]:
    """Accept both ``--target q1 q2`` and ``--target q1,q2``."""
    out = []
    for v in values or []:
        out.extend(x for x in v.split(",") if x)
    return out


def parse_initial(mdp: Mdp, text: str | None, default) -> dict[int, Fraction]:
    """A state name, or ``name=num/den,...``; falls back to the model's initial distribution."""
    if text is None:
        if default is None:
            raise InputError("model has no initial distribution; pass --from")
        return default
    if "=" not in text:
        return dirac(mdp.state(text.strip()))
    weights = {}
    for part in text.split(","):
        name, _, p = part.partition("=")
        weights[name.strip()] = parse_fraction(p.strip())
    return mdp.distribution(weights)


def _target(mdp: Mdp, args) -> TargetSpec:
    names = _names(args.target)
    if not names:
        raise InputError("target set must be nonempty")
    return TargetSpec(args.function, mdp.state_set(names))


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------

def cmd_decide(args) -> int:
    mdp, initial = load_mdp(args.model)
    spec = _target(mdp, args)
    mu0 = parse_initial(mdp, args.start, initial)
    if args.mode == "all":
        v = classify(mdp, mu0, spec, args.objective, args.max_states)
        if not v.monotone:
            raise InconsistencyError(f"verdict violates mode monotonicity: {v.as_tuple()}")
        out = {"sure": v.sure, "almost": v.almost_sure, "limit": v.limit_sure, "witnesses": v.witnesses}
        if v.diagnostics:
            out["diagnostics"] = v.diagnostics
    else:
        won, witness = decide(mdp, mu0, spec, args.objective, args.mode, args.max_states)
        out = {args.mode: won, "witnesses": {args.mode: witness} if won else {}}
    sys.stdout.write(dumps(out))
    return EXIT_OK


def _winning_target(mdp, mu0, spec, args) -> frozenset[int]:
    """Target set to synthesize for; for max, the first singleton that wins."""
    if spec.function == "sum":
        return spec.target
    for q in sorted(spec.target):
        single = TargetSpec("sum", frozenset({q}))
        if decide(mdp, mu0, single, "eventually", args.mode, args.max_states)[0]:
            return single.target
    raise NotWinningError(f"not {args.mode} eventually synchronizing")


def cmd_synthesize(args) -> int:
    mdp, initial = load_mdp(args.model)
    spec = _target(mdp, args)
    mu0 = parse_initial(mdp, args.start, initial)
    if args.objective == "always":
        strat = synth_always(mdp, mu0, spec)
        doc = transducer_to_json(strat, mdp)
        report = {"objective": "always", "modes": strat.modes}
    else:
        t = _winning_target(mdp, mu0, spec, args)
        report = {"objective": "eventually", "mode": args.mode, "target": mdp.names(t)}
        if args.mode == "sure":
            strat, n = synth_sure_from(mdp, support(mu0), t)
            final = symbolic_outcome(mdp, mu0, strat, n)[-1]
            doc = transducer_to_json(strat, mdp)
            report.update(step=n, mass=fmt(mass(final, t)), modes=strat.modes)
        elif args.mode == "limit":
            u = mdp.state_set(_names(args.support)) if args.support else mdp.all_states
            w = synth_limit_from(mdp, mu0, t, u, args.epsilon, args.horizon_cap)
            doc = transducer_to_json(w.strategy, mdp)
            report.update(step=w.step, mass=fmt(w.mass), modes=w.strategy.modes,
                          epsilon=fmt(args.epsilon))
        else:
            sched = synth_almost_sure_schedule(
                mdp, mu0, t, args.depth, args.max_states, args.horizon_cap
            )
            doc = schedule_to_json(sched, mdp)
            report.update(
                support=mdp.names(sched.support),
                peaks=[fmt(p) for p in sched.peaks],
                horizon=sched.horizon,
            )
    if args.out:
        with open(args.out, "w") as f:
            f.write(dumps(doc))
    else:
        report["strategy"] = doc
    sys.stdout.write(dumps(report))
    return EXIT_OK


def cmd_simulate(args) -> int:
    mdp, initial = load_mdp(args.model)
    mu0 = parse_initial(mdp, args.start, initial)
    with open(args.strategy) as f:
        doc = json.load(f)
    if isinstance(doc, dict) and doc.get("kind") == "schedule":
        sched = schedule_from_json(doc, mdp)
        steps = sched.horizon if args.steps is None else args.steps
        if steps > sched.horizon:
            raise InputError(f"schedule covers only {sched.horizon} steps")
        outcome = simulate_schedule(mdp, mu0, sched)[: steps + 1]
    else:
        strat = transducer_from_json(doc, mdp)
        outcome = symbolic_outcome(mdp, mu0, strat, 10 if args.steps is None else args.steps)
    if args.trace:
        with open(args.trace, "w", newline="") as f:
            write_trace(f, mdp, outcome)
    else:
        write_trace(sys.stdout, mdp, outcome)
    return EXIT_OK


def cmd_afa(args) -> int:
    a = load_afa(args.automaton)
    if args.problem == "unifinite":
        answer = afa_mod.universal_finiteness(a)
    else:
        if args.state is None:
            raise InputError(f"{args.problem} needs --state")
        q = a.state(args.state)
        answer = afa_mod.emptiness(a, q) if args.problem == "empty" else afa_mod.finiteness(a, q)
    sys.stdout.write(dumps({args.problem: answer}))
    return EXIT_OK


def cmd_gen(args) -> int:
    family = args.family
    meta = {"family": family}
    if family in ("fig1", "fig5", "mn"):
        if family == "mn":
            mdp = gen_mn(args.n)
            meta["n"] = args.n
        else:
            mdp = gen_fig1() if family == "fig1" else gen_fig5()
        initial = dirac(0)
    elif family == "random":
        mdp = random_mdp(InstanceSpec(args.seed, args.states, args.actions, args.density))
        initial = dirac(0)
        meta.update(seed=args.seed, density=fmt(args.density))
    else:
        if not args.base:
            raise InputError(f"{family} needs --base MODEL")
        base, base_init = load_mdp(args.base)
        if family == "almost-hard":
            if not args.state:
                raise InputError("almost-hard needs --state (the target state of the base model)")
            mdp, p_hat = gen_almost_hardness(base, base.state(args.state))
            initial = base_init
            meta["target"] = mdp.states[p_hat]
        else:
            mdp, q_init = gen_limit_hardness(base)
            initial = dirac(q_init)
            meta["start"] = mdp.states[q_init]
    text = dumps(mdp_to_json(mdp, initial, meta))
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------

def _add_target_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("model", help="JSON model file")
    p.add_argument("--objective", choices=["always", "eventually"], default="eventually")
    p.add_argument("--function", choices=["sum", "max"], default="sum")
    p.add_argument("--target", nargs="*", help="target state names (space or comma separated)")
    p.add_argument("--from", dest="start", help="initial state name or name=num/den,...")
    p.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES,
                   help="cap on states for the almost-sure subset search")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="syncmdp", description="Synchronizing objectives in Markov decision processes"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decide", help="decide winning modes")
    _add_target_args(p)
    p.add_argument("--mode", choices=list(MODES) + ["all"], default="all")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("synthesize", help="build a witness strategy")
    _add_target_args(p)
    p.add_argument("--mode", choices=list(MODES), default="sure")
    p.add_argument("--epsilon", type=parse_fraction, default=Fraction(1, 8))
    p.add_argument("--support", nargs="*", help="support set for limit-sure (default: all states)")
    p.add_argument("--depth", type=int, default=3, help="number of almost-sure segments")
    p.add_argument("--horizon-cap", type=int, default=DEFAULT_HORIZON_CAP)
    p.add_argument("--out", help="strategy output file (default: embed in the report)")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("simulate", help="exact symbolic outcome of a strategy")
    p.add_argument("model")
    p.add_argument("strategy")
    p.add_argument("--steps", type=int)
    p.add_argument("--from", dest="start")
    p.add_argument("--trace", help="CSV output file (default: stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("afa", help="one-letter alternating automaton problems")
    p.add_argument("automaton")
    p.add_argument("problem", choices=["empty", "finite", "unifinite"])
    p.add_argument("--state")
    p.set_defaults(func=cmd_afa)

    p = sub.add_parser("gen", help="write a generated model")
    p.add_argument("--family", required=True,
                   choices=["fig1", "fig5", "mn", "almost-hard", "limit-hard", "random"])
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--states", type=int, default=4)
    p.add_argument("--actions", type=int, default=2)
    p.add_argument("--density", type=parse_fraction, default=Fraction(1, 2))
    p.add_argument("--base", help="base model for the hardness constructions")
    p.add_argument("--state", help="target state of the base model (almost-hard)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ResourceCapError as e:
        print(f"error: resource cap: {e}", file=sys.stderr)
        return EXIT_CAP
    except NotWinningError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NOT_WINNING
    except InconsistencyError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except (InputError, ValueError, KeyError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

"""Example MDPs, hardness-reduction constructions and seeded random instances."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import islice

from .afa import Afa, primes
from .mdp import Mdp, fresh_name

HALF = Fraction(1, 2)
ONE = Fraction(1)


def gen_fig1() -> Mdp:
    """Four states; q1 is almost-sure but not sure reachable as a synchronizing target."""
    split = {"q0": HALF, "q1": HALF}
    return Mdp.from_names(
        ["q0", "q1", "q2", "q3"],
        ["a", "b"],
        {
            "q0": {"a": split, "b": split},
            "q1": {"a": {"q1": ONE}, "b": {"q2": ONE}},
            "q2": {"a": {"q3": ONE}, "b": {"q3": ONE}},
            "q3": {"a": {"q3": ONE}, "b": {"q3": ONE}},
        },
    )


def gen_fig5() -> Mdp:
    """Three states; almost-sure synchronizing in q2 needs infinite memory."""
    split = {"q0": HALF, "q1": HALF}
    return Mdp.from_names(
        ["q0", "q1", "q2"],
        ["a", "b"],
        {
            "q0": {"a": split, "b": split},
            "q1": {"a": {"q1": ONE}, "b": {"q2": ONE}},
            "q2": {"a": {"q0": ONE}, "b": {"q0": ONE}},
        },
    )


def gen_mn(n: int) -> Mdp:
    """q0 splits uniformly into n cycles whose lengths are the first n primes.

    Action a advances every cycle; b moves the last state of a cycle to q_T and
    every other cycle state to q_bot.  q_T falls into the absorbing q_bot.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    lengths = list(islice(primes(), n))
    cycles = [[f"q_{i}_{j}" for j in range(1, p + 1)] for i, p in enumerate(lengths, 1)]
    states = ["q0"] + [s for c in cycles for s in c] + ["q_T", "q_bot"]
    start = {c[0]: Fraction(1, n) for c in cycles}
    trans = {"q0": {"a": start, "b": start}}
    for c in cycles:
        for j, s in enumerate(c):
            last = j == len(c) - 1
            trans[s] = {
                "a": {c[(j + 1) % len(c)]: ONE},
                "b": {"q_T" if last else "q_bot": ONE},
            }
    trans["q_T"] = {"a": {"q_bot": ONE}, "b": {"q_bot": ONE}}
    trans["q_bot"] = {"a": {"q_bot": ONE}, "b": {"q_bot": ONE}}
    return Mdp.from_names(states, ["a", "b"], trans)


def gen_almost_hardness(mdp: Mdp, q_hat: int) -> tuple[Mdp, int]:
    """Add states p_hat and sink and an action #.

    From p_hat and sink every action leads to sink.  The new action sends
    q_hat to p_hat and every other original state to sink.  Then q0 is sure
    eventually synchronizing in T in `mdp` iff it is almost-sure eventually
    synchronizing in {p_hat} in the result.
    """
    if not 0 <= q_hat < mdp.n_states:
        raise ValueError(f"unknown state index {q_hat}")
    n = mdp.n_states
    p_hat, sink = n, n + 1
    names = mdp.states + (fresh_name("p_hat", mdp.states),)
    names += (fresh_name("sink", names),)
    actions = mdp.actions + (fresh_name("#", mdp.actions),)
    to_sink = {sink: ONE}
    delta = [
        row + ({p_hat: ONE} if q == q_hat else dict(to_sink),)
        for q, row in enumerate(mdp.delta)
    ]
    delta += [tuple(dict(to_sink) for _ in actions) for _ in range(2)]
    return Mdp(names, actions, tuple(delta)), p_hat


def gen_limit_hardness(mdp: Mdp) -> tuple[Mdp, int]:
    """Add a state q_init looping on every original action.

    The new action # moves q_init uniformly onto the original states and every
    original state back to q_init.  Then Pre^n(T) is nonempty for all n iff
    q_init is limit-sure eventually synchronizing in T.
    """
    n = mdp.n_states
    q_init = n
    names = mdp.states + (fresh_name("q_init", mdp.states),)
    actions = mdp.actions + (fresh_name("#", mdp.actions),)
    delta = [row + ({q_init: ONE},) for row in mdp.delta]
    spread = {q: Fraction(1, n) for q in range(n)}
    delta.append(tuple({q_init: ONE} for _ in mdp.actions) + (spread,))
    return Mdp(names, actions, tuple(delta)), q_init


# --------------------------------------------------------------------------
# Random instances
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class InstanceSpec:
    seed: int
    state_count: int
    action_count: int
    density: Fraction = Fraction(1, 2)

    def __post_init__(self):
        if self.state_count < 1 or self.action_count < 1:
            raise ValueError("state_count and action_count must be at least 1")
        object.__setattr__(self, "density", Fraction(self.density))
        if not 0 <= self.density <= 1:
            raise ValueError("density must lie in [0, 1]")


def _random_support(rng: random.Random, n: int, density: Fraction) -> list[int]:
    chosen = [q for q in range(n) if rng.random() < density]
    return chosen or [rng.randrange(n)]


def random_mdp(spec: InstanceSpec) -> Mdp:
    """Each successor is kept with probability `density` (at least one per row);
    weights are integers 1..4 normalized to exact fractions."""
    rng = random.Random(spec.seed)
    n, m = spec.state_count, spec.action_count
    delta = []
    for _ in range(n):
        row = []
        for _ in range(m):
            succ = _random_support(rng, n, spec.density)
            weights = [rng.randint(1, 4) for _ in succ]
            total = sum(weights)
            row.append({s: Fraction(w, total) for s, w in zip(succ, weights)})
        delta.append(tuple(row))
    return Mdp(
        tuple(f"q{i}" for i in range(n)),
        tuple(chr(ord("a") + j) if j < 26 else f"a{j}" for j in range(m)),
        tuple(delta),
    )


def random_afa(spec: InstanceSpec) -> Afa:
    """`action_count` bounds the number of clauses per state."""
    rng = random.Random(spec.seed)
    n = spec.state_count
    delta = []
    for _ in range(n):
        k = rng.randint(1, spec.action_count)
        delta.append(tuple(frozenset(_random_support(rng, n, spec.density)) for _ in range(k)))
    accepting = frozenset(q for q in range(n) if rng.random() < spec.density)
    return Afa(tuple(f"s{i}" for i in range(n)), tuple(delta), accepting)

"""Shared helpers for the test suite."""

import random
from fractions import Fraction

from syncmdp.generators import InstanceSpec, random_afa, random_mdp
from syncmdp.mdp import Mdp, dirac, uniform

# (criterion number, passed, summary) lines printed at the end of the session
ACCEPTANCE_RESULTS: list[tuple[int, bool, str]] = []


def random_instance(seed: int, max_states: int = 4, max_actions: int = 2):
    """Seeded random MDP with a random initial state and nonempty target."""
    rng = random.Random(seed)
    spec = InstanceSpec(
        seed,
        rng.randint(1, max_states),
        rng.randint(1, max_actions),
        Fraction(rng.randint(1, 3), 4),
    )
    mdp = random_mdp(spec)
    t = frozenset(q for q in range(mdp.n_states) if rng.random() < 0.4)
    if not t:
        t = frozenset({rng.randrange(mdp.n_states)})
    return mdp, rng.randrange(mdp.n_states), t


def random_initial(mdp: Mdp, rng: random.Random):
    if rng.random() < 0.7:
        return dirac(rng.randrange(mdp.n_states))
    k = rng.randint(1, mdp.n_states)
    return uniform(rng.sample(range(mdp.n_states), k))


def random_automaton(seed: int, max_states: int, max_clauses: int):
    rng = random.Random(seed)
    spec = InstanceSpec(seed, rng.randint(1, max_states), max_clauses, Fraction(rng.randint(1, 3), 4))
    return random_afa(spec)


def reweighted(mdp: Mdp, seed: int) -> Mdp:
    """Same supports, different positive probabilities."""
    rng = random.Random(seed)
    delta = []
    for rows in mdp.delta:
        new_rows = []
        for row in rows:
            weights = {s: rng.randint(1, 9) for s in row}
            total = sum(weights.values())
            new_rows.append({s: Fraction(w, total) for s, w in weights.items()})
        delta.append(tuple(new_rows))
    return Mdp(mdp.states, mdp.actions, tuple(delta))

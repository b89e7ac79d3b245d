"""Brute-force reference answers for small instances.

None of these use the predecessor operator; they explore forward from the
initial state so that agreement with the deciders is an independent check.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction
from itertools import product

from .errors import ResourceCapError
from .mdp import Distribution, Mdp, dirac, mass

DEFAULT_ORACLE_STATES = 12
DEFAULT_BUDGET = 10**6


def _successor_supports(mdp: Mdp, s: frozenset[int]):
    """All supports reachable in one step when each state of `s` picks its own action."""
    ordered = sorted(s)
    choices = [set(mdp.posts[q]) for q in ordered]
    seen = set()
    for combo in product(*choices):
        nxt = frozenset().union(*combo)
        if nxt not in seen:
            seen.add(nxt)
            yield nxt


def oracle_sure_eventually(
    mdp: Mdp, q0: int, t, max_states: int = DEFAULT_ORACLE_STATES
) -> bool:
    """Breadth-first search over reachable supports from ``{q0}``."""
    if mdp.n_states > max_states:
        raise ResourceCapError(f"oracle limited to {max_states} states")
    t = frozenset(t)
    start = frozenset({q0})
    seen = {start}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        if s <= t:
            return True
        for nxt in _successor_supports(mdp, s):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return False


def oracle_always_sum(mdp: Mdp, mu0: Distribution, t, max_states: int = DEFAULT_ORACLE_STATES) -> bool:
    """Whether some strategy keeps the support inside `t` forever.

    Searches the graph of supports contained in `t` for a cycle reachable from
    the initial support; every infinite path in a finite graph ends in one.
    """
    if mdp.n_states > max_states:
        raise ResourceCapError(f"oracle limited to {max_states} states")
    t = frozenset(t)
    start = frozenset(q for q, p in mu0.items() if p > 0)
    if not start <= t:
        return False
    graph = {}
    stack = [start]
    while stack:
        s = stack.pop()
        if s in graph:
            continue
        graph[s] = [n for n in _successor_supports(mdp, s) if n <= t]
        stack.extend(graph[s])
    # a node survives while it has a surviving successor
    alive = set(graph)
    changed = True
    while changed:
        changed = False
        for s in list(alive):
            if not any(n in alive for n in graph[s]):
                alive.discard(s)
                changed = True
    return start in alive


def _step(mdp: Mdp, d: Distribution, choice: dict[int, int]) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    for q, p in d.items():
        for s, w in mdp.delta[q][choice[q]].items():
            out[s] = out.get(s, Fraction(0)) + p * w
    return out


def oracle_bounded_counting_sup(
    mdp: Mdp,
    q0: int,
    t,
    horizon: int,
    budget: int = DEFAULT_BUDGET,
) -> Fraction:
    """Best mass in `t` at any step up to `horizon` over pure counting strategies.

    A counting strategy picks an action per (step, state); only choices at
    states in the current support matter, so the search branches over those.
    Distributions already seen at the same step are explored once.
    """
    t = frozenset(t)
    best = mass(dirac(q0), t)
    visited: set[tuple[int, frozenset]] = set()
    nodes = 0
    stack = [(0, dirac(q0))]
    while stack:
        n, d = stack.pop()
        key = (n, frozenset(d.items()))
        if key in visited:
            continue
        visited.add(key)
        nodes += 1
        if nodes > budget:
            raise ResourceCapError(f"enumeration budget {budget} exceeded")
        best = max(best, mass(d, t))
        if best == 1 or n == horizon:
            continue
        ordered = sorted(d)
        for combo in product(range(mdp.n_actions), repeat=len(ordered)):
            stack.append((n + 1, _step(mdp, d, dict(zip(ordered, combo)))))
    return best

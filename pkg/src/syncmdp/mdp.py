"""Markov decision processes, exact distributions and the predecessor operator.

States and actions are dense integer indices; display names are kept only for
I/O.  State sets are ``frozenset`` objects of state indices and probabilities
are :class:`fractions.Fraction` values throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Hashable, Iterable, Mapping, Sequence, TypeVar

from .errors import ResourceCapError

StateSet = frozenset
Distribution = Mapping[int, Fraction]

DEFAULT_LASSO_CAP = 10**6

T = TypeVar("T", bound=Hashable)


# --------------------------------------------------------------------------
# Distributions
# --------------------------------------------------------------------------

def dirac(q: int) -> dict[int, Fraction]:
    return {q: Fraction(1)}


def uniform(states: Iterable[int]) -> dict[int, Fraction]:
    states = sorted(set(states))
    if not states:
        raise ValueError("uniform distribution over an empty set")
    p = Fraction(1, len(states))
    return {q: p for q in states}


def support(d: Distribution) -> frozenset[int]:
    return frozenset(q for q, p in d.items() if p > 0)


def mass(d: Distribution, states: Iterable[int]) -> Fraction:
    return sum((d.get(q, Fraction(0)) for q in set(states)), Fraction(0))


def is_dirac(d: Distribution) -> bool:
    return len(support(d)) == 1


def check_distribution(d: Distribution, n_states: int) -> None:
    """Raise ValueError unless `d` is a support-sparse distribution over range(n_states)."""
    if not d:
        raise ValueError("empty distribution")
    total = Fraction(0)
    for q, p in d.items():
        if not (isinstance(q, int) and 0 <= q < n_states):
            raise ValueError(f"distribution references unknown state {q!r}")
        if not isinstance(p, Fraction) or p <= 0:
            raise ValueError(f"non-positive or inexact probability {p!r} at state {q}")
        total += p
    if total != 1:
        raise ValueError(f"distribution mass {total} != 1")


# --------------------------------------------------------------------------
# The MDP type
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=True)
class Mdp:
    """A finite MDP ``<Q, A, delta>`` with exact rational transition rows.

    ``delta[q][a]`` maps successor indices to probabilities.  The constructor
    does not check row masses; use :func:`validate` for diagnostics.
    """

    states: tuple[str, ...]
    actions: tuple[str, ...]
    delta: tuple[tuple[Mapping[int, Fraction], ...], ...]

    @classmethod
    def from_names(
        cls,
        states: Sequence[str],
        actions: Sequence[str],
        transitions: Mapping[str, Mapping[str, Mapping[str, Fraction | int | str]]],
    ) -> "Mdp":
        """Build from ``transitions[state][action][successor] = probability``.

        Raises ValueError for unknown names or missing rows.
        """
        s_idx = {s: i for i, s in enumerate(states)}
        a_idx = {a: i for i, a in enumerate(actions)}
        if len(s_idx) != len(states) or len(a_idx) != len(actions):
            raise ValueError("duplicate state or action names")
        for s in transitions:
            if s not in s_idx:
                raise ValueError(f"transition from unknown state {s!r}")
        rows = []
        for s in states:
            by_action = transitions.get(s, {})
            for a in by_action:
                if a not in a_idx:
                    raise ValueError(f"unknown action {a!r} at state {s!r}")
            row = []
            for a in actions:
                if a not in by_action:
                    raise ValueError(f"missing transition row for ({s}, {a})")
                dist = {}
                for succ, p in by_action[a].items():
                    if succ not in s_idx:
                        raise ValueError(f"dangling successor {succ!r} in ({s}, {a})")
                    dist[s_idx[succ]] = Fraction(p)
                row.append(dist)
            rows.append(tuple(row))
        return cls(tuple(states), tuple(actions), tuple(rows))

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_actions(self) -> int:
        return len(self.actions)

    @property
    def all_states(self) -> frozenset[int]:
        return frozenset(range(self.n_states))

    def state(self, name: str) -> int:
        try:
            return self.states.index(name)
        except ValueError:
            raise ValueError(f"unknown state {name!r}") from None

    def action(self, name: str) -> int:
        try:
            return self.actions.index(name)
        except ValueError:
            raise ValueError(f"unknown action {name!r}") from None

    def state_set(self, names: Iterable[str]) -> frozenset[int]:
        return frozenset(self.state(n) for n in names)

    def names(self, states: Iterable[int]) -> list[str]:
        return [self.states[q] for q in sorted(states)]

    def distribution(self, weights: Mapping[str, Fraction | int | str]) -> dict[int, Fraction]:
        d = {self.state(s): Fraction(p) for s, p in weights.items() if Fraction(p) != 0}
        check_distribution(d, self.n_states)
        return d

    @cached_property
    def posts(self) -> tuple[tuple[frozenset[int], ...], ...]:
        return tuple(
            tuple(frozenset(s for s, p in row.items() if p > 0) for row in by_action)
            for by_action in self.delta
        )


# --------------------------------------------------------------------------
# Operations
# --------------------------------------------------------------------------

def validate(mdp: Mdp) -> list[str]:
    """Return a list of human-readable violations (empty when the MDP is well formed)."""
    problems = []
    n, m = mdp.n_states, mdp.n_actions
    if n == 0:
        problems.append("empty state set")
    if m == 0:
        problems.append("empty action set")
    if len(mdp.delta) != n:
        problems.append(f"{len(mdp.delta)} transition blocks for {n} states")
    for q, by_action in enumerate(mdp.delta):
        qn = mdp.states[q] if q < n else str(q)
        if len(by_action) != m:
            problems.append(f"state {qn}: {len(by_action)} rows for {m} actions")
        for a, row in enumerate(by_action):
            an = mdp.actions[a] if a < m else str(a)
            if not row:
                problems.append(f"({qn}, {an}): empty support")
                continue
            total = Fraction(0)
            for succ, p in row.items():
                if not (isinstance(succ, int) and 0 <= succ < n):
                    problems.append(f"({qn}, {an}): dangling successor {succ!r}")
                if isinstance(p, float):
                    problems.append(f"({qn}, {an}): inexact probability {p!r}")
                p = Fraction(p)
                if p <= 0:
                    problems.append(f"({qn}, {an}): non-positive probability {p}")
                total += p
            if total != 1:
                problems.append(f"({qn}, {an}): row mass {total}")
    return problems


def post(mdp: Mdp, q: int, a: int) -> frozenset[int]:
    if not 0 <= q < mdp.n_states:
        raise ValueError(f"unknown state index {q}")
    if not 0 <= a < mdp.n_actions:
        raise ValueError(f"unknown action index {a}")
    return mdp.posts[q][a]


def pre(mdp: Mdp, s: Iterable[int]) -> frozenset[int]:
    """States having some action whose whole successor support lies in `s`."""
    s = frozenset(s)
    return frozenset(
        q for q, by_action in enumerate(mdp.posts) if any(p <= s for p in by_action)
    )


def pre_k(mdp: Mdp, s: Iterable[int], k: int) -> frozenset[int]:
    if k < 0:
        raise ValueError("k must be nonnegative")
    s = frozenset(s)
    for _ in range(k):
        s = pre(mdp, s)
    return s


def safe_action(mdp: Mdp, q: int, target: frozenset[int]) -> int | None:
    """Lowest action index whose support from `q` lies in `target`, if any."""
    for a, p in enumerate(mdp.posts[q]):
        if p <= target:
            return a
    return None


# --------------------------------------------------------------------------
# Lassos
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Lasso:
    """An ultimately periodic sequence ``items[0..k+r)`` with ``item(k+r) == item(k)``."""

    prefix_len: int
    period: int
    items: tuple

    def item(self, n: int):
        if n < 0:
            raise ValueError("negative index")
        k, r = self.prefix_len, self.period
        if n < k:
            return self.items[n]
        return self.items[k + (n - k) % r]

    @property
    def prefix(self) -> tuple:
        return self.items[: self.prefix_len]

    @property
    def cycle(self) -> tuple:
        return self.items[self.prefix_len :]


def find_lasso(step: Callable[[T], T], start: T, cap: int = DEFAULT_LASSO_CAP) -> Lasso:
    """Iterate `step` from `start` until a value repeats; minimal prefix and period."""
    seen: dict[T, int] = {}
    items: list[T] = []
    x = start
    while x not in seen:
        if len(items) >= cap:
            raise ResourceCapError(f"no repetition within {cap} iterations")
        seen[x] = len(items)
        items.append(x)
        x = step(x)
    k = seen[x]
    return Lasso(k, len(items) - k, tuple(items))


def pre_lasso(mdp: Mdp, t: Iterable[int], cap: int = DEFAULT_LASSO_CAP) -> Lasso:
    return find_lasso(lambda s: pre(mdp, s), frozenset(t), cap)


def pair_lasso(
    mdp: Mdp, t: Iterable[int], u: Iterable[int], cap: int = DEFAULT_LASSO_CAP
) -> Lasso:
    """Lasso of the pair sequence ``(Pre^i(t), Pre^i(u))``; requires ``t <= u``."""
    t, u = frozenset(t), frozenset(u)
    if not t <= u:
        raise ValueError("pair_lasso requires t to be a subset of u")
    return find_lasso(lambda p: (pre(mdp, p[0]), pre(mdp, p[1])), (t, u), cap)


# --------------------------------------------------------------------------
# Structural reductions
# --------------------------------------------------------------------------

def fresh_name(base: str, taken: Iterable[str]) -> str:
    taken = set(taken)
    name = base
    while name in taken:
        name += "'"
    return name


def add_initial_state(mdp: Mdp, mu0: Distribution, name: str = "init") -> tuple[Mdp, int]:
    """Copy of `mdp` with a fresh last state moving to `mu0` under every action."""
    check_distribution(mu0, mdp.n_states)
    row = dict(mu0)
    new = Mdp(
        mdp.states + (fresh_name(name, mdp.states),),
        mdp.actions,
        mdp.delta + (tuple(dict(row) for _ in mdp.actions),),
    )
    return new, mdp.n_states


def twin_layout(mdp: Mdp, q: int) -> list[tuple[int, int]]:
    """Provenance ``(original state, copy number)`` of each state of the twin MDP."""
    layout = []
    for s in range(mdp.n_states):
        if s == q:
            layout.append((s, 0))
        else:
            layout.extend([(s, 1), (s, 2)])
    return layout


def _split(d: Distribution, q: int, index: Mapping[tuple[int, int], int]) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    for s, p in d.items():
        if s == q:
            out[index[(s, 0)]] = p
        else:
            out[index[(s, 1)]] = p / 2
            out[index[(s, 2)]] = p / 2
    return out


def twin_duplicate(mdp: Mdp, q: int) -> Mdp:
    """Duplicate every state except `q`, splitting incoming probability evenly between copies.

    Mass can then accumulate in a single state only in `q`.
    """
    if not 0 <= q < mdp.n_states:
        raise ValueError(f"unknown state index {q}")
    layout = twin_layout(mdp, q)
    index = {prov: i for i, prov in enumerate(layout)}
    names = tuple(
        mdp.states[s] if c == 0 else f"{mdp.states[s]}_{c}" for s, c in layout
    )
    delta = tuple(
        tuple(_split(row, q, index) for row in mdp.delta[s]) for s, _ in layout
    )
    return Mdp(names, mdp.actions, delta)


def twin_distribution(mdp: Mdp, mu0: Distribution, q: int) -> dict[int, Fraction]:
    """Image of `mu0` in ``twin_duplicate(mdp, q)``."""
    index = {prov: i for i, prov in enumerate(twin_layout(mdp, q))}
    return _split(mu0, q, index)


def reachable(mdp: Mdp, sources: Iterable[int]) -> frozenset[int]:
    seen = set(sources)
    stack = list(seen)
    while stack:
        q = stack.pop()
        for p in mdp.posts[q]:
            for s in p - seen:
                seen.add(s)
                stack.append(s)
    return frozenset(seen)

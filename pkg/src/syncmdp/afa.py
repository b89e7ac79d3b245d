"""One-letter alternating finite automata (1L-AFA).

Transition formulas are positive Boolean formulas in disjunctive normal form,
stored as a tuple of clauses per state; each clause is a nonempty frozenset of
state indices.  Only word lengths matter, so the language from a state ``q``
is the set of ``n`` with ``q`` in ``acc(afa, n)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import count
from typing import Iterable, Mapping, Sequence

from .mdp import DEFAULT_LASSO_CAP, Lasso, Mdp, find_lasso


def _canonical(clauses: Iterable[Iterable[int]]) -> tuple[frozenset[int], ...]:
    unique = {frozenset(c) for c in clauses}
    return tuple(sorted(unique, key=lambda c: (len(c), sorted(c))))


@dataclass(frozen=True)
class Afa:
    states: tuple[str, ...]
    delta: tuple[tuple[frozenset[int], ...], ...]
    accepting: frozenset[int]

    def __post_init__(self):
        n = len(self.states)
        if len(set(self.states)) != n:
            raise ValueError("duplicate state names")
        if len(self.delta) != n:
            raise ValueError(f"{len(self.delta)} formulas for {n} states")
        canon = []
        for q, clauses in enumerate(self.delta):
            clauses = [frozenset(c) for c in clauses]
            if not clauses:
                raise ValueError(f"state {self.states[q]} has no clause")
            for c in clauses:
                if not c:
                    raise ValueError(f"state {self.states[q]} has an empty clause")
                if not all(isinstance(s, int) and 0 <= s < n for s in c):
                    raise ValueError(f"state {self.states[q]}: clause with unknown state")
            canon.append(_canonical(clauses))
        object.__setattr__(self, "delta", tuple(canon))
        accepting = frozenset(self.accepting)
        if not all(0 <= s < n for s in accepting):
            raise ValueError("accepting set has unknown states")
        object.__setattr__(self, "accepting", accepting)

    @classmethod
    def from_names(
        cls,
        states: Sequence[str],
        delta: Mapping[str, Iterable[Iterable[str]]],
        accepting: Iterable[str],
    ) -> "Afa":
        idx = {s: i for i, s in enumerate(states)}

        def lookup(s):
            if s not in idx:
                raise ValueError(f"unknown state {s!r}")
            return idx[s]

        for s in delta:
            lookup(s)
        rows = tuple(
            tuple(frozenset(lookup(x) for x in clause) for clause in delta.get(s, ()))
            for s in states
        )
        return cls(tuple(states), rows, frozenset(lookup(s) for s in accepting))

    @property
    def n_states(self) -> int:
        return len(self.states)

    def state(self, name: str) -> int:
        try:
            return self.states.index(name)
        except ValueError:
            raise ValueError(f"unknown state {name!r}") from None


def acc_step(afa: Afa, s: frozenset[int]) -> frozenset[int]:
    """States whose formula is satisfied by `s` (one application of Pre_A)."""
    return frozenset(
        q for q, clauses in enumerate(afa.delta) if any(c <= s for c in clauses)
    )


def acc(afa: Afa, n: int) -> frozenset[int]:
    """States accepting the word of length `n`."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    s = afa.accepting
    for _ in range(n):
        s = acc_step(afa, s)
    return s


def acc_lasso(afa: Afa, cap: int = DEFAULT_LASSO_CAP) -> Lasso:
    return find_lasso(lambda s: acc_step(afa, s), afa.accepting, cap)


def emptiness(afa: Afa, q: int) -> bool:
    """True iff the language from `q` is empty."""
    return not any(q in s for s in acc_lasso(afa).items)


def finiteness(afa: Afa, q: int) -> bool:
    """True iff the language from `q` is finite."""
    return not any(q in s for s in acc_lasso(afa).cycle)


def universal_finiteness(afa: Afa) -> bool:
    """True iff the language is finite from every state, i.e. acc(n) is eventually empty."""
    return any(not s for s in acc_lasso(afa).items)


# --------------------------------------------------------------------------
# Reduction gadgets
# --------------------------------------------------------------------------

def gadget_emptiness_to_finiteness(afa: Afa, q: int) -> Afa:
    """Add the disjunct ``q`` to the formula of `q`.

    The language from `q` in the result is finite iff it was empty before.
    """
    delta = list(afa.delta)
    delta[q] = delta[q] + (frozenset({q}),)
    return Afa(afa.states, tuple(delta), afa.accepting)


def primes() -> Iterable[int]:
    """2, 3, 5, 7, ... by trial division."""
    found: list[int] = []
    for n in count(2):
        if all(n % p for p in found if p * p <= n):
            found.append(n)
            yield n


def gadget_primes(n: int) -> list[int]:
    """Cycle lengths of the counting gadget: the 2nd through (n+1)-th primes."""
    gen = primes()
    next(gen)
    return [next(gen) for _ in range(n)]


def gadget_emptiness_to_universal_finiteness(afa: Afa, q0: int) -> Afa:
    """Build B such that L(A_q0) is empty iff B is universally finite.

    B keeps A's states (guarded by the entry state ``x``, with a self-loop on
    `q0`) and adds one cycle ``c_i_0 .. c_i_{p_i - 1}`` per prime ``p_i``.  With
    ``P = prod(p_i)``, ``x`` is in acc_B(i) for ``0 <= i < P`` and for
    ``i = P + 1`` only; from ``P + 2`` on only the self-loop at `q0` can keep
    acc_B nonempty.
    """
    n = afa.n_states
    ps = gadget_primes(n)
    names = list(afa.states)
    gadget_names = ["x"] + [f"c_{i}_{j}" for i, p in enumerate(ps, 1) for j in range(p)]
    clash = set(names) & set(gadget_names)
    if clash:
        raise ValueError(f"state names clash with gadget names: {sorted(clash)}")
    x = n
    first = {}
    idx = n + 1
    for i, p in enumerate(ps, 1):
        first[i] = idx
        idx += p

    delta: list[tuple[frozenset[int], ...]] = []
    for q in range(n):
        guarded = tuple(c | {x} for c in afa.delta[q])
        delta.append((frozenset({q0}),) + guarded if q == q0 else guarded)
    delta.append(tuple(frozenset({first[i]}) for i in first))
    accepting = set(afa.accepting) | {x}
    for i, p in enumerate(ps, 1):
        for j in range(p):
            delta.append((frozenset({x, first[i] + (j + 1) % p}),))
            if j != p - 1:
                accepting.add(first[i] + j)
    return Afa(tuple(names + gadget_names), tuple(delta), frozenset(accepting))


# --------------------------------------------------------------------------
# Conversions
# --------------------------------------------------------------------------

def afa_to_mdp(afa: Afa) -> Mdp:
    """MDP with one action per clause slot; action k goes uniformly to the k-th clause.

    States with fewer clauses are padded by repeating their last clause.
    """
    m = max(len(c) for c in afa.delta)
    actions = tuple(f"a{k + 1}" for k in range(m))
    delta = []
    for clauses in afa.delta:
        padded = list(clauses) + [clauses[-1]] * (m - len(clauses))
        delta.append(
            tuple({s: Fraction(1, len(c)) for s in sorted(c)} for c in padded)
        )
    return Mdp(afa.states, actions, tuple(delta))


def mdp_to_afa(mdp: Mdp, t: Iterable[int]) -> Afa:
    """AFA whose formula at q is the disjunction over actions of the conjunction of post(q, a)."""
    return Afa(mdp.states, tuple(tuple(row) for row in mdp.posts), frozenset(t))

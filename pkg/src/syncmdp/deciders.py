"""Decision procedures for always and eventually synchronizing objectives.

Eventually objectives are solved for ``sum_T`` from a single initial state;
``max_T`` and non-Dirac initial distributions are reduced to that case in
:func:`classify`.  Every answer depends only on transition supports.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from fractions import Fraction
from typing import Iterable, Literal, Sequence

from .errors import ResourceCapError
from .mdp import (
    DEFAULT_LASSO_CAP,
    Distribution,
    Lasso,
    Mdp,
    add_initial_state,
    fresh_name,
    is_dirac,
    pair_lasso,
    pre,
    pre_lasso,
    reachable,
    support,
    uniform,
)

Objective = Literal["always", "eventually"]
Mode = Literal["sure", "almost", "limit"]
MODES: tuple[Mode, ...] = ("sure", "almost", "limit")

DEFAULT_MAX_STATES = 20
DEFAULT_MAX_PRODUCT = 10**6


@dataclass(frozen=True)
class TargetSpec:
    function: Literal["sum", "max"]
    target: frozenset[int]

    def __post_init__(self):
        if self.function not in ("sum", "max"):
            raise ValueError(f"unknown target function {self.function!r}")
        object.__setattr__(self, "target", frozenset(self.target))
        if not self.target:
            raise ValueError("target set must be nonempty")


@dataclass
class Verdict:
    sure: bool
    almost_sure: bool
    limit_sure: bool
    witnesses: dict = field(default_factory=dict)
    diagnostics: list[str] = field(default_factory=list)

    @property
    def monotone(self) -> bool:
        return (not self.sure or self.almost_sure) and (not self.almost_sure or self.limit_sure)

    def as_tuple(self) -> tuple[bool, bool, bool]:
        return self.sure, self.almost_sure, self.limit_sure


# --------------------------------------------------------------------------
# Always synchronizing
# --------------------------------------------------------------------------

def safety_region(mdp: Mdp, t: Iterable[int]) -> frozenset[int]:
    """Greatest fixpoint of ``W = t & Pre(W)``."""
    w = frozenset(t)
    while True:
        nxt = w & pre(mdp, w)
        if nxt == w:
            return w
        w = nxt


def dirac_region(mdp: Mdp, t: Iterable[int]) -> frozenset[int]:
    """States of `t` with an infinite path inside `t` along probability-1 transitions."""
    w = frozenset(t)
    while True:
        nxt = frozenset(
            q for q in w if any(len(p) == 1 and p <= w for p in mdp.posts[q])
        )
        if nxt == w:
            return w
        w = nxt


def decide_always_sum(mdp: Mdp, mu0: Distribution, t: Iterable[int]) -> bool:
    return support(mu0) <= safety_region(mdp, t)


def decide_always_max(mdp: Mdp, mu0: Distribution, t: Iterable[int]) -> bool:
    """Non-Dirac initial distributions always lose."""
    if not is_dirac(mu0):
        return False
    (q0,) = support(mu0)
    return q0 in dirac_region(mdp, t)


# --------------------------------------------------------------------------
# Sure eventually
# --------------------------------------------------------------------------

def first_cover(lasso: Lasso, states: frozenset[int]) -> int | None:
    """Smallest n with ``states <= lasso.item(n)``; lasso items are sets."""
    for n, s in enumerate(lasso.items):
        if states <= s:
            return n
    return None


def decide_sure_eventually(mdp: Mdp, q0: int, t: Iterable[int]) -> tuple[bool, int | None]:
    """Sure winning iff ``q0`` lies in some ``Pre^n(t)``; returns the minimal such n."""
    n = first_cover(pre_lasso(mdp, t), frozenset({q0}))
    return n is not None, n


# --------------------------------------------------------------------------
# Product with the predecessor sequence
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ProductMdp:
    """``M_Z x [r]``: states ``(q, i)`` stored at index ``i * |Q| + q``, plus a sink."""

    mdp: Mdp
    base: Mdp
    period: int
    r_seq: tuple[frozenset[int], ...]
    z_seq: tuple[frozenset[int], ...]

    @property
    def sink(self) -> int:
        return self.mdp.n_states - 1

    def index(self, q: int, i: int) -> int:
        return (i % self.period) * self.base.n_states + q

    def provenance(self, s: int) -> tuple[int, int] | None:
        if s == self.sink:
            return None
        return s % self.base.n_states, s // self.base.n_states


def z_safe_actions(
    mdp: Mdp, z_seq: Sequence[frozenset[int]], q: int, i: int
) -> frozenset[int]:
    """Actions at `q` whose successors lie in ``z_seq[i - 1 mod r]``; empty if q is not in z_seq[i]."""
    r = len(z_seq)
    if not 0 <= i < r:
        raise ValueError(f"position {i} outside [0, {r})")
    if q not in z_seq[i]:
        return frozenset()
    nxt = z_seq[(i - 1) % r]
    return frozenset(a for a, p in enumerate(mdp.posts[q]) if p <= nxt)


def build_product(
    mdp: Mdp,
    periodic: Iterable[tuple[frozenset[int], frozenset[int]]],
    r: int,
    max_states: int = DEFAULT_MAX_PRODUCT,
) -> ProductMdp:
    """Product of `mdp` with positions mod `r` allowing only Z-safe actions.

    `periodic` lists ``(Pre^i(R), Pre^i(Z))`` for ``i = 0 .. r-1``; it must be
    closed under Pre with period `r`.
    """
    periodic = list(periodic)
    if r <= 0 or len(periodic) != r:
        raise ValueError(f"expected {r} periodic items, got {len(periodic)}")
    r_seq = tuple(frozenset(p[0]) for p in periodic)
    z_seq = tuple(frozenset(p[1]) for p in periodic)
    for i in range(r):
        if not r_seq[i] <= z_seq[i]:
            raise ValueError(f"position {i}: R item not contained in Z item")
        nxt = (i + 1) % r
        if pre(mdp, r_seq[i]) != r_seq[nxt] or pre(mdp, z_seq[i]) != z_seq[nxt]:
            raise ValueError(f"pair sequence is not Pre-periodic at position {i}")
    n = mdp.n_states
    size = n * r + 1
    if size > max_states:
        raise ResourceCapError(f"product would have {size} states (cap {max_states})")
    sink = size - 1
    names = tuple(f"{mdp.states[q]}@{i}" for i in range(r) for q in range(n))
    names += (fresh_name("sink", names),)
    to_sink = {sink: Fraction(1)}
    delta = []
    for i in range(r):
        prev = (i - 1) % r
        for q in range(n):
            safe = z_safe_actions(mdp, z_seq, q, i)
            delta.append(tuple(
                {prev * n + s: p for s, p in mdp.delta[q][a].items()} if a in safe else dict(to_sink)
                for a in range(mdp.n_actions)
            ))
    delta.append(tuple(dict(to_sink) for _ in range(mdp.n_actions)))
    return ProductMdp(Mdp(names, mdp.actions, tuple(delta)), mdp, r, r_seq, z_seq)


# --------------------------------------------------------------------------
# Almost-sure reachability
# --------------------------------------------------------------------------

def almost_sure_strategy(mdp: Mdp, goal: Iterable[int]) -> tuple[frozenset[int], dict[int, int]]:
    """Winning region for reaching `goal` with probability 1, and a memoryless witness.

    Repeatedly prunes the candidate region to the states that can reach `goal`
    using only actions that stay in the region.  The witness picks, layer by
    layer towards the goal, the lowest action that stays in the region and
    moves closer.
    """
    goal = frozenset(goal)
    posts = mdp.posts
    region = frozenset(range(mdp.n_states))
    while True:
        layers = _attractor_layers(posts, region, goal)
        if layers.keys() == region:
            break
        region = frozenset(layers)
    strategy = {}
    _attractor_layers(posts, region, goal, strategy)
    return region, strategy


def _attractor_layers(posts, region, goal, strategy=None) -> dict[int, int]:
    """Distance to goal through actions that keep all successors inside `region`."""
    dist = {q: 0 for q in goal & region}
    frontier = set(dist)
    level = 0
    while frontier:
        level += 1
        found = set()
        for q in region:
            if q in dist:
                continue
            for a, p in enumerate(posts[q]):
                if p <= region and p & frontier:
                    found.add(q)
                    if strategy is not None:
                        strategy[q] = a
                    break
        for q in found:
            dist[q] = level
        frontier = found
    if strategy is not None:
        for q in goal & region:
            strategy.setdefault(q, next(
                (a for a, p in enumerate(posts[q]) if p <= region), 0))
    return dist


def almost_sure_reach(mdp: Mdp, goal: Iterable[int]) -> frozenset[int]:
    return almost_sure_strategy(mdp, goal)[0]


# --------------------------------------------------------------------------
# Limit-sure eventually, with exact support
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LimitPlan:
    """Data behind a limit-sure answer.

    Either ``sure_horizon`` is set (sure winning in the target) or the
    product data is: prefix ``k``, period ``r``, start position ``t``,
    ``R = Pre^k(T)`` and ``Z = Pre^k(U)``.
    """

    lasso: Lasso
    sure_horizon: int | None = None
    product: ProductMdp | None = None
    winning: frozenset[int] = frozenset()
    strategy: dict | None = None
    position: int | None = None

    @property
    def k(self) -> int:
        return self.lasso.prefix_len

    @property
    def r(self) -> int:
        return self.lasso.period

    def witness(self, mdp: Mdp) -> dict:
        if self.sure_horizon is not None:
            return {"sure_horizon": self.sure_horizon}
        rz = self.lasso.items[self.k]
        return {
            "k": self.k,
            "r": self.r,
            "t": self.position,
            "R": mdp.names(rz[0]),
            "Z": mdp.names(rz[1]),
        }


def limit_plan(
    mdp: Mdp,
    initial: Iterable[int],
    t: Iterable[int],
    u: Iterable[int],
    cap: int = DEFAULT_LASSO_CAP,
) -> LimitPlan | None:
    """Limit-sure plan for reaching `t` with support in `u` from any distribution
    whose support is `initial`; None when not limit-sure winning.

    All initial states must share one start position in the product.
    """
    t, u, initial = frozenset(t), frozenset(u), frozenset(initial)
    lasso = pair_lasso(mdp, t, u, cap)
    for n, (tn, _) in enumerate(lasso.items):
        if initial <= tn:
            return LimitPlan(lasso, sure_horizon=n)
    r = lasso.period
    product = build_product(mdp, lasso.cycle, r)
    goal = frozenset(product.index(q, 0) for q in product.r_seq[0])
    winning, strategy = almost_sure_strategy(product.mdp, goal)
    for pos in range(r):
        if all(product.index(q, pos) in winning for q in initial):
            return LimitPlan(lasso, None, product, winning, strategy, pos)
    return None


def decide_limit_sure_with_support(
    mdp: Mdp, q0: int, t: Iterable[int], u: Iterable[int], cap: int = DEFAULT_LASSO_CAP
) -> tuple[bool, dict | None]:
    t, u = frozenset(t), frozenset(u)
    if not t <= u:
        raise ValueError("target must be a subset of the support set")
    if not 0 <= q0 < mdp.n_states:
        raise ValueError(f"unknown state index {q0}")
    plan = limit_plan(mdp, {q0}, t, u, cap)
    if plan is None:
        return False, None
    return True, plan.witness(mdp)


def decide_limit_sure(
    mdp: Mdp, q0: int, t: Iterable[int], cap: int = DEFAULT_LASSO_CAP
) -> tuple[bool, dict | None]:
    return decide_limit_sure_with_support(mdp, q0, t, mdp.all_states, cap)


# --------------------------------------------------------------------------
# Almost-sure eventually
# --------------------------------------------------------------------------

def _candidate_supports(states: frozenset[int], t: frozenset[int]):
    ordered = sorted(states)
    for size in range(1, len(ordered) + 1):
        for combo in combinations(ordered, size):
            u = frozenset(combo)
            if u & t:
                yield u


def almost_sure_support(
    mdp: Mdp,
    initial: Iterable[int],
    t: Iterable[int],
    max_states: int = DEFAULT_MAX_STATES,
    cap: int = DEFAULT_LASSO_CAP,
) -> frozenset[int] | None:
    """Witness support U for almost-sure synchronizing in `t` from any
    distribution with support `initial`, or None.

    Winning iff some U is sure-reachable and the uniform distribution on U is
    limit-sure winning in ``t & U`` with support in U.  Sure-winning instances
    return ``U = t``.  Otherwise candidates U range over subsets of the
    reachable states meeting `t`, by size and then lexicographically.
    """
    t, initial = frozenset(t), frozenset(initial)
    if first_cover(pre_lasso(mdp, t, cap), initial) is not None:
        return t
    if limit_plan(mdp, initial, t, mdp.all_states, cap) is None:
        return None
    reach = reachable(mdp, initial)
    if len(reach) > max_states:
        raise ResourceCapError(
            f"{len(reach)} reachable states exceed the subset-enumeration cap {max_states}"
        )
    for u in _candidate_supports(reach, t):
        if first_cover(pre_lasso(mdp, u, cap), initial) is None:
            continue
        extended, fresh = add_initial_state(mdp, uniform(u))
        if limit_plan(extended, {fresh}, t & u, u, cap) is not None:
            return u
    return None


def decide_almost_sure(
    mdp: Mdp,
    q0: int,
    t: Iterable[int],
    max_states: int = DEFAULT_MAX_STATES,
    cap: int = DEFAULT_LASSO_CAP,
) -> tuple[bool, frozenset[int] | None]:
    """Almost-sure eventually synchronizing in `t` from `q0`, with witness support."""
    if not 0 <= q0 < mdp.n_states:
        raise ValueError(f"unknown state index {q0}")
    u = almost_sure_support(mdp, {q0}, t, max_states, cap)
    return u is not None, u


# --------------------------------------------------------------------------
# Dispatch
# --------------------------------------------------------------------------

def _single_source(mdp: Mdp, mu0: Distribution) -> tuple[Mdp, int, int]:
    """Reduce to a Dirac start; returns (mdp, state, step shift)."""
    if is_dirac(mu0):
        (q0,) = support(mu0)
        return mdp, q0, 0
    extended, fresh = add_initial_state(mdp, mu0)
    return extended, fresh, 1


def decide(
    mdp: Mdp,
    mu0: Distribution,
    spec: TargetSpec,
    objective: Objective,
    mode: Mode,
    max_states: int = DEFAULT_MAX_STATES,
) -> tuple[bool, dict]:
    """One winning mode of one objective; returns (answer, witness data)."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if objective == "always":
        if spec.function == "sum":
            return decide_always_sum(mdp, mu0, spec.target), {}
        witness = {} if is_dirac(mu0) else {"note": "non-Dirac initial distribution"}
        return decide_always_max(mdp, mu0, spec.target), witness
    if objective != "eventually":
        raise ValueError(f"unknown objective {objective!r}")

    src_mdp, q0, shift = _single_source(mdp, mu0)
    targets = [spec.target] if spec.function == "sum" else [frozenset({q}) for q in sorted(spec.target)]
    for target in targets:
        won, witness = _decide_eventually(src_mdp, q0, target, mode, shift, max_states)
        if won:
            if spec.function == "max":
                witness["state"] = mdp.states[next(iter(target))]
            return True, witness
    return False, {}


def _decide_eventually(mdp, q0, target, mode, shift, max_states) -> tuple[bool, dict]:
    if mode == "sure":
        won, n = decide_sure_eventually(mdp, q0, target)
        return won, ({"horizon": n - shift} if won else {})
    if mode == "almost":
        won, u = decide_almost_sure(mdp, q0, target, max_states)
        return won, ({"support": mdp.names(u)} if won else {})
    won, witness = decide_limit_sure(mdp, q0, target)
    if won and "sure_horizon" in witness:
        witness = {"sure_horizon": witness["sure_horizon"] - shift}
    return won, (witness or {})


def classify(
    mdp: Mdp,
    mu0: Distribution,
    spec: TargetSpec,
    objective: Objective,
    max_states: int = DEFAULT_MAX_STATES,
) -> Verdict:
    """All three winning modes for one objective."""
    if objective == "always":
        won, witness = decide(mdp, mu0, spec, objective, "sure", max_states)
        diagnostics = [witness["note"]] if "note" in witness else []
        return Verdict(won, won, won, {}, diagnostics)
    results = {m: decide(mdp, mu0, spec, objective, m, max_states) for m in MODES}
    witnesses = {m: w for m, (ok, w) in results.items() if ok}
    return Verdict(results["sure"][0], results["almost"][0], results["limit"][0], witnesses)

"""Finite-memory strategies, exact symbolic outcomes and witness synthesis.

All synthesized strategies are counting strategies: the mode is the number of
steps played so far (saturating at the last mode), so the move depends only
on the step count and the current state.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Literal

from .deciders import (
    DEFAULT_MAX_STATES,
    LimitPlan,
    TargetSpec,
    almost_sure_support,
    dirac_region,
    first_cover,
    limit_plan,
    safety_region,
)
from .errors import NotWinningError, ResourceCapError
from .mdp import (
    Distribution,
    Mdp,
    check_distribution,
    dirac,
    is_dirac,
    mass,
    pre_k,
    pre_lasso,
    safe_action,
    support,
)

DEFAULT_HORIZON_CAP = 10**4

ONE = Fraction(1)


@dataclass(frozen=True)
class Transducer:
    """Modes ``0 .. modes-1``; ``update[m][a][q]`` is the mode after playing
    `a` in mode `m` and reaching `q`; ``next_move[m][q]`` maps actions to
    probabilities."""

    n_states: int
    n_actions: int
    modes: int
    initial_mode: int
    update: tuple[tuple[tuple[int, ...], ...], ...]
    next_move: tuple[tuple[dict[int, Fraction], ...], ...]

    def problems(self) -> list[str]:
        out = []
        if not 0 <= self.initial_mode < self.modes:
            out.append(f"initial mode {self.initial_mode} out of range")
        if len(self.update) != self.modes or len(self.next_move) != self.modes:
            out.append("tables do not match the mode count")
            return out
        for m in range(self.modes):
            if len(self.update[m]) != self.n_actions:
                out.append(f"mode {m}: update table has {len(self.update[m])} actions")
                continue
            for a, row in enumerate(self.update[m]):
                if len(row) != self.n_states or not all(0 <= x < self.modes for x in row):
                    out.append(f"mode {m}, action {a}: malformed update row")
            if len(self.next_move[m]) != self.n_states:
                out.append(f"mode {m}: next-move table has {len(self.next_move[m])} states")
                continue
            for q, row in enumerate(self.next_move[m]):
                if not row:
                    continue
                if not all(0 <= a < self.n_actions for a in row):
                    out.append(f"mode {m}, state {q}: unknown action")
                if sum(row.values(), Fraction(0)) != 1 or any(p <= 0 for p in row.values()):
                    out.append(f"mode {m}, state {q}: move is not a distribution")
        return out

    def compatible(self, mdp: Mdp) -> bool:
        return self.n_states == mdp.n_states and self.n_actions == mdp.n_actions


def counting_transducer(mdp: Mdp, modes: int, rule: Callable[[int, int], int]) -> Transducer:
    """Pure counting strategy playing ``rule(step, state)``; the step saturates at ``modes - 1``."""
    if modes < 1:
        raise ValueError("at least one mode is required")
    n, m = mdp.n_states, mdp.n_actions
    update = tuple(
        tuple((min(i + 1, modes - 1),) * n for _ in range(m)) for i in range(modes)
    )
    moves = tuple(tuple({rule(i, q): ONE} for q in range(n)) for i in range(modes))
    return Transducer(n, m, modes, 0, update, moves)


def memoryless(mdp: Mdp, choice: Callable[[int], int]) -> Transducer:
    return counting_transducer(mdp, 1, lambda _, q: choice(q))


def word_strategy(mdp: Mdp, word: Iterable[int]) -> Transducer:
    """Play ``word[i]`` at step i in every state, then repeat its last letter."""
    word = list(word)
    if not word:
        raise ValueError("empty word")
    return counting_transducer(mdp, len(word), lambda i, _: word[i])


# --------------------------------------------------------------------------
# Symbolic outcome
# --------------------------------------------------------------------------

def _joint_step(mdp: Mdp, strat: Transducer, joint: dict) -> dict:
    out: dict[tuple[int, int], Fraction] = {}
    for (m, q), p in joint.items():
        row = strat.next_move[m][q]
        if not row:
            raise ValueError(f"no move defined in mode {m} at state {mdp.states[q]}")
        for a, w in row.items():
            upd = strat.update[m][a]
            for s, v in mdp.delta[q][a].items():
                key = (upd[s], s)
                out[key] = out.get(key, Fraction(0)) + p * w * v
    return out


def _project(joint: dict) -> dict[int, Fraction]:
    d: dict[int, Fraction] = {}
    for (_, q), p in joint.items():
        d[q] = d.get(q, Fraction(0)) + p
    return d


def symbolic_outcome(
    mdp: Mdp, mu0: Distribution, strat: Transducer, horizon: int
) -> list[dict[int, Fraction]]:
    """Exact state distributions at steps ``0 .. horizon``."""
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    if not strat.compatible(mdp):
        raise ValueError("strategy does not match the MDP's states and actions")
    check_distribution(mu0, mdp.n_states)
    joint = {(strat.initial_mode, q): p for q, p in mu0.items()}
    outcome = [dict(mu0)]
    for _ in range(horizon):
        joint = _joint_step(mdp, strat, joint)
        outcome.append(_project(joint))
    return outcome


def reachable_pairs(mdp: Mdp, mu0: Distribution, strat: Transducer) -> set[tuple[int, int]]:
    """(mode, state) pairs reachable with positive probability."""
    seen = {(strat.initial_mode, q) for q in support(mu0)}
    stack = list(seen)
    while stack:
        m, q = stack.pop()
        for a in strat.next_move[m][q]:
            for s in mdp.posts[q][a]:
                pair = (strat.update[m][a][s], s)
                if pair not in seen:
                    seen.add(pair)
                    stack.append(pair)
    return seen


def is_total(mdp: Mdp, mu0: Distribution, strat: Transducer) -> bool:
    """Every reachable (mode, state) pair has a move."""
    return all(strat.next_move[m][q] for m, q in reachable_pairs(mdp, mu0, strat))


def sync_value(d: Distribution, spec: TargetSpec) -> Fraction:
    if spec.function == "sum":
        return mass(d, spec.target)
    return max((d.get(q, Fraction(0)) for q in spec.target), default=Fraction(0))


def validate_sync(
    outcome: list[Distribution],
    spec: TargetSpec,
    p: Fraction,
    objective: Literal["always", "eventually"],
) -> tuple[bool, int | None]:
    """Check p-synchronization over the given finite outcome.

    Eventually: the first step reaching `p`.  Always: every listed step
    reaches `p`; returns the last step checked, or the first failing step.
    """
    values = [sync_value(d, spec) for d in outcome]
    if objective == "eventually":
        for i, v in enumerate(values):
            if v >= p:
                return True, i
        return False, None
    if objective != "always":
        raise ValueError(f"unknown objective {objective!r}")
    for i, v in enumerate(values):
        if v < p:
            return False, i
    return True, len(values) - 1


# --------------------------------------------------------------------------
# Sure eventually
# --------------------------------------------------------------------------

def _sure_rule(mdp: Mdp, t: frozenset[int], n: int) -> Callable[[int, int], int]:
    layers = [pre_k(mdp, t, j) for j in range(n + 1)]

    def rule(i: int, q: int) -> int:
        if i >= n:
            return 0
        a = safe_action(mdp, q, layers[n - i - 1])
        return 0 if a is None else a

    return rule


def sure_strategy(mdp: Mdp, t: Iterable[int], n: int) -> Transducer:
    """Counting strategy with n + 1 modes moving from ``Pre^n(t)`` into `t` in n steps."""
    t = frozenset(t)
    return counting_transducer(mdp, n + 1, _sure_rule(mdp, t, n))


def synth_sure_from(mdp: Mdp, initial: Iterable[int], t: Iterable[int]) -> tuple[Transducer, int]:
    t = frozenset(t)
    n = first_cover(pre_lasso(mdp, t), frozenset(initial))
    if n is None:
        raise NotWinningError("not sure eventually synchronizing")
    return sure_strategy(mdp, t, n), n


def synth_sure_eventually(mdp: Mdp, q0: int, t: Iterable[int]) -> Transducer:
    return synth_sure_from(mdp, {q0}, t)[0]


# --------------------------------------------------------------------------
# Limit-sure eventually
# --------------------------------------------------------------------------

def _advance(mdp: Mdp, d: Distribution, choose: Callable[[int], int]) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    for q, p in d.items():
        for s, w in mdp.delta[q][choose(q)].items():
            out[s] = out.get(s, Fraction(0)) + p * w
    return out


class _LimitRule:
    """Moves of the limit-sure witness for a given switch step.

    Before the switch at step `switch`, a state in ``Pre^p(R)`` at position p
    keeps to the R-sequence; any other state follows the product's
    almost-sure reachability strategy.  After the switch, k steps move
    ``Pre^k(T)`` into T and ``Pre^k(U)`` into U.
    """

    def __init__(self, mdp: Mdp, plan: LimitPlan, t: frozenset[int], u: frozenset[int]):
        self.mdp = mdp
        self.plan = plan
        prod = plan.product
        self.t_layers = [pre_k(mdp, t, j) for j in range(plan.k + 1)]
        self.u_layers = [pre_k(mdp, u, j) for j in range(plan.k + 1)]
        self.product_move = {}
        for pos in range(plan.r):
            prev_r = prod.r_seq[(pos - 1) % plan.r]
            for q in range(mdp.n_states):
                a = safe_action(mdp, q, prev_r) if q in prod.r_seq[pos] else None
                if a is None:
                    a = plan.strategy.get(prod.index(q, pos), 0)
                self.product_move[(q, pos)] = a

    def before_switch(self, step: int, q: int) -> int:
        pos = (self.plan.position - step) % self.plan.r
        return self.product_move[(q, pos)]

    def tail(self, j: int, q: int) -> int:
        """Move at a state with j steps left until the target."""
        for layers in (self.t_layers, self.u_layers):
            if q in layers[j]:
                a = safe_action(self.mdp, q, layers[j - 1])
                if a is not None:
                    return a
        return 0

    def transducer(self, switch: int) -> Transducer:
        k = self.plan.k
        n = switch + k

        def rule(i: int, q: int) -> int:
            if i < switch:
                return self.before_switch(i, q)
            if i < n:
                return self.tail(n - i, q)
            return 0

        return counting_transducer(self.mdp, n + 1, rule)


@dataclass(frozen=True)
class LimitWitness:
    strategy: Transducer
    step: int
    mass: Fraction
    final: dict[int, Fraction]


def synth_limit_from(
    mdp: Mdp,
    mu0: Distribution,
    t: Iterable[int],
    u: Iterable[int],
    epsilon: Fraction,
    horizon_cap: int = DEFAULT_HORIZON_CAP,
) -> LimitWitness:
    """Strategy reaching mass at least ``1 - epsilon`` in `t` with all mass in `u`
    at one step, starting from `mu0`.

    Switch steps aligned with position 0 are tried in increasing order; the
    first one that qualifies after the k-step tail is returned.
    """
    t, u = frozenset(t), frozenset(u)
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    check_distribution(mu0, mdp.n_states)
    plan = limit_plan(mdp, support(mu0), t, u)
    if plan is None:
        raise NotWinningError("not limit-sure eventually synchronizing with this support")
    if plan.sure_horizon is not None:
        strat = sure_strategy(mdp, t, plan.sure_horizon)
        final = symbolic_outcome(mdp, mu0, strat, plan.sure_horizon)[-1]
        return LimitWitness(strat, plan.sure_horizon, mass(final, t), final)

    rule = _LimitRule(mdp, plan, t, u)
    k, r = plan.k, plan.r
    d = dict(mu0)
    step = 0
    switch = plan.position
    while switch + k <= horizon_cap:
        while step < switch:
            d = _advance(mdp, d, lambda q: rule.before_switch(step, q))
            step += 1
        end = d
        for j in range(k, 0, -1):
            end = _advance(mdp, end, lambda q: rule.tail(j, q))
        if mass(end, t) >= 1 - epsilon and support(end) <= u:
            return LimitWitness(rule.transducer(switch), switch + k, mass(end, t), end)
        switch += r
    raise ResourceCapError(f"no qualifying step within horizon {horizon_cap}")


def synth_limit_sure(
    mdp: Mdp,
    q0: int,
    t: Iterable[int],
    u: Iterable[int],
    epsilon: Fraction,
    horizon_cap: int = DEFAULT_HORIZON_CAP,
) -> tuple[Transducer, int]:
    w = synth_limit_from(mdp, dirac(q0), t, u, epsilon, horizon_cap)
    return w.strategy, w.step


# --------------------------------------------------------------------------
# Almost-sure eventually
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Segment:
    epsilon: Fraction
    strategy: Transducer
    horizon: int
    peak: Fraction


@dataclass(frozen=True)
class EpsilonSchedule:
    """Finite prefix of an almost-sure witness.

    The optional lead-in moves all mass into the support U.  Segment i then
    plays a limit-sure strategy for ``epsilon = 2^-i`` from the distribution
    left by the previous segment, ending with mass at least ``1 - epsilon`` in
    the target and all mass in U.  Continuing with i + 1, i + 2, ... gives an
    almost-sure winning strategy.
    """

    support: frozenset[int]
    segments: tuple[Segment, ...]
    lead_in: Transducer | None = None
    lead_in_horizon: int = 0

    @property
    def peaks(self) -> list[Fraction]:
        return [s.peak for s in self.segments]

    @property
    def horizon(self) -> int:
        return self.lead_in_horizon + sum(s.horizon for s in self.segments)


def synth_almost_sure_schedule(
    mdp: Mdp,
    mu0: Distribution | int,
    t: Iterable[int],
    depth: int,
    max_states: int = DEFAULT_MAX_STATES,
    horizon_cap: int = DEFAULT_HORIZON_CAP,
) -> EpsilonSchedule:
    """Materialize `depth` segments of an almost-sure witness.

    Sure-winning instances give a single segment reaching mass exactly 1.
    """
    if isinstance(mu0, int):
        mu0 = dirac(mu0)
    check_distribution(mu0, mdp.n_states)
    if depth < 1:
        raise ValueError("depth must be at least 1")
    t = frozenset(t)
    initial = support(mu0)
    u = almost_sure_support(mdp, initial, t, max_states)
    if u is None:
        raise NotWinningError("not almost-sure eventually synchronizing")

    n = first_cover(pre_lasso(mdp, t), initial)
    if n is not None:
        strat = sure_strategy(mdp, t, n)
        seg = Segment(Fraction(1, 2), strat, n, ONE)
        return EpsilonSchedule(t, (seg,))

    lead_in, lead_steps = synth_sure_from(mdp, initial, u)
    d = dict(mu0)
    if lead_steps > 0:
        d = symbolic_outcome(mdp, d, lead_in, lead_steps)[-1]
    else:
        lead_in = None
    goal = t & u
    segments = []
    for i in range(1, depth + 1):
        eps = Fraction(1, 2**i)
        w = synth_limit_from(mdp, d, goal, u, eps, horizon_cap)
        segments.append(Segment(eps, w.strategy, w.step, w.mass))
        d = w.final
    return EpsilonSchedule(u, tuple(segments), lead_in, lead_steps)


def simulate_schedule(
    mdp: Mdp, mu0: Distribution, schedule: EpsilonSchedule
) -> list[dict[int, Fraction]]:
    """Concatenated symbolic outcome of the lead-in and all segments."""
    outcome = [dict(mu0)]
    parts = [(schedule.lead_in, schedule.lead_in_horizon)] if schedule.lead_in else []
    parts += [(s.strategy, s.horizon) for s in schedule.segments]
    for strat, horizon in parts:
        outcome += symbolic_outcome(mdp, outcome[-1], strat, horizon)[1:]
    return outcome


# --------------------------------------------------------------------------
# Always synchronizing
# --------------------------------------------------------------------------

def synth_always(mdp: Mdp, mu0: Distribution, spec: TargetSpec) -> Transducer:
    """Memoryless strategy keeping the outcome synchronized in the target forever.

    For sum it stays inside the safety region; for max it follows
    probability-1 transitions inside the target.
    """
    if spec.function == "sum":
        region = safety_region(mdp, spec.target)
        if not support(mu0) <= region:
            raise NotWinningError("not always synchronizing")
        return memoryless(mdp, lambda q: safe_action(mdp, q, region) if q in region else 0)
    region = dirac_region(mdp, spec.target)
    if not is_dirac(mu0) or not support(mu0) <= region:
        raise NotWinningError("not always synchronizing")

    def choose(q: int) -> int:
        if q not in region:
            return 0
        return next(a for a, p in enumerate(mdp.posts[q]) if len(p) == 1 and p <= region)

    return memoryless(mdp, choose)

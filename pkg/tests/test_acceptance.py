"""Acceptance criteria, one test per criterion.

Each test prints a single PASS/FAIL line (also repeated in the terminal
summary) and then asserts every sub-check.
"""

import random
from fractions import Fraction
from math import prod

from helpers import (
    ACCEPTANCE_RESULTS,
    random_automaton,
    random_initial,
    random_instance,
    reweighted,
)
from syncmdp.afa import (
    acc,
    acc_step,
    afa_to_mdp,
    emptiness,
    finiteness,
    gadget_emptiness_to_finiteness,
    gadget_emptiness_to_universal_finiteness,
    gadget_primes,
    universal_finiteness,
)
from syncmdp.deciders import (
    TargetSpec,
    classify,
    decide_almost_sure,
    decide_limit_sure,
    decide_sure_eventually,
)
from syncmdp.generators import gen_almost_hardness, gen_fig1, gen_fig5, gen_limit_hardness, gen_mn
from syncmdp.mdp import dirac, mass, pre, pre_lasso
from syncmdp.oracles import oracle_sure_eventually
from syncmdp.strategy import (
    symbolic_outcome,
    synth_almost_sure_schedule,
    synth_sure_eventually,
    word_strategy,
)


class Checks:
    def __init__(self, number: int, title: str):
        self.number = number
        self.title = title
        self.failures: list[str] = []

    def check(self, ok: bool, what: str):
        if not ok:
            self.failures.append(what)

    def finish(self):
        ok = not self.failures
        summary = self.title if ok else f"{self.title} -- failed: {'; '.join(self.failures)}"
        ACCEPTANCE_RESULTS.append((self.number, ok, summary))
        print(f"[{'PASS' if ok else 'FAIL'}] criterion {self.number}: {summary}")
        assert ok, summary


def test_criterion_1_four_state_classification():
    c = Checks(1, "four-state example verdicts for {q1} and {q2} from q0")
    m = gen_fig1()
    for name, expected in (("q1", (False, True, True)), ("q2", (False, False, True))):
        v = classify(m, dirac(0), TargetSpec("sum", m.state_set([name])), "eventually")
        c.check(v.as_tuple() == expected, f"target {name}: got {v.as_tuple()}")
    c.finish()


def test_criterion_2_four_state_traces():
    c = Checks(2, "four-state example exact traces under 'always a' and 'a^k b'")
    m = gen_fig1()
    a, b = m.action("a"), m.action("b")
    q1, q2 = m.state_set(["q1"]), m.state_set(["q2"])
    outcome = symbolic_outcome(m, dirac(0), word_strategy(m, [a]), 20)
    for k in range(21):
        c.check(mass(outcome[k], q1) == 1 - Fraction(1, 2**k), f"always a, step {k}")
    for k in range(21):
        strat = word_strategy(m, [a] * k + [b])
        got = mass(symbolic_outcome(m, dirac(0), strat, k + 1)[-1], q2)
        c.check(got == 1 - Fraction(1, 2**k), f"a^{k} b: {got}")
    c.finish()


def test_criterion_3_mn_sure_horizon():
    c = Checks(3, "M(2) sure horizon 7, witnesses n = 1 mod 6, exact mass 1")
    m = gen_mn(2)
    t = m.state_set(["q_T"])
    won, n = decide_sure_eventually(m, 0, t)
    c.check(won and n == 7, f"decider returned {(won, n)}")

    # independent plain iteration of pre up to several periods
    s, hits = t, []
    for i in range(60):
        if 0 in s:
            hits.append(i)
        s = pre(m, s)
    c.check(hits == [i for i in range(60) if i >= 7 and i % 6 == 1], f"witness set {hits}")

    lasso = pre_lasso(m, t)
    period_hits = [lasso.prefix_len + j for j, s in enumerate(lasso.cycle) if 0 in s]
    c.check(lasso.period == 6 and all(h % 6 == 1 for h in period_hits) and len(period_hits) == 1,
            f"lasso k={lasso.prefix_len} r={lasso.period} hits {period_hits}")

    strat = synth_sure_eventually(m, 0, t)
    final = symbolic_outcome(m, dirac(0), strat, 7)[-1]
    c.check(strat.modes == 8 and final == {m.state("q_T"): 1}, f"synthesized final {final}")
    c.finish()


def test_criterion_4_three_state_almost_sure():
    c = Checks(4, "three-state example almost-sure in q2 with witness {q0, q2}, depth-6 peaks 1 - 2^-i")
    m = gen_fig5()
    t = m.state_set(["q2"])
    won, u = decide_almost_sure(m, 0, t)
    c.check(won, "almost-sure verdict")
    c.check(u == m.state_set(["q0", "q2"]), f"witness support is {m.names(u) if u else None}")
    c.check(not decide_sure_eventually(m, 0, t)[0], "sure verdict")
    if won:
        sched = synth_almost_sure_schedule(m, 0, t, 6)
        expected = [1 - Fraction(1, 2**i) for i in range(1, 7)]
        c.check(sched.peaks == expected, f"peaks {[str(p) for p in sched.peaks]}")
    c.finish()


def test_criterion_5_afa_mdp_identity():
    c = Checks(5, "acc(n) = Pre^n on 200 random automata, n <= 40")
    mismatches = 0
    for seed in range(200):
        afa = random_automaton(seed, 5, 3)
        mdp = afa_to_mdp(afa)
        s = afa.accepting
        for n in range(41):
            if acc(afa, n) != s:
                mismatches += 1
            s = pre(mdp, s)
    c.check(mismatches == 0, f"{mismatches} mismatches")
    c.finish()


def test_criterion_6_gadget_equivalences():
    c = Checks(6, "gadget equivalences on 100 random automata and the x pattern")
    bad_uni = bad_fin = bad_x = 0
    for seed in range(100):
        afa = random_automaton(10_000 + seed, 4, 3)
        rng = random.Random(seed)
        q = rng.randrange(afa.n_states)
        b = gadget_emptiness_to_universal_finiteness(afa, q)
        if emptiness(afa, q) != universal_finiteness(b):
            bad_uni += 1
        if emptiness(afa, q) != finiteness(gadget_emptiness_to_finiteness(afa, q), q):
            bad_fin += 1
        if seed < 20:
            x = b.state("x")
            bound = prod(gadget_primes(afa.n_states))
            s = b.accepting
            for i in range(bound + 30):
                if (x in s) != (i < bound):
                    bad_x += 1
                s = acc_step(b, s)
    c.check(bad_uni == 0, f"{bad_uni} universal-finiteness mismatches")
    c.check(bad_fin == 0, f"{bad_fin} finiteness mismatches")
    c.check(bad_x == 0, f"{bad_x} x-pattern mismatches")
    c.finish()


def test_criterion_7_sure_oracle():
    c = Checks(7, "sure eventually decider matches forward oracle on 500 random MDPs")
    mismatches = 0
    for seed in range(500):
        mdp, q0, t = random_instance(seed, 4, 2)
        if decide_sure_eventually(mdp, q0, t)[0] != oracle_sure_eventually(mdp, q0, t):
            mismatches += 1
    c.check(mismatches == 0, f"{mismatches} mismatches")
    c.finish()


def test_criterion_8_hardness_reductions():
    c = Checks(8, "almost-sure and limit-sure hardness constructions on 100 random MDPs")
    bad_almost = bad_limit = 0
    for seed in range(100):
        mdp, q0, _ = random_instance(20_000 + seed, 4, 2)
        rng = random.Random(seed)
        q_hat = rng.randrange(mdp.n_states)
        n, p_hat = gen_almost_hardness(mdp, q_hat)
        if decide_sure_eventually(mdp, q0, {q_hat})[0] != decide_almost_sure(n, q0, {p_hat})[0]:
            bad_almost += 1
        t = {rng.randrange(mdp.n_states)}
        never_empty = all(pre_lasso(mdp, t).items)
        n, q_init = gen_limit_hardness(mdp)
        if never_empty != decide_limit_sure(n, q_init, t)[0]:
            bad_limit += 1
    c.check(bad_almost == 0, f"{bad_almost} almost-sure mismatches")
    c.check(bad_limit == 0, f"{bad_limit} limit-sure mismatches")
    c.finish()


def test_criterion_9_monotone_and_always_collapse():
    c = Checks(9, "mode monotonicity and always collapse on 500 random instances")
    non_monotone = not_uniform = 0
    for seed in range(500):
        mdp, _, t = random_instance(30_000 + seed, 4, 2)
        rng = random.Random(seed)
        mu0 = random_initial(mdp, rng)
        spec = TargetSpec(rng.choice(["sum", "max"]), t)
        ev = classify(mdp, mu0, spec, "eventually")
        al = classify(mdp, mu0, spec, "always")
        non_monotone += (not ev.monotone) + (not al.monotone)
        not_uniform += len(set(al.as_tuple())) != 1
    c.check(non_monotone == 0, f"{non_monotone} non-monotone verdicts")
    c.check(not_uniform == 0, f"{not_uniform} non-uniform always verdicts")
    c.finish()


def test_criterion_10_support_independence():
    c = Checks(10, "verdicts unchanged by re-weighting on 100 random instances")
    changed = 0
    for seed in range(100):
        mdp, _, t = random_instance(40_000 + seed, 4, 2)
        other = reweighted(mdp, seed)
        rng = random.Random(seed)
        mu0 = random_initial(mdp, rng)
        for fn in ("sum", "max"):
            for objective in ("always", "eventually"):
                spec = TargetSpec(fn, t)
                if classify(mdp, mu0, spec, objective).as_tuple() != classify(other, mu0, spec, objective).as_tuple():
                    changed += 1
    c.check(changed == 0, f"{changed} verdicts changed")
    c.finish()

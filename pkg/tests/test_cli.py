import csv
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from syncmdp.cli import main
from syncmdp.generators import InstanceSpec, gen_fig1, gen_mn, random_mdp
from syncmdp.io import (
    afa_from_json,
    afa_to_json,
    dumps,
    mdp_from_json,
    mdp_to_json,
    schedule_from_json,
    schedule_to_json,
    transducer_from_json,
    transducer_to_json,
)
from syncmdp.mdp import dirac
from syncmdp.strategy import synth_almost_sure_schedule, word_strategy
from helpers import random_automaton


@pytest.fixture
def fig1_path(tmp_path):
    path = tmp_path / "fig1.json"
    assert main(["gen", "--family", "fig1", "--out", str(path)]) == 0
    return str(path)


def run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_decide_fig1_all(capsys, fig1_path):
    code, out, _ = run(capsys, ["decide", fig1_path, "--objective", "eventually", "--mode", "all",
                                "--function", "sum", "--target", "q1", "--from", "q0"])
    assert code == 0
    doc = json.loads(out)
    assert (doc["sure"], doc["almost"], doc["limit"]) == (False, True, True)
    assert doc["witnesses"]["almost"]["support"] == ["q0", "q1"]


def test_decide_output_is_byte_stable(capsys, fig1_path):
    argv = ["decide", fig1_path, "--target", "q2", "--from", "q0"]
    _, first, _ = run(capsys, argv)
    _, second, _ = run(capsys, argv)
    assert first == second


def test_decide_empty_target(capsys, fig1_path):
    code, out, err = run(capsys, ["decide", fig1_path, "--target"])
    assert code == 2 and out == "" and err
    code, out, _ = run(capsys, ["decide", fig1_path])
    assert code == 2 and out == ""


def test_decide_always(capsys, fig1_path):
    code, out, _ = run(capsys, ["decide", fig1_path, "--objective", "always", "--mode", "all",
                                "--target", "q3", "--from", "q3"])
    doc = json.loads(out)
    assert code == 0 and (doc["sure"], doc["almost"], doc["limit"]) == (True, True, True)


def test_decide_single_mode_and_distribution(capsys, fig1_path):
    code, out, _ = run(capsys, ["decide", fig1_path, "--mode", "sure", "--target", "q3",
                                "--from", "q1=1/2,q2=1/2"])
    assert code == 0
    assert json.loads(out) == {"sure": True, "witnesses": {"sure": {"horizon": 2}}}


def test_bad_inputs(capsys, tmp_path, fig1_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"states": ["p"], "actions": ["a"], "transitions": {"p": {"a": {"p": "1/2"}}}}')
    assert run(capsys, ["decide", str(bad), "--target", "p", "--from", "p"])[0] == 2
    floaty = tmp_path / "float.json"
    floaty.write_text('{"states": ["p"], "actions": ["a"], "transitions": {"p": {"a": {"p": 1.0}}}}')
    assert run(capsys, ["decide", str(floaty), "--target", "p", "--from", "p"])[0] == 2
    assert run(capsys, ["decide", str(tmp_path / "missing.json"), "--target", "p"])[0] == 2
    assert run(capsys, ["decide", fig1_path, "--target", "nope", "--from", "q0"])[0] == 2


def test_resource_cap_exit(capsys, fig1_path):
    code, out, _ = run(capsys, ["decide", fig1_path, "--mode", "almost", "--target", "q1",
                                "--from", "q0", "--max-states", "2"])
    assert code == 3 and out == ""


def test_synthesize_sure_mn(capsys, tmp_path):
    model = tmp_path / "m2.json"
    main(["gen", "--family", "mn", "--n", "2", "--out", str(model)])
    capsys.readouterr()
    strat = tmp_path / "s.json"
    code, out, _ = run(capsys, ["synthesize", str(model), "--mode", "sure", "--target", "q_T",
                                "--out", str(strat)])
    report = json.loads(out)
    assert code == 0 and report["step"] == 7 and report["mass"] == "1/1" and report["modes"] == 8
    assert json.loads(strat.read_text())["modes"] == 8


def test_synthesize_limit_fig1(capsys, fig1_path):
    code, out, _ = run(capsys, ["synthesize", fig1_path, "--mode", "limit", "--target", "q2",
                                "--epsilon", "1/8"])
    report = json.loads(out)
    assert code == 0 and report["step"] == 4 and report["mass"] == "7/8"


def test_synthesize_not_winning(capsys, fig1_path):
    code, out, _ = run(capsys, ["synthesize", fig1_path, "--mode", "sure", "--target", "q1"])
    assert code == 4 and out == ""


def test_synthesize_almost_fig5(capsys, tmp_path):
    model = tmp_path / "f5.json"
    main(["gen", "--family", "fig5", "--out", str(model)])
    capsys.readouterr()
    code, out, _ = run(capsys, ["synthesize", str(model), "--mode", "almost", "--target", "q2",
                                "--depth", "3", "--out", str(tmp_path / "a.json")])
    report = json.loads(out)
    assert code == 0
    peaks = [Fraction(p) for p in report["peaks"]]
    assert len(peaks) == 3 and all(p >= 1 - Fraction(1, 2**i) for i, p in enumerate(peaks, 1))


def test_simulate_always_a(capsys, tmp_path, fig1_path):
    m = gen_fig1()
    strat = tmp_path / "a.json"
    strat.write_text(dumps(transducer_to_json(word_strategy(m, [0]), m)))
    trace = tmp_path / "trace.csv"
    code, _, _ = run(capsys, ["simulate", fig1_path, str(strat), "--steps", "4", "--trace", str(trace)])
    assert code == 0
    rows = list(csv.DictReader(trace.open()))
    q1 = [r["mass"] for r in rows if r["state"] == "q1"]
    assert q1 == ["0/1", "1/2", "3/4", "7/8", "15/16"]
    assert {r["step_mass"] for r in rows} == {"1/1"}
    code, out, _ = run(capsys, ["simulate", fig1_path, str(strat), "--steps", "0"])
    assert [r["step"] for r in csv.DictReader(out.splitlines())] == ["0"] * 4


def test_simulate_schedule_and_mismatch(capsys, tmp_path, fig1_path):
    sched = tmp_path / "s.json"
    run(capsys, ["synthesize", fig1_path, "--mode", "almost", "--target", "q1", "--out", str(sched)])
    code, out, _ = run(capsys, ["simulate", fig1_path, str(sched)])
    assert code == 0 and out.startswith("step,state,mass,step_mass")
    other = tmp_path / "m.json"
    main(["gen", "--family", "mn", "--n", "1", "--out", str(other)])
    capsys.readouterr()
    assert run(capsys, ["simulate", str(other), str(sched), "--from", "q0"])[0] == 2


def test_afa_command(capsys, tmp_path):
    path = tmp_path / "a.json"
    path.write_text(json.dumps({"states": ["p"], "accepting": [], "delta": {"p": [["p"]]}}))
    code, out, _ = run(capsys, ["afa", str(path), "empty", "--state", "p"])
    assert code == 0 and json.loads(out) == {"empty": True}
    assert json.loads(run(capsys, ["afa", str(path), "unifinite"])[1]) == {"unifinite": True}
    assert run(capsys, ["afa", str(path), "finite"])[0] == 2


def test_gen_families(capsys, tmp_path, fig1_path):
    code, out, _ = run(capsys, ["gen", "--family", "mn", "--n", "2"])
    assert code == 0 and len(json.loads(out)["states"]) == 8
    first = run(capsys, ["gen", "--family", "random", "--seed", "7"])[1]
    assert first == run(capsys, ["gen", "--family", "random", "--seed", "7"])[1]
    code, out, _ = run(capsys, ["gen", "--family", "almost-hard", "--base", fig1_path, "--state", "q3"])
    assert code == 0 and json.loads(out)["meta"]["target"] == "p_hat"
    code, out, _ = run(capsys, ["gen", "--family", "limit-hard", "--base", fig1_path])
    assert code == 0 and json.loads(out)["initial"] == {"q_init": "1/1"}
    assert run(capsys, ["gen", "--family", "limit-hard"])[0] == 2


def test_model_round_trip():
    for mdp in [gen_fig1(), gen_mn(2)] + [random_mdp(InstanceSpec(s, 4, 3)) for s in range(20)]:
        doc = json.loads(dumps(mdp_to_json(mdp, dirac(0))))
        back, init = mdp_from_json(doc)
        assert back == mdp and init == dirac(0)


def test_afa_round_trip():
    for seed in range(20):
        a = random_automaton(seed, 5, 3)
        assert afa_from_json(json.loads(dumps(afa_to_json(a)))) == a


def test_strategy_round_trip():
    m = gen_fig1()
    s = word_strategy(m, [0, 0, 1])
    assert transducer_from_json(json.loads(dumps(transducer_to_json(s, m))), m) == s
    sched = synth_almost_sure_schedule(m, 0, {1}, 2)
    back = schedule_from_json(json.loads(dumps(schedule_to_json(sched, m))), m)
    assert back == sched


def test_module_entry_point(fig1_path):
    proc = subprocess.run(
        [sys.executable, "-m", "syncmdp", "decide", fig1_path, "--target", "q2", "--from", "q0"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    doc = json.loads(proc.stdout)
    assert (doc["sure"], doc["almost"], doc["limit"]) == (False, False, True)

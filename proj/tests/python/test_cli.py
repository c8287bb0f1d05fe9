"""End-to-end tests of the command-line tool (subprocess level)."""

import json
import os
import pathlib
import subprocess

CLI = os.environ["BESYNTH_CLI"]
DATA = pathlib.Path(os.environ["BESYNTH_DATA"])

CSV_HEADER = (
    "O,L,mode,dfa_states,arena_states,t_dfa_ms,t_arena_ms,t_adv_ms,t_coop_ms,"
    "t_combine_ms,t_total_ms,classification,outcome"
)


def run(*args, env=None, input_text=None):
    merged = os.environ.copy()
    merged.update(env or {})
    return subprocess.run(
        [CLI, *args], capture_output=True, text=True, env=merged, input=input_text
    )


def test_usage_errors_exit_one():
    assert run().returncode == 1
    assert run("no-such-command").returncode == 1
    assert run("--help").returncode == 0
    assert run("simulate", str(DATA / "toy.json"), "F lit", "--env", "weird").returncode == 1


def test_compile_emits_dot_and_json():
    dot = run("compile", "F (p & q)", "--fluents", "p,q")
    assert dot.returncode == 0
    assert dot.stdout.startswith("digraph")

    as_json = run("compile", "F (p & q)", "--fluents", "p,q", "--format", "json")
    assert as_json.returncode == 0
    dfa = json.loads(as_json.stdout)
    assert dfa["states"] == 2
    assert dfa["finals"] == [1]


def test_compile_rejects_broken_formulas():
    assert run("compile", "F (p &", "--fluents", "p").returncode == 1
    assert run("compile", "F q", "--fluents", "p").returncode == 1


def test_check_domain_ok_and_violations(tmp_path):
    ok = run("check-domain", str(DATA / "toy.json"))
    assert ok.returncode == 0
    assert json.loads(ok.stdout)["ok"] is True

    bad = {
        "fluents": ["f"],
        "initial": [],
        "actions": ["a"],
        "reactions": ["r"],
        "alpha": [{"state": [], "actions": ["a"]}],
        "beta": [],
        "delta": [],
    }
    bad_path = tmp_path / "bad.json"
    bad_path.write_text(json.dumps(bad))
    broken = run("check-domain", str(bad_path))
    assert broken.returncode == 2
    report = json.loads(broken.stdout)
    assert report["ok"] is False
    assert report["violations"][0]["rule"] == "R2"
    assert report["violations"][0]["state"] == []  # the witness state is printed

    assert run("check-domain", str(tmp_path / "missing.json")).returncode == 2


def test_synthesize_prints_the_classification_line(tmp_path):
    r = run("synthesize", str(DATA / "toy.json"), "F lit")
    assert r.returncode == 0
    assert "classification: pending" in r.stdout.splitlines()

    out = tmp_path / "strategy.json"
    r = run("synthesize", str(DATA / "toy.json"), "F lit", "--export", str(out))
    assert r.returncode == 0
    table = json.loads(out.read_text())
    assert table["classification"] == "pending"
    assert table["actions"] == ["toggle", "wait"]


def test_simulate_scripted_reaches_the_goal(tmp_path):
    script = tmp_path / "script.txt"
    script.write_text("ack\n")
    r = run("simulate", str(DATA / "toy.json"), "F lit", "--env", f"scripted:{script}")
    assert r.returncode == 0
    rec = json.loads(r.stdout)
    assert rec["stopReason"] == "goalReached"
    assert rec["satisfiedAtStep"] == 1
    assert rec["states"] == [[], ["lit"]]


def test_simulate_random_respects_max_steps():
    r = run(
        "simulate", str(DATA / "toy.json"), "F lit",
        "--env", "random:3", "--max-steps", "5", "--continue",
    )
    assert r.returncode == 0
    rec = json.loads(r.stdout)
    assert rec["stopReason"] == "maxSteps"
    assert len(rec["actions"]) == 5


def test_simulate_interactive_quits_cleanly():
    r = run(
        "simulate", str(DATA / "toy.json"), "F lit", "--env", "interactive",
        input_text="q\n",
    )
    assert r.returncode == 0
    assert "interactiveQuit" in r.stdout


def test_verify_exits_zero_on_a_clean_strategy():
    r = run("verify", str(DATA / "toy.json"), "F lit")
    assert r.returncode == 0
    assert json.loads(r.stdout)["ok"] is True


def test_bench_writes_the_csv_schema(tmp_path):
    out = tmp_path / "bench.csv"
    r = run("bench", "--objects", "1", "--locations", "1..2", "--out", str(out))
    assert r.returncode == 0
    assert "bestEffort" in r.stdout  # the summary report
    lines = out.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 1 + 2 * 3  # two grids, three modes each
    for line in lines[1:]:
        assert line.endswith(",ok")

    assert run("bench", "--objects", "2..1").returncode == 1


def test_state_cap_env_var_budget():
    r = run("synthesize", str(DATA / "toy.json"), "F lit", env={"BESYNTH_STATE_CAP": "2"})
    assert r.returncode == 4
    r = run("synthesize", str(DATA / "toy.json"), "F lit", env={"BESYNTH_STATE_CAP": "soup"})
    assert r.returncode == 1
    r = run(
        "compile", "F (p & q)", "--fluents", "p,q", "--format", "json",
        env={"BESYNTH_STATE_CAP": "1"},
    )
    assert r.returncode == 4

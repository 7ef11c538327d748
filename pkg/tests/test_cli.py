import io
import json

import pytest

from capsched.cli import main
from capsched.fixtures import path as fixture_path

AGC = str(fixture_path("agc.rts"))
AGC60 = str(fixture_path("agc_a12_60.rts"))
BROKEN = str(fixture_path("broken.rts"))


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_check_ok():
    code, out, err = run("check", AGC)
    assert code == 0
    assert "3 transactions, 12 actions, 12 events" in out
    assert err == ""


def test_check_reports_diagnostics_with_span():
    code, _, err = run("check", BROKEN)
    assert code == 1
    assert f"{BROKEN}:6:10: SYNC_PRIORITY_MISMATCH" in err


def test_check_parse_error(tmp_path):
    p = tmp_path / "bad.rts"
    p.write_text("")
    code, _, err = run("check", str(p))
    assert code == 1
    assert "1:1: EMPTY_MODEL" in err


def test_missing_file_is_io_error(tmp_path):
    code, _, err = run("check", str(tmp_path / "absent.rts"))
    assert code == 2
    assert err


def test_usage_error():
    assert run("analyze")[0] == 2
    assert run("frobnicate", AGC)[0] == 2
    assert run("analyze", AGC, "--max-window", "0")[0] == 2


def test_analyze_text():
    code, out, _ = run("analyze", AGC)
    assert code == 0
    assert "utilization: 431/600 (0.718333)" in out
    assert out.rstrip().endswith("overall: schedulable")
    rows = {line.split()[0]: line.split() for line in out.splitlines() if line.startswith("T")}
    assert [rows[t][1] for t in ("T1", "T2", "T3")] == ["54", "114", "155"]


def test_analyze_json_and_stages():
    code, out, _ = run("analyze", AGC, "--format", "json", "--stages")
    assert code == 0
    data = json.loads(out)
    assert [t["wcrt"] for t in data["transactions"]] == [54, 114, 155]
    assert {s["job"] for s in data["stages"]} == {"A1", "A5", "A2", "A7", "A3", "A12"}


def test_analyze_infeasible_exit_code():
    code, out, _ = run("analyze", AGC60)
    assert code == 1
    assert "overall: infeasible" in out


def test_analyze_rejects_invalid_model():
    code, out, err = run("analyze", BROKEN)
    assert code == 1
    assert out == ""
    assert "SYNC_PRIORITY_MISMATCH" in err


def test_simulate_is_deterministic():
    a = run("simulate", AGC, "--seed", "5", "--scenarios", "30")
    b = run("simulate", AGC, "--seed", "5", "--scenarios", "30")
    assert a == b
    assert a[0] == 0
    assert "no deadline misses" in a[1]


@pytest.mark.parametrize("jitter", ["zero", "max", "random"])
def test_simulate_jitter_policies(jitter):
    code, out, _ = run("simulate", AGC, "--scenarios", "5", "--jitter", jitter)
    assert code == 0
    assert f"jitter {jitter}" in out


def test_simulate_adversarial_with_trace(tmp_path):
    trace = tmp_path / "trace.tsv"
    code, out, _ = run("simulate", AGC, "--adversarial", "--trace", str(trace))
    assert code == 0
    assert "scenarios: 1 (adversarial)" in out
    assert trace.read_text().splitlines()[0].split("\t")[1] == "arrival"


def test_simulate_reports_miss():
    code, out, _ = run("simulate", AGC60, "--adversarial")
    assert code == 1
    assert "deadline misses" in out


def test_gantt_svg_to_file(tmp_path):
    out_path = tmp_path / "agc.svg"
    code, out, _ = run("gantt", AGC, "--out", str(out_path))
    assert code == 0
    assert out == ""
    assert out_path.read_text().count('class="lane"') == 6


@pytest.mark.parametrize("scenario", ["adversarial", "zero", "random"])
def test_gantt_text(scenario):
    code, out, _ = run("gantt", AGC, "--format", "text", "--scenario", scenario, "--duration", "100")
    assert code == 0
    lines = out.splitlines()
    assert [line.split()[0] for line in lines] == ["A1", "A5", "A2", "A7", "A3", "A12"]
    assert all(set(line.split()[1]) <= {"#", "."} for line in lines)

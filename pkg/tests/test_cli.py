import csv
import dataclasses
import io
import json
import math

import pytest

from horolib.cli import (
    EXIT_FAIL,
    EXIT_OK,
    EXIT_USAGE,
    RunReport,
    ScenarioConfig,
    check_all,
    dumps_json,
    list_scenarios,
    main,
    report_csv,
    run_scenario,
)
from horolib.scenarios import SCENARIOS, SUITE, UsageError


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def patch_body(monkeypatch, sid, body):
    monkeypatch.setitem(SCENARIOS, sid, dataclasses.replace(SCENARIOS[sid], body=body))


def strip_time(text):
    data = json.loads(text)
    data.pop("wall_time", None)
    return data


# listing


def test_list_contents():
    rows = list_scenarios()
    ids = {r["id"] for r in rows}
    assert {"kakutani-invariance", "von-neumann"} <= ids
    assert len(rows) >= 12
    assert all(r["anchor"] and r["description"] for r in rows)


def test_list_cli_json(capsys):
    code, out, _ = run_cli(capsys, "list", "--format", "json")
    assert code == EXIT_OK
    assert [r["id"] for r in json.loads(out)] == list(SCENARIOS)


def test_suite_names_are_registered():
    assert all(sid in SCENARIOS for sid, _ in SUITE)


# runs


def test_kakutani_run_passes(capsys):
    code, out, _ = run_cli(capsys, "run", "--scenario", "kakutani-invariance", "--seed", "1")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["passed"]
    assert rep["anchor"] == SCENARIOS["kakutani-invariance"].anchor
    assert rep["config"]["seed"] == 1
    assert all({"name", "value", "expected", "tolerance", "passed"} <= set(c) for c in rep["checks"])


def test_pos_isp_run_with_diagonal_g():
    rep = run_scenario(ScenarioConfig("pos-isp-equality", {"g": [[2, 0], [0, 1]]}))
    assert rep.passed
    vals = {c["name"]: c["value"] for c in rep.checks}
    assert vals["lhs-vs-eigenvalue-oracle"] == pytest.approx(2 * math.log(2), abs=1e-3)
    assert vals["rhs-vs-eigenvalue-oracle"] == pytest.approx(2 * math.log(2), abs=1e-3)


def test_h2_tracking_run():
    rep = run_scenario(ScenarioConfig("h2-tracking", {"lambda": 2, "n": 100}))
    assert rep.passed
    assert next(c for c in rep.checks if c["name"] == "tracking-value")["value"] == 0


def test_determinism(capsys):
    args = ("run", "--scenario", "closed-form-agreement", "--seed", "7")
    _, a, _ = run_cli(capsys, *args)
    _, b, _ = run_cli(capsys, *args)
    assert strip_time(a) == strip_time(b)
    ta = a.splitlines()
    tb = b.splitlines()
    assert [x for x in ta if "wall_time" not in x] == [x for x in tb if "wall_time" not in x]


def test_seed_environment_override(monkeypatch):
    monkeypatch.setenv("HOROLIB_SEED", "42")
    rep = run_scenario(ScenarioConfig("segal-inequality", {"pairs": 10}, seed=3))
    assert rep.config["seed"] == 42
    monkeypatch.setenv("HOROLIB_SEED", "abc")
    with pytest.raises(UsageError):
        ScenarioConfig("segal-inequality").validated()


def test_seed_changes_random_draws(monkeypatch):
    monkeypatch.delenv("HOROLIB_SEED", raising=False)
    a = run_scenario(ScenarioConfig("segal-inequality", {"pairs": 10}, seed=1)).to_json()
    b = run_scenario(ScenarioConfig("segal-inequality", {"pairs": 10}, seed=2)).to_json()
    assert a["details"] != b["details"]


def test_tolerance_override_forces_failure(capsys):
    code, out, _ = run_cli(capsys, "run", "--scenario", "kakutani-invariance",
                           "--tol", "kakutani/closed-form-kakutani=1e-12")
    rep = json.loads(out)
    assert code == EXIT_FAIL and not rep["passed"]
    bad = [c["name"] for c in rep["checks"] if not c["passed"]]
    assert bad == ["kakutani/closed-form-kakutani"]


def test_config_file_and_csv(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"scenario": "h2-tracking", "params": {"lambda": 3.0}, "seed": 0,
                               "format": "csv", "output": str(tmp_path / "out" / "r.csv")}))
    code, out, err = run_cli(capsys, "run", str(cfg))
    assert code == EXIT_OK and out == ""
    assert err.startswith("PASS h2-tracking")
    rows = list(csv.reader(io.StringIO((tmp_path / "out" / "r.csv").read_text())))
    assert rows[0] == ["scenario", "check", "value", "expected", "tol", "passed"]
    assert all(r[0] == "h2-tracking" and r[-1] in ("true", "false") for r in rows[1:])


@pytest.mark.parametrize("argv", [
    ("run", "--scenario", "no-such-thing"),
    ("run", "--scenario", "h2-tracking", "--param", "bogus=1"),
    ("run", "--scenario", "h2-tracking", "--param", "lambda=fast"),
    ("run", "--scenario", "h2-tracking", "--param", "n=0"),
    ("run", "--scenario", "mean-ergodic-rotation", "--param", "v=[1,2,3]"),
    ("run", "--scenario", "h2-tracking", "--tol", "x=loose"),
    ("run", "--scenario", "h2-tracking", "--format", "xml"),
    ("run",),
    ("frobnicate",),
    ("check", "--jobs", "0"),
])
def test_usage_errors(capsys, argv):
    code, out, err = run_cli(capsys, *argv)
    assert code == EXIT_USAGE and out == ""
    assert "error" in err


def test_bad_config_keys_rejected(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"scenario": "h2-tracking", "colour": "red"}))
    assert run_cli(capsys, "run", str(cfg))[0] == EXIT_USAGE
    cfg.write_text("{not json")
    assert run_cli(capsys, "run", str(cfg))[0] == EXIT_USAGE
    assert run_cli(capsys, "run", str(tmp_path / "missing.json"))[0] == EXIT_USAGE


def test_usage_errors_precede_computation(monkeypatch):
    called = []
    patch_body(monkeypatch, "h2-tracking", called.append)
    with pytest.raises(UsageError):
        run_scenario(ScenarioConfig("h2-tracking", {"n": -5}))
    assert not called


def test_numeric_failure_is_a_failed_check(monkeypatch):
    from horolib.core import NumericError

    def boom(ctx):
        ctx.close("partial", 1.0, 1.0, 0.0)
        raise NumericError("overflow")

    patch_body(monkeypatch, "h2-tracking", boom)
    rep = run_scenario(ScenarioConfig("h2-tracking"))
    assert not rep.passed and rep.error.startswith("NumericError")
    assert [c["name"] for c in rep.checks] == ["partial", "completed"]


# aggregate


SMALL = (("h2-tracking", {}), ("segal-inequality", {"pairs": 50}), ("eigensolver", {"matrices": 10}))


def test_check_all_parallel_matches_serial():
    a = check_all(1, SMALL, seed=3)
    b = check_all(2, SMALL, seed=3)
    assert a["passed"] and a["n_runs"] == 3
    strip = lambda agg: [{k: v for k, v in r.items() if k != "wall_time"} for r in agg["reports"]]  # noqa: E731
    assert dumps_json(strip(a)) == dumps_json(strip(b))


def test_check_all_empty_suite():
    agg = check_all(4, ())
    assert agg["passed"] and agg["n_runs"] == 0 and agg["n_checks"] == 0


def test_check_all_collects_failures(monkeypatch):
    def broken(ctx):
        raise RuntimeError("bug")

    patch_body(monkeypatch, "eigensolver", broken)
    agg = check_all(1, SMALL)
    assert agg["n_runs"] == 3 and not agg["passed"] and agg["n_failed"] == 1
    assert agg["reports"][0]["passed"] and agg["reports"][2]["error"] == "RuntimeError: bug"


def test_check_all_validates_before_running():
    with pytest.raises(UsageError):
        check_all(1, (("h2-tracking", {}), ("prus-no-fixed-point", {"N_max": 1})))


def test_report_csv_and_json_roundtrip():
    rep = RunReport("x", "a", {}, [{"name": "c", "value": 0.1, "expected": 0.0, "tolerance": 1e-3,
                                    "passed": False}], {}, 0.5)
    rows = list(csv.reader(io.StringIO(report_csv([rep.to_json()]))))
    assert rows[1] == ["x", "c", "0.1", "0.0", "0.001", "false"]
    assert json.loads(dumps_json(rep.to_json()))["checks"][0]["value"] == 0.1

"""Command line runner for the scenario catalog.

::

    horolib list
    horolib run --scenario kakutani-invariance --seed 1
    horolib run config.json --format csv --out report.csv
    horolib check --jobs 4 --out reports/

Exit status is 0 when every check passes, 1 when a check fails and 2 on a
usage error.  ``HOROLIB_SEED`` overrides the seed of every run.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import HorolibError, to_jsonable
from .scenarios import SCENARIOS, SUITE, Context, UsageError, get_scenario

SEED_ENV = "HOROLIB_SEED"
FORMATS = ("json", "csv")
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class ScenarioConfig:
    scenario: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    output: str | None = None
    format: str = "json"

    @classmethod
    def from_json(cls, data) -> "ScenarioConfig":
        if not isinstance(data, dict):
            raise UsageError("a config must be a JSON object")
        allowed = {"scenario", "params", "seed", "tolerances", "output", "format"}
        extra = sorted(set(data) - allowed)
        if extra:
            raise UsageError(f"unknown config key(s): {', '.join(extra)}")
        if "scenario" not in data:
            raise UsageError("config is missing 'scenario'")
        return cls(data["scenario"], data.get("params") or {}, data.get("seed", 0),
                   data.get("tolerances") or {}, data.get("output"), data.get("format", "json"))

    def validated(self) -> "ScenarioConfig":
        """Check everything that can be checked without computing; apply ``HOROLIB_SEED``."""
        sc = get_scenario(self.scenario)
        if not isinstance(self.params, dict):
            raise UsageError("params must be an object")
        params = sc.resolve(self.params)
        seed = self.seed
        env = os.environ.get(SEED_ENV)
        if env is not None and env.strip():
            try:
                seed = int(env)
            except ValueError:
                raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None
        if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
            raise UsageError(f"seed must be a nonnegative integer, got {seed!r}")
        if not isinstance(self.tolerances, dict):
            raise UsageError("tolerances must be an object")
        tols = {}
        for k, v in self.tolerances.items():
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not v >= 0:
                raise UsageError(f"tolerance {k!r} must be a nonnegative number")
            tols[str(k)] = float(v)
        if self.format not in FORMATS:
            raise UsageError(f"format must be one of {', '.join(FORMATS)}")
        return ScenarioConfig(self.scenario, params, seed, tols, self.output, self.format)

    def echo(self) -> dict:
        return to_jsonable({"scenario": self.scenario, "params": self.params, "seed": self.seed,
                            "tolerances": self.tolerances})


@dataclass
class RunReport:
    scenario: str
    anchor: str
    config: dict
    checks: list
    details: dict
    wall_time: float
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(c["passed"] for c in self.checks)

    def to_json(self) -> dict:
        out = {"scenario": self.scenario, "anchor": self.anchor, "config": self.config,
               "checks": self.checks, "details": self.details, "passed": self.passed,
               "wall_time": self.wall_time}
        if self.error is not None:
            out["error"] = self.error
        return out


def run_scenario(cfg: ScenarioConfig) -> RunReport:
    """Run one validated-or-not config; numeric failures become failed checks."""
    cfg = cfg.validated()
    sc = get_scenario(cfg.scenario)
    ctx = Context(cfg.params, cfg.seed, cfg.tolerances)
    error = None
    t0 = time.perf_counter()
    try:
        with np.errstate(all="ignore"):
            sc.body(ctx)
    except UsageError:
        raise
    except (HorolibError, ArithmeticError, FloatingPointError, MemoryError) as exc:
        error = f"{type(exc).__name__}: {exc}"
        ctx.holds("completed", False, {"error": error})
    wall = time.perf_counter() - t0
    return RunReport(sc.id, sc.anchor, cfg.echo(), [c.to_json() for c in ctx.checks],
                     to_jsonable(ctx.details), wall, error)


def list_scenarios() -> list:
    return [sc.listing() for sc in SCENARIOS.values()]


def _suite_job(item):
    sid, params, seed = item
    try:
        return run_scenario(ScenarioConfig(sid, dict(params), seed)).to_json()
    except Exception as exc:  # a broken scenario must not take the suite down
        return RunReport(sid, getattr(SCENARIOS.get(sid), "anchor", ""),
                         {"scenario": sid, "params": to_jsonable(params), "seed": seed},
                         [{"name": "completed", "value": False, "expected": True,
                           "tolerance": None, "passed": False}],
                         {}, 0.0, f"{type(exc).__name__}: {exc}").to_json()


def check_all(parallelism: int = 1, suite=None, seed: int = 0) -> dict:
    """Run the suite (default :data:`SUITE`) in a pool of ``parallelism`` processes.

    Reports come back in suite order whatever the pool size.
    """
    if parallelism < 1:
        raise UsageError("--jobs must be at least 1")
    suite = SUITE if suite is None else tuple(suite)
    for sid, params in suite:
        ScenarioConfig(sid, dict(params), seed).validated()
    items = [(sid, params, seed) for sid, params in suite]
    t0 = time.perf_counter()
    if parallelism == 1 or len(items) <= 1:
        reports = [_suite_job(it) for it in items]
    else:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            reports = list(pool.map(_suite_job, items))
    n_checks = sum(len(r["checks"]) for r in reports)
    n_failed = sum(not c["passed"] for r in reports for c in r["checks"])
    return {"reports": reports, "n_runs": len(reports), "n_checks": n_checks,
            "n_failed": n_failed, "passed": all(r["passed"] for r in reports),
            "wall_time": time.perf_counter() - t0}


# ---------------------------------------------------------------------------
# output


def dumps_json(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _fmt(v):
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return str(v)


def report_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["scenario", "check", "value", "expected", "tol", "passed"])
    for r in reports:
        for c in r["checks"]:
            w.writerow([r["scenario"], c["name"], _fmt(c["value"]), _fmt(c["expected"]),
                        _fmt(c["tolerance"]), str(bool(c["passed"])).lower()])
    return buf.getvalue()


def _emit(text: str, out: str | None):
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _summary_line(rep: dict) -> str:
    bad = [c["name"] for c in rep["checks"] if not c["passed"]]
    status = "PASS" if rep["passed"] else "FAIL"
    tail = f"  failed: {', '.join(bad)}" if bad else ""
    return f"{status} {rep['scenario']:<30} {len(rep['checks']):>3} checks {rep['wall_time']:7.2f}s{tail}"


# ---------------------------------------------------------------------------
# argument handling


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="horolib", description="Run the metric functional experiments.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="run one scenario from a config file or flags")
    r.add_argument("config", nargs="?", help="JSON config file")
    r.add_argument("--scenario", help="scenario id (see 'list')")
    r.add_argument("--param", action="append", default=[], metavar="K=V",
                   help="scenario parameter; V is parsed as JSON unless the parameter is a string")
    r.add_argument("--seed", type=int)
    r.add_argument("--tol", action="append", default=[], metavar="CHECK=TOL",
                   help="tolerance override for one check")
    r.add_argument("--out", help="write the report here instead of stdout")
    r.add_argument("--format", choices=FORMATS)

    ls = sub.add_parser("list", help="list the scenarios")
    ls.add_argument("--format", choices=("text", "json"), default="text")

    c = sub.add_parser("check", help="run the full suite")
    c.add_argument("--jobs", type=int, default=1)
    c.add_argument("--out", help="directory for the aggregate report (JSON and CSV)")
    c.add_argument("--seed", type=int, default=0)
    return p


def _pairs(items, what) -> dict:
    out = {}
    for item in items:
        key, sep, val = item.partition("=")
        if not sep or not key:
            raise UsageError(f"{what} must look like KEY=VALUE, got {item!r}")
        out[key] = val
    return out


def _config_from_args(args) -> ScenarioConfig:
    if args.config and args.scenario:
        raise UsageError("give either a config file or --scenario, not both")
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise UsageError(f"cannot read {args.config}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"{args.config} is not valid JSON: {exc}") from None
        cfg = ScenarioConfig.from_json(data)
    elif args.scenario:
        cfg = ScenarioConfig(args.scenario)
    else:
        raise UsageError("run needs a config file or --scenario")
    cfg.params = dict(cfg.params, **_pairs(args.param, "--param"))
    tols = {}
    for k, v in _pairs(args.tol, "--tol").items():
        try:
            tols[k] = float(v)
        except ValueError:
            raise UsageError(f"tolerance {k!r} is not a number") from None
    cfg.tolerances = dict(cfg.tolerances, **tols)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out:
        cfg.output = args.out
    if args.format:
        cfg.format = args.format
    return cfg


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "list":
            rows = list_scenarios()
            if args.format == "json":
                sys.stdout.write(dumps_json(rows))
            else:
                for row in rows:
                    print(f"{row['id']:<30} {row['description']}  [{row['anchor']}]")
            return EXIT_OK
        if args.command == "run":
            cfg = _config_from_args(args).validated()
            rep = run_scenario(cfg).to_json()
            text = report_csv([rep]) if cfg.format == "csv" else dumps_json(rep)
            _emit(text, cfg.output)
            if cfg.output:
                print(_summary_line(rep), file=sys.stderr)
            return EXIT_OK if rep["passed"] else EXIT_FAIL
        agg = check_all(args.jobs, seed=args.seed)
        for rep in agg["reports"]:
            print(_summary_line(rep))
        print(f"{agg['n_runs']} runs, {agg['n_checks']} checks, {agg['n_failed']} failed, "
              f"{agg['wall_time']:.1f}s")
        if args.out:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            (out / "check.json").write_text(dumps_json(agg))
            (out / "check.csv").write_text(report_csv(agg["reports"]))
        return EXIT_OK if agg["passed"] else EXIT_FAIL
    except UsageError as exc:
        print(f"horolib: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

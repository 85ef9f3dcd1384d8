"""Named, seeded experiments over the library, each producing a list of checks.

A scenario is a function of validated parameters, a seeded generator and
tolerance overrides.  It records checks of the form
``passed = |value - expected| <= tolerance``; one-sided inequalities are
recorded through their excess over the bound, and boolean facts carry a
witness.  :data:`SUITE` lists the scenario runs that make up the full check.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable

import numpy as np

from .core import (
    InvalidParameter,
    bicombing_defects,
    isometry_defect,
    to_jsonable,
    translation_number_estimate,
)
from .ergodic import mean_identity_report, power_bounded_norm, derived_norm, von_neumann_projection
from .hyperbolic import (
    H2Space,
    MobiusMap,
    busemann_vertical,
    random_h2_point,
    tracking_curve,
    tracking_value,
)
from .linfty import (
    busemann_from_ray,
    classify_limit_sequence,
    eval_classified,
    linf_horo,
    unbounded_witness_linf,
)
from .normed import (
    BASSO,
    CLOSED_FORMS,
    L1,
    L2,
    LINF,
    DyadicL1Space,
    FiniteSupportVector,
    SequenceSpace,
    VectorSpace,
    alspach_map,
    kakutani_ramp,
    prus_map,
    prus_ramp,
    random_alspach_point,
    random_vector,
    rotation_matrix,
    shift_map,
    EventuallyConstantSpace,
)
from .pos import (
    PosSpace,
    isp_equality_report,
    kernel_invariance_check,
    random_spd,
    random_sym,
    segal_gap,
    sym_exp,
    symmetric_eigh,
    unbounded_witness_check,
)
from .registry import REGISTRY, get_map, solver_maps
from .solver import (
    SolverConfig,
    epsilon_displacement_functional,
    invariance_report,
    run_schedule,
)


class UsageError(InvalidParameter):
    """Malformed configuration; raised before any computation."""


# ---------------------------------------------------------------------------
# parameters


@dataclass(frozen=True)
class Param:
    kind: str  # int, float, str, bool, matrix, vector
    default: Any
    choices: tuple = ()
    lo: float | None = None
    hi: float | None = None
    help: str = ""

    def coerce(self, name: str, raw):
        if isinstance(raw, str) and self.kind != "str":
            try:
                raw = json.loads(raw)
            except json.JSONDecodeError:
                raise UsageError(f"parameter {name}: cannot parse {raw!r}") from None
        try:
            val = self._convert(raw)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"parameter {name}: {exc}") from None
        if self.choices and val not in self.choices:
            raise UsageError(f"parameter {name} must be one of {', '.join(map(str, self.choices))}")
        if self.kind in ("int", "float"):
            if self.lo is not None and val < self.lo:
                raise UsageError(f"parameter {name} must be >= {self.lo}")
            if self.hi is not None and val > self.hi:
                raise UsageError(f"parameter {name} must be <= {self.hi}")
        return val

    def _convert(self, raw):
        if self.kind == "int":
            if isinstance(raw, bool) or not isinstance(raw, (int, float)) or raw != int(raw):
                raise ValueError(f"expected an integer, got {raw!r}")
            return int(raw)
        if self.kind == "float":
            if isinstance(raw, bool) or not isinstance(raw, (int, float)) or not math.isfinite(raw):
                raise ValueError(f"expected a finite number, got {raw!r}")
            return float(raw)
        if self.kind == "bool":
            if not isinstance(raw, bool):
                raise ValueError(f"expected true or false, got {raw!r}")
            return raw
        if self.kind == "str":
            if not isinstance(raw, str):
                raise ValueError(f"expected a string, got {raw!r}")
            return raw
        if self.kind == "vector":
            arr = np.asarray(raw, dtype=float)
            if arr.ndim != 1 or arr.size == 0 or not np.all(np.isfinite(arr)):
                raise ValueError("expected a non-empty list of finite numbers")
            return tuple(float(v) for v in arr)
        if self.kind == "matrix":
            arr = np.asarray(raw, dtype=float)
            if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or not np.all(np.isfinite(arr)):
                raise ValueError("expected a square matrix of finite numbers")
            return tuple(tuple(float(v) for v in row) for row in arr)
        raise ValueError(f"unknown parameter kind {self.kind}")


# ---------------------------------------------------------------------------
# checks and context


@dataclass
class Check:
    name: str
    value: Any
    expected: Any
    tolerance: float | None
    passed: bool
    witness: dict | None = None

    def to_json(self) -> dict:
        out = {"name": self.name, "value": self.value, "expected": self.expected,
               "tolerance": self.tolerance, "passed": bool(self.passed)}
        if self.witness is not None:
            out["witness"] = self.witness
        return to_jsonable(out)


class Context:
    """What a scenario body sees: parameters, generator, tolerances, check log."""

    def __init__(self, params: dict, seed: int, tolerances: dict):
        self.params = params
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.tolerances = tolerances
        self.checks: list[Check] = []
        self.details: dict = {}

    def __getitem__(self, key):
        return self.params[key]

    def tol(self, name: str, default: float) -> float:
        return float(self.tolerances.get(name, default))

    def close(self, name, value, expected, tol, witness=None) -> Check:
        t = self.tol(name, tol)
        v, e = float(value), float(expected)
        ok = math.isfinite(v) and abs(v - e) <= t
        return self._add(Check(name, v, e, t, ok, witness))

    def at_most(self, name, value, bound, tol=0.0, witness=None) -> Check:
        """One-sided ``value <= bound + tol``, recorded through the excess."""
        t = self.tol(name, tol)
        v = float(value)
        excess = max(0.0, v - float(bound)) if math.isfinite(v) else math.inf
        w = {"measured": v + 0.0, "bound": float(bound)}
        w.update(witness or {})
        return self._add(Check(name, excess, 0.0, t, excess <= t, w))

    def holds(self, name, flag, witness=None) -> Check:
        return self._add(Check(name, bool(flag), True, None, bool(flag), witness or {}))

    def _add(self, c: Check) -> Check:
        self.checks.append(c)
        return c


@dataclass(frozen=True)
class Scenario:
    id: str
    description: str
    anchor: str
    params: dict
    body: Callable[[Context], None] = field(repr=False)
    validate: Callable[[dict], None] | None = field(default=None, repr=False)

    def resolve(self, given: dict | None) -> dict:
        given = dict(given or {})
        unknown = sorted(set(given) - set(self.params))
        if unknown:
            raise UsageError(f"scenario {self.id} has no parameter(s) {', '.join(unknown)}; "
                             f"known: {', '.join(sorted(self.params)) or 'none'}")
        out = {k: p.coerce(k, given[k]) if k in given else p.default for k, p in self.params.items()}
        if self.validate is not None:
            self.validate(out)
        return out

    def listing(self) -> dict:
        return {"id": self.id, "description": self.description, "anchor": self.anchor,
                "params": {k: p.default for k, p in self.params.items()}}


SCENARIOS: dict[str, Scenario] = {}


def scenario(id, description, anchor, validate=None, **params):
    def deco(fn):
        SCENARIOS[id] = Scenario(id, description, anchor, params, fn, validate)
        return fn
    return deco


def _require(cond, msg):
    if not cond:
        raise UsageError(msg)


def get_scenario(sid: str) -> Scenario:
    try:
        return SCENARIOS[sid]
    except KeyError:
        raise UsageError(f"unknown scenario {sid!r}; run 'horolib list' for the catalog") from None


# ---------------------------------------------------------------------------
# shared solver runs


@lru_cache(maxsize=None)
def solver_run(map_name: str):
    entry = get_map(map_name)
    return entry, run_schedule(entry.map, entry.space, SolverConfig())


def _map_choices(param_value, allowed):
    return list(allowed) if param_value == "all" else [param_value]


def _invariance_checks(ctx, name, probes_n, tol):
    entry, rep = solver_run(name)
    probes = entry.probes(ctx.rng, probes_n)
    inv = invariance_report(rep, entry.map, probes)
    bad = [r.s for r in rep.rows if r.converged and not r.lemma_ok]
    ctx.holds(f"{name}/lemma-bound-all-rows", not bad,
              {"violating_s": bad, "rows": len(rep.converged_rows)})
    ctx.close(f"{name}/invariance-defect", inv.max_abs_defect, 0.0, tol,
              {"s": inv.s, "d_hat": inv.d_hat, "probes": inv.n_probes})
    ctx.at_most(f"{name}/lower-chain", inv.max_violation_lower, 0.0, tol)
    ctx.at_most(f"{name}/upper-chain", inv.max_violation_upper, 0.0, 1e-9)
    if entry.known_d is not None:
        ctx.close(f"{name}/d-hat", rep.d_hat, entry.known_d, tol)
    ctx.details[name] = {"d_hat": rep.d_hat, "last_s": inv.s,
                         "statuses": [r.status for r in rep.rows]}
    return entry, rep


def _closed_form_checks(ctx, name, probes_n, tol):
    entry, rep = solver_run(name)
    F = CLOSED_FORMS[entry.closed_form]
    h = rep.limit_functional()
    x0 = entry.x0
    f0 = F(x0)
    probes = entry.probes(ctx.rng, probes_n)
    gap = max(abs(h(x) - float(F(x) - f0)) for x in probes)
    ctx.close(f"{name}/closed-form-{entry.closed_form}", gap, 0.0, tol,
              {"probes": len(probes), "s": rep.last.s})


def _exact_probe(rng, natural=True):
    x = random_vector(rng, natural=natural)
    vals = np.array([Fraction(float(v)).limit_denominator(256) for v in x.values], dtype=object)
    return FiniteSupportVector(x.start, vals)


# ---------------------------------------------------------------------------
# scenarios

_SOLVER_MAPS = tuple(e.name for e in solver_maps())
_CLOSED_MAPS = tuple(e.name for e in REGISTRY.values() if e.closed_form and e.resolvent
                     and e.closed_form != "basso")
_SPACES = ("l1", "l2", "linf", "basso", "pos", "h2")


@scenario("bicombing-contract",
          "conical inequality and constant speed of the bicombing on random triples",
          "weak conical geodesic bicombings",
          space=Param("str", "all", choices=_SPACES + ("all",)),
          triples=Param("int", 1000, lo=1, hi=100_000),
          pos_n=Param("int", 6, lo=1, hi=8))
def _bicombing(ctx):
    rng = ctx.rng
    seq = lambda: random_vector(rng, natural=False)  # noqa: E731
    makers = {
        "l1": (SequenceSpace(L1), seq),
        "l2": (SequenceSpace(L2), seq),
        "linf": (SequenceSpace(LINF), seq),
        "basso": (SequenceSpace(BASSO), seq),
        "pos": (PosSpace(ctx["pos_n"]), lambda: random_spd(rng, ctx["pos_n"], 0.5)),
        "h2": (H2Space(), lambda: random_h2_point(rng)),
    }
    for name in _map_choices(ctx["space"], _SPACES):
        sp, draw = makers[name]
        triples = [(draw(), draw(), draw()) for _ in range(ctx["triples"])]
        d = bicombing_defects(sp, triples)
        ctx.at_most(f"{name}/conical", d.conical, 0.0, 1e-8)
        ctx.close(f"{name}/constant-speed", d.speed, 0.0, 1e-8)
        ctx.close(f"{name}/endpoints", d.endpoints, 0.0, 1e-8)


@scenario("insert-shift-lemma-bound",
          "resolvent distance bound d(x0, y_s) <= d(x0, Tx0)/(1-s) and its saturation for the l1 insert-shift",
          "a priori bound on resolvent points",
          map=Param("str", "all", choices=_SOLVER_MAPS + ("all",)))
def _lemma(ctx):
    for name in _map_choices(ctx["map"], _SOLVER_MAPS):
        entry, rep = solver_run(name)
        bad = [r.s for r in rep.rows if r.converged and not r.lemma_ok]
        ctx.holds(f"{name}/lemma-bound-all-rows", not bad,
                  {"violating_s": bad, "rows_checked": len(rep.converged_rows),
                   "rows_skipped": [(r.s, r.status) for r in rep.rows if not r.converged]})
        if name == "insert-shift-l1":
            # y_s = (1, s, s^2, ...) so d(0, y_s) = 1/(1-s) exactly
            err = max(abs(r.dist_x0 - 1 / (1 - r.s)) for r in rep.converged_rows)
            ctx.close(f"{name}/saturation", err, 0.0, 1e-9, {"rows": len(rep.converged_rows)})
            ctx.details[name] = [r.to_json() for r in rep.rows]


@scenario("invariant-functional",
          "last resolvent functional satisfies h(Tx) = h(x) - d on random probes",
          "invariant metric functional of an isometry",
          map=Param("str", "all", choices=_SOLVER_MAPS + ("all",)),
          probes=Param("int", 100, lo=1, hi=10_000))
def _invariant(ctx):
    for name in _map_choices(ctx["map"], _SOLVER_MAPS):
        _invariance_checks(ctx, name, ctx["probes"], 5e-3)


@scenario("kakutani-invariance",
          "invariant functional of Kakutani's map on the unit ball of c0 against its closed form",
          "fixed-point-free isometry of a bounded closed convex set",
          probes=Param("int", 100, lo=1, hi=10_000))
def _kakutani(ctx):
    _invariance_checks(ctx, "kakutani", ctx["probes"], 5e-3)
    _closed_form_checks(ctx, "kakutani", ctx["probes"], 1e-2)
    N = 16
    ramp = kakutani_ramp(N)
    disp = REGISTRY["kakutani"].space.distance(ramp, REGISTRY["kakutani"].map(ramp))
    ctx.holds("ramp-displacement-exact", disp == Fraction(1, N), {"N": N, "value": str(disp)})


@scenario("closed-form-agreement",
          "empirical resolvent functionals against the closed-form functionals",
          "explicit metric functionals in sequence spaces",
          map=Param("str", "all", choices=_CLOSED_MAPS + ("all",)),
          probes=Param("int", 100, lo=1, hi=10_000))
def _closed(ctx):
    for name in _map_choices(ctx["map"], _CLOSED_MAPS):
        _closed_form_checks(ctx, name, ctx["probes"], 1e-2)
    if ctx["map"] in ("all", "insert-shift-l1"):
        entry = REGISTRY["insert-shift-l1"]
        F = CLOSED_FORMS["ones-direction"]
        probes = [_exact_probe(ctx.rng) for _ in range(ctx["probes"])]
        bad = [x.to_json() for x in probes if F(entry.map(x)) - F(x) != -1]
        ctx.holds("ones-direction/exact-shift-by-minus-one", not bad,
                  {"probes": len(probes), "failures": bad[:3]})


_TAU_MAPS = ("translation", "insert-shift-l1", "kakutani", "prus", "congruence-diag")


@scenario("translation-number",
          "d(x0, T^n x0)/n against the solver's minimal displacement estimate",
          "translation number equals minimal displacement",
          map=Param("str", "all", choices=_TAU_MAPS + ("all",)),
          n=Param("int", 10_000, lo=1, hi=1_000_000))
def _tau(ctx):
    for name in _map_choices(ctx["map"], _TAU_MAPS):
        entry, rep = solver_run(name)
        tau, _ = translation_number_estimate(entry.map, entry.x0, entry.space, ctx["n"])
        ctx.close(f"{name}/tau-vs-d-hat", tau, rep.d_hat, 1e-2)
        ctx.at_most(f"{name}/tau-below-d", tau, rep.d_hat, 1e-2)
        if entry.known_d is not None:
            ctx.close(f"{name}/tau-vs-known", tau, entry.known_d, 1e-2)


@scenario("mean-ergodic-identity",
          "(1/n) h(sum U^k v) = -d for U = I on the real line",
          "mean ergodic theorem from invariant functionals",
          v=Param("float", 1.0))
def _me_identity(ctx):
    U = np.eye(1)
    r = mean_identity_report(U, np.array([ctx["v"]]), VectorSpace(1, L1))
    ctx.close("rhs-is-minus-|v|", r.rhs, -abs(ctx["v"]), 1e-9)
    ctx.close("gap", r.gap, 0.0, 1e-9, {"lhs": r.lhs_per_n, "n": r.n_grid})


@scenario("mean-ergodic-rotation",
          "(1/n) h(sum U^k v) -> -d for a rotation of the Euclidean plane",
          "mean ergodic theorem from invariant functionals",
          validate=lambda p: _require(len(p["v"]) == 2, "v must have two entries"),
          theta=Param("float", math.pi / 2),
          v=Param("vector", (1.0, 0.0)),
          n=Param("int", 1000, lo=1, hi=100_000))
def _me_rotation(ctx):
    U = rotation_matrix(ctx["theta"])
    v = np.array(ctx["v"])
    r = mean_identity_report(U, v, VectorSpace(2, L2), n_grid=(1, 10, 100, ctx["n"]))
    ctx.close("lhs-at-n", r.lhs_per_n[-1], r.rhs, 1e-2, {"n": ctx["n"]})
    ctx.close("d-hat-vs-least-squares", -r.rhs, r.d_lstsq, 1e-6)
    ctx.details["lhs_per_n"] = r.lhs_per_n


@scenario("mean-ergodic-shift-window",
          "(1/n) h(sum S^k e0) -> -1 for the right shift on l1(N)",
          "mean ergodic theorem fails to give convergence in l1",
          n=Param("int", 1000, lo=1, hi=100_000))
def _me_shift(ctx):
    r = mean_identity_report(shift_map(1), FiniteSupportVector.unit(0), SequenceSpace(L1, natural=True),
                             n_grid=(1, 10, 100, ctx["n"]))
    ctx.close("lhs-at-n", r.lhs_per_n[-1], r.rhs, 1e-2, {"n": ctx["n"]})
    ctx.close("d-hat", -r.rhs, 1.0, 1e-9)
    ctx.details["lhs_per_n"] = r.lhs_per_n


@scenario("power-bounded-ergodic",
          "mean identity for a power-bounded operator in its derived norm sup_k |A^k x|",
          "mean ergodic theorem for power-bounded operators",
          validate=lambda p: _require(len(p["v"]) == len(p["A"]), "v and A differ in dimension"),
          A=Param("matrix", ((0.5, 1.0), (0.0, 0.5))),
          v=Param("vector", (1.0, 1.0)),
          k_max=Param("int", 200, lo=1, hi=10_000))
def _power_bounded(ctx):
    A, v = np.array(ctx["A"]), np.array(ctx["v"])
    pb = power_bounded_norm(A, v, ctx["k_max"], L1)
    ctx.holds("tail-controlled", pb.exact, {"sup": pb.value, "tail_bound": pb.tail_bound})
    sp = VectorSpace(A.shape[0], derived_norm(A, ctx["k_max"], L1))
    r = mean_identity_report(A, v, sp)
    # the derived norm makes A a contraction; the identity still holds with d = inf |Ax + v - x|
    ctx.close("lhs-at-n", r.lhs_per_n[-1], r.rhs, 1e-2, {"n": r.n_grid[-1], "d_hat": -r.rhs})
    ctx.details["lhs_per_n"] = r.lhs_per_n


@scenario("von-neumann",
          "Cesaro averages of blockdiag(1, R) converge to the invariant projection at rate 1/n",
          "von Neumann's mean ergodic theorem",
          validate=lambda p: _require(len(p["v"]) == 3, "v must have three entries"),
          theta=Param("float", math.pi / 3),
          v=Param("vector", (2.0, 1.0, 1.0)),
          n=Param("int", 10_000, lo=10, hi=1_000_000))
def _von_neumann(ctx):
    U = np.eye(3)
    U[1:, 1:] = rotation_matrix(ctx["theta"])
    v = np.array(ctx["v"])
    grid = [int(round(ctx["n"] / 10**k)) for k in range(3, -1, -1) if ctx["n"] >= 10**k * 10]
    grid = sorted(set(grid + [ctx["n"]]))
    r = von_neumann_projection(U, v, grid)
    ctx.close("projection-error", float(np.abs(r.projection - [v[0], 0, 0]).max()), 0.0, 1e-12)
    ctx.close("cesaro-error-at-n", r.errors[-1], 0.0, 1e-2, {"n": r.n_grid[-1]})
    steps = [b / a for a, b in zip(r.n_grid, r.n_grid[1:])]
    bad = [(q, g) for q, g in zip(r.ratios, steps) if not (g / 2 <= q <= 2 * g)]
    ctx.holds("rate-one-over-n", not bad, {"ratios": r.ratios, "grid": r.n_grid})
    ctx.details.update(errors=r.errors, grid=r.n_grid, constant=r.constant)


def _check_isp(p):
    g = np.array(p["g"])
    _require(g.shape[0] <= 8, "g must be at most 8 x 8")
    _require(abs(np.linalg.det(g)) > 1e-12, "g must be invertible")


def _growth_oracle(g) -> float:
    """``2 max(|log rho(g)|, |log rho(g^-1)|)`` from the eigenvalue moduli."""
    mods = np.abs(np.linalg.eigvals(g))
    return float(2 * max(abs(math.log(mods.max())), abs(math.log(mods.min()))))


@scenario("pos-isp-equality",
          "inf_p d(p, g p g^T) against the growth rate of g^n g^nT under the Thompson metric",
          "displacement of a congruence equals its growth rate",
          validate=_check_isp,
          g=Param("matrix", ((2.0, 0.0), (0.0, 1.0))),
          budget=Param("int", 4000, lo=10, hi=200_000),
          lhs_tol=Param("float", 1e-3, lo=0.0))
def _isp(ctx):
    g = np.array(ctx["g"])
    rep = isp_equality_report(g, search_budget=ctx["budget"], seed=ctx.seed)
    oracle = _growth_oracle(g)
    rhs_tol = 1e-9 if oracle == 0 and np.allclose(g.T @ g, np.eye(g.shape[0])) else 1e-3
    ctx.close("rhs-vs-eigenvalue-oracle", rep.rhs, oracle, rhs_tol)
    ctx.close("lhs-vs-eigenvalue-oracle", rep.lhs, oracle, ctx["lhs_tol"])
    ctx.details.update(rep.to_json())


@scenario("pos-kernel-invariance",
          "the kernel of a semipositive fixed point s is invariant under g^T",
          "fixed points on the boundary of the positive cone",
          validate=lambda p: _require(len(p["g"]) == len(p["s"]), "g and s differ in shape"),
          g=Param("matrix", ((1.0, 1.0), (0.0, 1.0))),
          s=Param("matrix", ((1.0, 0.0), (0.0, 0.0))))
def _kernel(ctx):
    g, s = np.array(ctx["g"]), np.array(ctx["s"])
    kc = kernel_invariance_check(g, s)
    ctx.close("fixed-residual", kc.fixed_residual, 0.0, 1e-10)
    ctx.close("kernel-leak", kc.leak, 0.0, 1e-10, {"kernel_dim": kc.kernel_dim})


@scenario("segal-inequality",
          "|exp(u+v)| <= |exp(u/2) exp(v) exp(u/2)| on random symmetric pairs",
          "Segal's inequality",
          pairs=Param("int", 1000, lo=1, hi=100_000),
          n_max=Param("int", 6, lo=1, hi=8))
def _segal(ctx):
    rng = ctx.rng
    worst = math.inf
    by_n = {}
    for n in range(1, ctx["n_max"] + 1):
        k = ctx["pairs"] // ctx["n_max"] + (n <= ctx["pairs"] % ctx["n_max"])
        if k == 0:
            continue
        u, v = random_sym(rng, n, 1.0, size=k), random_sym(rng, n, 1.0, size=k)
        gaps = segal_gap(u, v)
        by_n[n] = {"pairs": k, "min_gap": float(np.min(gaps)), "median_gap": float(np.median(gaps))}
        worst = min(worst, by_n[n]["min_gap"])
    # in dimension 1 the two sides agree, so the gap there is 0 up to rounding
    ctx.at_most("violation", -worst, 0.0, 1e-10, {"min_gap": worst})
    ctx.details["by_dimension"] = by_n


@scenario("pos-unbounded",
          "internal functionals h_p with d(I, p) > 2 exceed 1/2 at exp(I) or exp(-I)",
          "metric functionals of Pos are unbounded",
          witnesses=Param("int", 500, lo=1, hi=100_000))
def _pos_unbounded(ctx):
    rng = ctx.rng
    fails, count = [], 0
    for _ in range(ctx["witnesses"]):
        n = int(rng.integers(2, 7))
        Y = random_sym(rng, n)
        lam = symmetric_eigh(Y).lam
        Y *= rng.uniform(2.05, 8.0) / max(abs(lam[0]), abs(lam[-1]))
        w = unbounded_witness_check(sym_exp(Y))
        count += 1
        if not w.passed:
            fails.append({"h_at_a": w.h_at_a, "h_at_b": w.h_at_b})
    ctx.close("failed-witnesses", len(fails), 0, 0, {"checked": count, "failures": fails[:3]})


@scenario("linfty-unbounded",
          "internal functionals h_y of finite-dimensional l-infinity with |y| > 2 exceed 1/2 at -2(1,...,1) or 2(1,...,1)",
          "metric functionals of l-infinity are unbounded",
          witnesses=Param("int", 500, lo=1, hi=100_000),
          dim=Param("int", 4, lo=1, hi=1000))
def _linf_unbounded(ctx):
    rng = ctx.rng
    fails = []
    for _ in range(ctx["witnesses"]):
        y = rng.uniform(-1, 1, ctx["dim"])
        y *= rng.uniform(2.05, 50.0) / np.abs(y).max()
        w = unbounded_witness_linf(y)
        if not w.passed:
            fails.append({"y": y, "case": w.case})
    ctx.close("failed-witnesses", len(fails), 0, 0, {"failures": fails[:3]})


@scenario("linfty-classification",
          "limit data (A_f, a, B_f, b) of sequences in finite-dimensional l-infinity",
          "metric compactification of finite-dimensional l-infinity",
          probes=Param("int", 100, lo=1, hi=10_000))
def _linf_classify(ctx):
    ns = np.array([10.0**k for k in range(1, 9)])
    cases = {
        "opposite": (np.stack([ns, -ns], 1), ((0,), (0.0,), (1,), (0.0,)), (1.0, 2.0), 2.0),
        "half": (np.stack([ns, ns / 2], 1), ((0,), (0.0,), (), ()), (3.0, 100.0), -3.0),
    }
    for name, (ys, want, x, val) in cases.items():
        data = classify_limit_sequence(ys)
        got = (data.A_f, data.a, data.B_f, data.b)
        ctx.holds(f"{name}/classification", got == want, {"got": data.to_json()})
        ctx.close(f"{name}/value", eval_classified(data, x), val, 1e-12)
        xs = ctx.rng.uniform(-10, 10, (ctx["probes"], 2))
        gap = max(abs(eval_classified(data, p) - linf_horo(ys[-1], p)) for p in xs)
        ctx.close(f"{name}/consistency", gap, 0.0, 1e-4)
    # two rays with the same +-1 coordinates give one functional
    v1, v2 = np.array([1.0, 0.5, -1.0]), np.array([1.0, -0.3, -1.0])
    h1, h2 = busemann_from_ray(v1), busemann_from_ray(v2)
    xs = ctx.rng.uniform(-10, 10, (ctx["probes"], 3))
    gap = max(abs(eval_classified(h1, p) - eval_classified(h2, p)) for p in xs)
    ctx.close("distinct-rays-same-functional", gap, 0.0, 0.0)


@scenario("h2-tracking",
          "orbits of hyperbolic isometries of the half-plane track a geodesic ray sublinearly",
          "sublinear tracking in CAT(0) spaces",
          **{"lambda": Param("float", 2.0, lo=1e-6, hi=1e6)},
          n=Param("int", 100, lo=1, hi=10_000),
          beta=Param("float", 1.0),
          n_perturbed=Param("int", 200, lo=2, hi=100_000))
def _h2(ctx):
    lam = ctx["lambda"]
    m = MobiusMap.dilation(lam)
    ctx.close("tracking-value", tracking_value(m, ctx["n"]), 0.0, 0.0, {"n": ctx["n"]})
    zs = [random_h2_point(ctx.rng) for _ in range(100)]
    gap = max(abs(busemann_vertical(m(z)) - busemann_vertical(z) + math.log(lam)) for z in zs)
    ctx.close("busemann-shift", gap, 0.0, 1e-12)
    pert = MobiusMap.translation(ctx["beta"]) @ MobiusMap.dilation(max(lam, 1 / lam))
    curve = tracking_curve(pert, ctx["n_perturbed"])
    ctx.holds("perturbed-tracking-decreasing", bool(np.all(np.diff(curve) <= 1e-15)),
              {"first": curve[0], "last": curve[-1]})
    ctx.close("perturbed-tracking-at-n", curve[-1], 0.0, 1e-2, {"n": ctx["n_perturbed"]})


@scenario("alspach-isometry",
          "Alspach's map preserves L1 distances exactly and maps the set X into itself",
          "fixed-point-free isometry of a weakly compact convex set",
          pairs=Param("int", 200, lo=1, hi=100_000),
          max_level=Param("int", 6, lo=0, hi=20))
def _alspach(ctx):
    rng = ctx.rng
    T, sp = alspach_map(), DyadicL1Space()
    bad, outside = 0, 0
    for _ in range(ctx["pairs"]):
        x = random_alspach_point(rng, level=int(rng.integers(0, ctx["max_level"] + 1)))
        y = random_alspach_point(rng, level=int(rng.integers(0, ctx["max_level"] + 1)))
        bad += sp.distance(T(x), T(y)) != sp.distance(x, y)
        outside += not (T(x).in_alspach_set() and T(y).in_alspach_set())
    ctx.close("distance-mismatches", bad, 0, 0, {"pairs": ctx["pairs"]})
    ctx.close("images-outside-X", outside, 0, 0)


@scenario("prus-no-fixed-point",
          "Prus's map: ramp displacement 1/N, resolvent residuals tend to 0, no fixed point",
          "isometry with zero minimal displacement and no fixed point",
          N_max=Param("int", 64, lo=2, hi=4096))
def _prus(ctx):
    T, sp = prus_map(), EventuallyConstantSpace()
    wrong = [N for N in range(2, ctx["N_max"] + 1)
             if sp.distance(prus_ramp(N), T(prus_ramp(N))) != Fraction(1, N)]
    ctx.close("ramp-displacement-mismatches", len(wrong), 0, 0, {"N": wrong[:5]})
    _, rep = solver_run("prus")
    disp = [r.displacement for r in rep.converged_rows]
    ctx.holds("residuals-decreasing", all(b < a for a, b in zip(disp, disp[1:])),
              {"displacements": disp})
    ctx.close("residual-at-last-s", disp[-1], 0.0, 1e-5, {"s": rep.last.s})
    ctx.holds("no-zero-displacement", min(disp) > 0, {"min": min(disp)})


@scenario("zero-displacement-functional",
          "functionals at eps-fixed points of an isometry with d = 0 increase by at most eps",
          "isometries with vanishing minimal displacement",
          map=Param("str", "kakutani", choices=("kakutani", "prus", "insert-shift-l2", "shift-l1z")),
          probes=Param("int", 50, lo=1, hi=10_000))
def _eps(ctx):
    entry, rep = solver_run(ctx["map"])
    anchors = [r.point for r in rep.converged_rows]
    probes = entry.probes(ctx.rng, ctx["probes"])
    rows = epsilon_displacement_functional(entry.map, entry.space, [1e-1, 1e-2, 1e-3], probes,
                                           anchors=anchors)
    for r in rows:
        if not r.found:
            ctx.holds(f"eps={r.eps:g}/anchor-found", False)
            continue
        ctx.at_most(f"eps={r.eps:g}/increase", r.max_increase, r.eps, 1e-12)


@scenario("isometry-contract",
          "registry maps preserve distances on random pairs",
          "isometries and isometric embeddings",
          pairs=Param("int", 200, lo=1, hi=100_000))
def _isometries(ctx):
    for entry in REGISTRY.values():
        pairs = [(entry.sample(ctx.rng), entry.sample(ctx.rng)) for _ in range(ctx["pairs"])]
        d = isometry_defect(entry.map, entry.space, pairs)
        scale = max(1.0, max(float(entry.space.distance(x, y)) for x, y in pairs))
        ctx.close(f"{entry.name}/isometry-defect", float(d) / scale, 0.0, 1e-9)


@scenario("eigensolver",
          "Jacobi eigendecomposition of random symmetric matrices",
          "spectral calculus on the positive cone",
          matrices=Param("int", 100, lo=1, hi=100_000),
          n=Param("int", 8, lo=1, hi=64))
def _eig(ctx):
    S = random_sym(ctx.rng, ctx["n"], 1.0, size=ctx["matrices"])
    lam, Q = symmetric_eigh(S)
    scale = np.abs(S).max(axis=(1, 2))
    rec = np.abs(Q @ (lam[..., None] * np.swapaxes(Q, -1, -2)) - S).max(axis=(1, 2)) / scale
    orth = np.abs(np.swapaxes(Q, -1, -2) @ Q - np.eye(ctx["n"])).max()
    ctx.close("reconstruction", float(rec.max()), 0.0, 1e-10)
    ctx.close("orthogonality", float(orth), 0.0, 1e-10)
    ctx.holds("ascending", bool(np.all(np.diff(lam, axis=-1) >= 0)))


# ---------------------------------------------------------------------------
# the full check

SUITE: tuple = (
    ("bicombing-contract", {}),
    ("bicombing-contract", {"space": "pos", "pos_n": 2}),
    ("isometry-contract", {}),
    ("insert-shift-lemma-bound", {}),
    ("invariant-functional", {}),
    ("kakutani-invariance", {}),
    ("closed-form-agreement", {}),
    ("translation-number", {}),
    ("mean-ergodic-identity", {}),
    ("mean-ergodic-rotation", {}),
    ("mean-ergodic-shift-window", {}),
    ("power-bounded-ergodic", {}),
    ("von-neumann", {}),
    ("pos-isp-equality", {}),
    ("pos-isp-equality", {"g": ((math.cos(0.7), -math.sin(0.7)), (math.sin(0.7), math.cos(0.7))),
                          "lhs_tol": 1e-9}),
    ("pos-isp-equality", {"g": ((1.0, 1.0), (0.0, 1.0)), "lhs_tol": 5e-2}),
    ("pos-kernel-invariance", {}),
    ("segal-inequality", {}),
    ("pos-unbounded", {}),
    ("linfty-unbounded", {}),
    ("linfty-classification", {}),
    ("h2-tracking", {}),
    ("alspach-isometry", {}),
    ("prus-no-fixed-point", {}),
    ("zero-displacement-functional", {}),
    ("eigensolver", {}),
)

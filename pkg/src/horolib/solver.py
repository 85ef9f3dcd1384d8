"""Resolvent points, the s -> 1 schedule and the invariance checks for isometries.

For ``0 <= s < 1`` the map ``y -> T(r_s(y))``, with ``r_s(y) = sigma(x0, y, s)``,
is an ``s``-contraction; its fixed point ``y_s`` is the resolvent point.  The
functionals ``h_{y_s}`` along an increasing schedule of ``s`` approximate a
metric functional ``h`` with ``h(Tx) = h(x) - d``.

Two iteration strategies are used:

* affine maps on linear spaces (``T.linear_power`` set, linear bicombing) are
  composed by repeated doubling, ``z_{2N} = z_N + s^N L^N (z_N - x0)``, so the
  cost is logarithmic in the Picard iteration count;
* everything else runs plain Picard iteration.

Both stop on the a posteriori bound of the contraction principle.  Floating
point puts a floor under the reachable step size, proportional to the size of
the iterate; iterations that stop on that floor are marked ``"floor"`` and
carry their (larger) certified error.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .core import (
    DEFAULT_TOL,
    InvalidParameter,
    Isometry,
    MetricFunctional,
    MetricSpace,
    NonConvergenceError,
    NumericError,
    ResourceError,
    to_jsonable,
)
from .normed import EventuallyConstantSeq, FiniteSupportVector

EPS = np.finfo(float).eps
DEFAULT_SCHEDULE = tuple(1.0 - 2.0**-k for k in range(1, 21))
CONVERGED = ("ok", "floor")


@dataclass(frozen=True)
class SolverConfig:
    """Parameters of a schedule run.

    ``floor_factor`` scales the floating-point floor
    ``floor_factor * eps * max(1, d(x0, z))`` below which a step is treated as
    zero.  ``max_support`` bounds the stored length of sequence iterates.
    ``reanchor`` is the number of extra passes that restart from the best
    resolvent point found so far.
    """

    schedule: tuple = DEFAULT_SCHEDULE
    contraction_tol: float = 1e-10
    max_iter: int = 10**6
    probes: tuple = ()
    max_support: int = 2**23
    floor_factor: float = 64.0
    reanchor: int = 0

    def __post_init__(self):
        sched = tuple(float(s) for s in self.schedule)
        object.__setattr__(self, "schedule", sched)
        object.__setattr__(self, "probes", tuple(self.probes))
        if any(not 0 <= s < 1 for s in sched):
            raise InvalidParameter("schedule values must lie in [0, 1)")
        if any(b <= a for a, b in zip(sched, sched[1:])):
            raise InvalidParameter("schedule must be strictly increasing")
        if not self.contraction_tol > 0:
            raise InvalidParameter("contraction_tol must be positive")
        if self.max_iter < 1 or self.max_support < 1:
            raise InvalidParameter("max_iter and max_support must be positive")

    def with_schedule(self, schedule) -> "SolverConfig":
        return SolverConfig(schedule, self.contraction_tol, self.max_iter, self.probes,
                            self.max_support, self.floor_factor, self.reanchor)


def schedule_from_k(k_min: int = 1, k_max: int = 20) -> tuple:
    return tuple(1.0 - 2.0**-k for k in range(k_min, k_max + 1))


def point_size(x) -> int:
    if isinstance(x, FiniteSupportVector):
        return x.size
    if isinstance(x, EventuallyConstantSeq):
        return len(x)
    if isinstance(x, np.ndarray):
        return x.size
    return 1


def _sum_size(a, b) -> int:
    """Stored length of ``a + b`` without forming it."""
    if isinstance(a, FiniteSupportVector) and isinstance(b, FiniteSupportVector):
        if not a.size or not b.size:
            return a.size + b.size
        return max(a.stop, b.stop) - min(a.start, b.start)
    return max(point_size(a), point_size(b))


@dataclass
class Resolvent:
    point: Any
    s: float
    iters: int
    step: float
    certified_error: float
    residual: float
    status: str
    method: str


def _floor(cfg, space, z):
    return cfg.floor_factor * EPS * max(1.0, float(space.distance(space.base_point, z)))


def _is_linear_space(space, T):
    from .normed import EventuallyConstantSpace, SequenceSpace, VectorSpace

    return T.is_affine and isinstance(space, (SequenceSpace, EventuallyConstantSpace, VectorSpace))


def _resolvent_doubling(T, space, s, cfg):
    x0 = space.base_point
    z = T(x0)
    N = 1
    tol = cfg.contraction_tol
    compositions = 1
    while True:
        if compositions >= cfg.max_iter:
            raise NonConvergenceError(
                f"doubling used max_iter={cfg.max_iter} compositions at s={s}", z, math.nan, N
            )
        compositions += 1
        sN = s**N
        w = T.linear_power(N, z - x0)
        need = _sum_size(z, w)
        if need > cfg.max_support:
            raise ResourceError(
                f"resolvent iterate needs {need} stored entries (limit {cfg.max_support})"
            )
        nz = z + w * sN
        step = float(space.distance(nz, z))
        z, N = nz, 2 * N
        bound = sN / (1 - sN) * step if sN < 1 else math.inf
        if bound <= tol:
            return z, N, step, bound, "ok"
        if step <= _floor(cfg, space, z) and sN < 0.5:
            return z, N, step, bound, "floor"


def _resolvent_picard(T, space, s, cfg):
    z = space.base_point
    tol = cfg.contraction_tol
    factor = s / (1 - s)
    step = math.nan
    for n in range(1, cfg.max_iter + 1):
        nz = T(space.contraction(s, z))
        step = float(space.distance(nz, z))
        z = nz
        bound = factor * step
        if bound <= tol:
            return z, n, step, bound, "ok"
        if step <= _floor(cfg, space, z):
            return z, n, step, bound, "floor"
    raise NonConvergenceError(f"Picard iteration hit max_iter={cfg.max_iter} at s={s}", z, step,
                              cfg.max_iter)


def resolvent_point(T: Isometry, space: MetricSpace, s: float, cfg: SolverConfig | None = None
                    ) -> Resolvent:
    """Fixed point of ``y -> T(sigma(x0, y, s))``, iterated from the base point.

    Raises
    ------
    NonConvergenceError
        ``max_iter`` exhausted; carries the last iterate and step.
    ResourceError
        A sequence iterate outgrew ``cfg.max_support``.
    NumericError
        Overflow or loss of positivity along the iteration.
    """
    cfg = cfg or SolverConfig()
    if not 0 <= s < 1:
        raise InvalidParameter(f"s={s} outside [0, 1)")
    if s == 0:
        y = T(space.base_point)
        return Resolvent(y, 0.0, 1, 0.0, 0.0, 0.0, "ok", "direct")
    with np.errstate(over="raise", invalid="raise"):
        try:
            if _is_linear_space(space, T):
                method = "doubling"
                z, iters, step, bound, status = _resolvent_doubling(T, space, s, cfg)
            else:
                method = "picard"
                z, iters, step, bound, status = _resolvent_picard(T, space, s, cfg)
            residual = float(space.distance(z, T(space.contraction(s, z))))
        except (FloatingPointError, OverflowError) as exc:
            raise NumericError(f"overflow while iterating at s={s}: {exc}") from exc
    if not math.isfinite(residual):
        raise NumericError(f"non-finite residual at s={s}")
    # the contraction principle certifies d(y, y_s) <= residual / (1 - s) as well
    cert = min(bound, residual / (1 - s))
    return Resolvent(z, s, iters, step, cert, residual, status, method)


@dataclass
class SolverRow:
    s: float
    status: str
    iters: int = 0
    point: Any = None
    dist_x0: float = math.nan
    bound: float = math.nan
    lemma_ok: bool | None = None
    displacement: float = math.nan
    residual: float = math.nan
    residual_target: float = math.nan
    certified_error: float = math.nan
    method: str = ""
    message: str = ""

    @property
    def converged(self) -> bool:
        return self.status in CONVERGED

    def to_json(self, include_point=False) -> dict:
        out = {
            "s": self.s, "status": self.status, "iters": self.iters, "dist_x0": self.dist_x0,
            "bound": self.bound, "lemma_ok": self.lemma_ok, "displacement": self.displacement,
            "residual": self.residual, "residual_target": self.residual_target,
            "certified_error": self.certified_error, "method": self.method,
        }
        if self.message:
            out["message"] = self.message
        if include_point:
            out["point"] = to_jsonable(self.point)
        return to_jsonable(out)


@dataclass
class SolverReport:
    map_name: str
    space: MetricSpace
    cfg: SolverConfig
    x0_displacement: float
    rows: list
    probe_table: np.ndarray
    d_hat: float
    passes: int = 1

    @property
    def converged_rows(self) -> list:
        return [r for r in self.rows if r.converged]

    @property
    def last(self) -> SolverRow:
        rows = self.converged_rows
        if not rows:
            raise NonConvergenceError("no schedule row converged")
        return rows[-1]

    def limit_functional(self) -> MetricFunctional:
        """Empirical functional along the converged resolvent points (last one evaluates)."""
        return MetricFunctional.empirical(self.space, [r.point for r in self.converged_rows])

    def row_functional(self, row: SolverRow) -> MetricFunctional:
        return MetricFunctional.at_point(self.space, row.point)

    def to_json(self, include_points=False) -> dict:
        return to_jsonable({
            "map": self.map_name,
            "space": self.space.name,
            "schedule": list(self.cfg.schedule),
            "contraction_tol": self.cfg.contraction_tol,
            "x0_displacement": self.x0_displacement,
            "d_hat": self.d_hat,
            "passes": self.passes,
            "rows": [r.to_json(include_points) for r in self.rows],
            "probe_table": self.probe_table,
        })

    def probe_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["s", "probe_id", "h_value"])
        for row, vals in zip(self.rows, self.probe_table):
            for j, v in enumerate(vals):
                w.writerow([repr(row.s), j, repr(float(v))])
        return buf.getvalue()


def _lemma_slack(bound):
    return 1e-9 + 64 * EPS * abs(bound)


def _run_once(T, space, cfg):
    x0 = space.base_point
    d0 = float(space.distance(x0, T(x0)))
    rows = []
    for s in cfg.schedule:
        try:
            res = resolvent_point(T, space, s, cfg)
        except NonConvergenceError as exc:
            rows.append(SolverRow(s, "nonconverged", exc.iterations, exc.last_iterate,
                                  residual=float(exc.residual), message=str(exc)))
            continue
        except ResourceError as exc:
            rows.append(SolverRow(s, "resource", message=str(exc)))
            continue
        except NumericError as exc:
            rows.append(SolverRow(s, "overflow", message=str(exc)))
            continue
        y = res.point
        dist = float(space.distance(x0, y))
        bound = d0 / (1 - s)
        disp = float(space.distance(y, T(y)))
        target = cfg.contraction_tol * (1 - s) / max(s, 0.5)
        status = res.status
        if res.residual > max(target, _floor(cfg, space, y)) and status == "ok":
            status = "floor"
        rows.append(SolverRow(
            s, status, res.iters, y, dist, bound, dist <= bound + _lemma_slack(bound), disp,
            res.residual, target, res.certified_error, res.method,
        ))
    return d0, rows


def run_schedule(T: Isometry, space: MetricSpace, cfg: SolverConfig | None = None) -> SolverReport:
    """Resolvent points along ``cfg.schedule`` with the probe table of ``h_{y_s}``.

    Failed rows (non-convergence, resource or overflow) are recorded with their
    status and the schedule continues.  ``d_hat`` is the smallest displacement
    observed at a converged resolvent point.  With ``cfg.reanchor > 0`` the run
    is repeated from the best resolvent point.
    """
    cfg = cfg or SolverConfig()
    passes = 1
    d0, rows = _run_once(T, space, cfg)
    for _ in range(cfg.reanchor):
        good = [r for r in rows if r.converged]
        if not good:
            break
        best = min(good, key=lambda r: r.displacement)
        space = space.rebased(best.point)
        d0, rows = _run_once(T, space, cfg)
        passes += 1
    good = [r for r in rows if r.converged]
    d_hat = min((r.displacement for r in good), default=math.nan)
    probes = [space.validate(p) for p in cfg.probes]
    table = np.full((len(rows), len(probes)), np.nan)
    for i, r in enumerate(rows):
        if r.converged:
            table[i] = [space.horo(r.point, p) for p in probes]
    return SolverReport(T.name, space, cfg, d0, rows, table, d_hat, passes)


@dataclass
class InvarianceReport:
    s: float
    d_hat: float
    x0_displacement: float
    max_violation_lower: float
    max_violation_upper: float
    max_abs_defect: float
    n_probes: int

    def to_json(self):
        return to_jsonable(self.__dict__)


def invariance_report(report: SolverReport, T: Isometry, probes: Sequence) -> InvarianceReport:
    """Check both chains of inequalities for the last converged row.

    ``max_violation_lower = max_x h(Tx) - h(x) + d_hat`` (lower chain predicts
    ``<= 0`` up to the schedule error) and
    ``max_violation_upper = max_x h(x) - h(Tx) - d(x0, Tx0)`` (isometric chain
    predicts ``<= 0``).  ``max_abs_defect`` is ``max |h(Tx) - h(x) + d_hat|``.
    """
    row = report.last
    space = report.space
    hx = np.array([space.horo(row.point, x) for x in probes])
    hTx = np.array([space.horo(row.point, T(x)) for x in probes])
    diff = hTx - hx
    return InvarianceReport(
        s=row.s,
        d_hat=report.d_hat,
        x0_displacement=report.x0_displacement,
        max_violation_lower=float(np.max(diff + report.d_hat)),
        max_violation_upper=float(np.max(-diff - report.x0_displacement)),
        max_abs_defect=float(np.max(np.abs(diff + report.d_hat))),
        n_probes=len(hx),
    )


@dataclass
class StabilizationCheck:
    stabilized: bool
    point: Any
    spread: float
    displacement: float


def stabilization_check(report: SolverReport, tol: float = 1e-8, tail: int = 3) -> StabilizationCheck:
    """Whether the last resolvent points agree, i.e. the functional is an internal ``h_y``.

    When they do, ``y`` should be a fixed point: ``displacement`` is ``d(y, Ty)``
    (compare against ``tol`` and ``d_hat``).
    """
    rows = report.converged_rows[-tail:]
    if len(rows) < 2:
        return StabilizationCheck(False, None, math.inf, math.nan)
    sp = report.space
    spread = max(float(sp.distance(a.point, b.point)) for a, b in zip(rows, rows[1:]))
    y = rows[-1].point
    return StabilizationCheck(spread <= tol, y, spread, rows[-1].displacement)


@dataclass
class EpsilonRow:
    eps: float
    found: bool
    anchor_displacement: float = math.nan
    values: np.ndarray | None = None
    max_increase: float = math.nan
    max_decrease: float = math.nan
    anchor: Any = None

    def to_json(self):
        return to_jsonable({k: v for k, v in self.__dict__.items() if k != "anchor"})


def epsilon_displacement_functional(
    T: Isometry,
    space: MetricSpace,
    eps_schedule: Sequence[float],
    probes: Sequence,
    anchors: Callable[[float], Any] | Sequence | None = None,
    cfg: SolverConfig | None = None,
) -> list:
    """Probe table of ``h_y`` for anchors ``y`` with ``d(y, Ty) < eps``.

    Anchor candidates come from ``anchors`` (a function of ``eps`` or a list of
    points); by default the resolvent points of a schedule run.  The first
    candidate whose displacement is below ``eps`` is used.  Each row records
    ``max_increase = max h(Tx) - h(x)`` (at most ``eps`` when ``d(T) = 0``) and
    ``max_decrease = max h(x) - h(Tx)``.
    """
    eps_schedule = list(eps_schedule)
    if any(b >= a for a, b in zip(eps_schedule, eps_schedule[1:])):
        raise InvalidParameter("eps_schedule must be decreasing")
    probes = [space.validate(p) for p in probes]
    pool = None
    if anchors is None:
        rep = run_schedule(T, space, cfg or SolverConfig())
        pool = [r.point for r in rep.converged_rows]
    elif not callable(anchors):
        pool = list(anchors)
    out = []
    for eps in eps_schedule:
        cands = [anchors(eps)] if pool is None else pool
        y, dy = None, math.nan
        for c in cands:
            dc = float(space.distance(c, T(c)))
            if dc < eps:
                y, dy = c, dc
                break
        if y is None:
            out.append(EpsilonRow(eps, False))
            continue
        hx = np.array([space.horo(y, x) for x in probes])
        hTx = np.array([space.horo(y, T(x)) for x in probes])
        out.append(EpsilonRow(eps, True, dy, hx, float(np.max(hTx - hx)), float(np.max(hx - hTx)), y))
    return out

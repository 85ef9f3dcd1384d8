"""Mean ergodic statements for norm-preserving and power-bounded operators.

The metric functional of the affine isometry ``x -> Ux + v`` evaluated along
the orbit sums ``sum_{k<n} U^k v`` gives ``-n d`` with ``d = inf_x ||Ux + v - x||``;
dividing by ``n`` turns this into a statement about Cesaro averages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import null_space

from .core import InvalidParameter, Isometry, MetricSpace, to_jsonable
from .normed import L2, NormTag, VectorSpace, affine_map, linear_map, norm_of
from .solver import SolverConfig, SolverReport, run_schedule


@dataclass(frozen=True)
class LinearOperator:
    """A real ``n x n`` matrix acting on ``R^n`` normed by ``norm_tag``."""

    matrix: np.ndarray
    norm_tag: NormTag = L2

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidParameter("operator matrix must be square")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "norm_tag", NormTag.parse(self.norm_tag))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, x):
        return self.matrix @ np.asarray(x, dtype=float)

    def norm(self, x) -> float:
        return float(norm_of(np.asarray(x, dtype=float), self.norm_tag))

    def space(self) -> VectorSpace:
        return VectorSpace(self.n, self.norm_tag)

    def isometry(self, name="U") -> Isometry:
        return linear_map(self.matrix, name)

    def norm_preservation_defect(self, rng, trials: int = 100) -> float:
        xs = rng.normal(size=(trials, self.n))
        return max(abs(self.norm(self(x)) - self.norm(x)) for x in xs)


def _apply(U, x):
    if isinstance(U, np.ndarray):
        return U @ x
    return U(x)


def cesaro_average(U, v, n: int):
    """``(1/n) sum_{k<n} U^k v`` by a running sum.

    ``U`` may be a matrix, a :class:`LinearOperator` or any linear callable
    (e.g. the shift on finitely supported sequences).
    """
    if n < 1:
        raise InvalidParameter("n must be at least 1")
    return _orbit_sum(U, v, n) * (1.0 / n)


def _orbit_sum(U, v, n: int):
    U = np.asarray(U, dtype=float) if isinstance(U, (list, tuple)) else U
    w = np.asarray(v, dtype=float) if isinstance(v, (list, tuple)) else v
    acc = w
    for _ in range(n - 1):
        w = _apply(U, w)
        acc = acc + w
    return acc


def _cesaro_curve(U, v, grid):
    """Cesaro averages at every ``n`` in the increasing ``grid`` in one pass."""
    grid = sorted(int(n) for n in grid)
    out = {}
    w = v
    acc = v
    k = 1
    for n in grid:
        while k < n:
            w = _apply(U, w)
            acc = acc + w
            k += 1
        out[n] = acc * (1.0 / n)
    return out


@dataclass
class MeanIdentityReport:
    n_grid: list
    lhs_per_n: list
    rhs: float
    gap: float
    converged: bool
    d_lstsq: float | None = None
    solver: SolverReport | None = field(default=None, repr=False)

    def to_json(self):
        return to_jsonable({
            "n_grid": self.n_grid, "lhs_per_n": self.lhs_per_n, "rhs": self.rhs,
            "gap": self.gap, "converged": self.converged, "d_lstsq": self.d_lstsq,
        })


def affine_isometry(U, v) -> Isometry:
    if isinstance(U, LinearOperator):
        return affine_map(U.isometry(), np.asarray(v, dtype=float), name="Ux+v")
    if isinstance(U, np.ndarray):
        return affine_map(linear_map(U), np.asarray(v, dtype=float), name="Ux+v")
    if isinstance(U, Isometry):
        return affine_map(U, v, name=f"{U.name}+v")
    raise InvalidParameter("U must be a matrix, LinearOperator or linear Isometry")


def mean_identity_report(U, v, space: MetricSpace | None = None, cfg: SolverConfig | None = None,
                         n_grid: Sequence[int] = (1, 10, 100, 1000)) -> MeanIdentityReport:
    """Compare ``(1/n) h(sum_{k<n} U^k v)`` with ``-d`` for the affine map ``x -> Ux + v``.

    ``h`` is the last converged resolvent functional of the solver and ``d``
    its ``d_hat``.  In Euclidean norm ``d`` is cross-checked as the distance
    from ``-v`` to the range of ``U - I`` (``d_lstsq``).
    """
    if space is None:
        if isinstance(U, LinearOperator):
            space = U.space()
        elif isinstance(U, np.ndarray):
            space = VectorSpace(U.shape[0], L2)
        else:
            raise InvalidParameter("a space is required for an abstract linear map")
    T = affine_isometry(U, v)
    rep = run_schedule(T, space, cfg or SolverConfig())
    good = rep.converged_rows
    if not good:
        return MeanIdentityReport(list(n_grid), [], math.nan, math.inf, False, solver=rep)
    y = good[-1].point
    lin = U.matrix if isinstance(U, LinearOperator) else U
    sums = _cesaro_curve(lin, v, n_grid)
    lhs = [float(space.horo(y, sums[n] * n)) / n for n in n_grid]
    rhs = -rep.d_hat
    d_ls = None
    tag = getattr(space, "norm", None)
    if isinstance(lin, np.ndarray) and tag == L2:
        M = lin - np.eye(lin.shape[0])
        x, *_ = np.linalg.lstsq(M, -np.asarray(v, dtype=float), rcond=None)
        d_ls = float(np.linalg.norm(M @ x + v))
    gap = max(abs(a - rhs) for a in lhs)
    return MeanIdentityReport(list(n_grid), lhs, rhs, gap, True, d_ls, rep)


@dataclass
class VonNeumannReport:
    projection: np.ndarray
    n_grid: list
    errors: list
    constant: float
    ratios: list

    def to_json(self):
        return to_jsonable(self.__dict__)


def invariant_projection(U) -> np.ndarray:
    """Orthogonal projection onto ``ker(U - I)``."""
    U = np.asarray(U.matrix if isinstance(U, LinearOperator) else U, dtype=float)
    K = null_space(U - np.eye(U.shape[0]), rcond=1e-10)
    return K @ K.T


def von_neumann_projection(U, v, n_grid: Sequence[int] = (10, 100, 1000, 10_000)) -> VonNeumannReport:
    """Projection of ``v`` onto the ``U``-invariant vectors and the Cesaro error curve.

    ``constant`` is ``max_n n * error(n)``; ``ratios`` are successive error
    ratios along the grid (a ``1/n`` rate gives the grid ratio).
    """
    U = np.asarray(U.matrix if isinstance(U, LinearOperator) else U, dtype=float)
    if np.abs(U.T @ U - np.eye(U.shape[0])).max() > 1e-10:
        raise InvalidParameter("von Neumann's theorem is stated for orthogonal U")
    v = np.asarray(v, dtype=float)
    P = invariant_projection(U) @ v
    curve = _cesaro_curve(U, v, n_grid)
    grid = sorted(int(n) for n in n_grid)
    errs = [float(np.linalg.norm(curve[n] - P)) for n in grid]
    const = max(n * e for n, e in zip(grid, errs))
    ratios = [a / b if b > 0 else math.inf for a, b in zip(errs, errs[1:])]
    return VonNeumannReport(P, grid, errs, const, ratios)


@dataclass
class PowerBoundedNorm:
    value: float  # sup over 0 <= k <= k_max
    value_positive: float  # sup over 1 <= k <= k_max
    tail_bound: float
    exact: bool
    orbit_norms: np.ndarray

    def to_json(self):
        return to_jsonable(self.__dict__)


def _operator_norm(M, tag: NormTag) -> float:
    if tag.kind == "l1":
        return float(np.abs(M).sum(axis=0).max())
    if tag.kind == "linf":
        return float(np.abs(M).sum(axis=1).max())
    if tag.kind == "l2":
        return float(np.linalg.norm(M, 2))
    raise InvalidParameter(f"no operator norm for {tag}")


def power_bounded_norm(A, x, k_max: int = 200, norm=L2, bound: float | None = None
                       ) -> PowerBoundedNorm:
    """``sup_{0<=k<=k_max} ||A^k x||`` together with the ``k > 0`` variant.

    Boundedness of the powers is certified by ``bound`` or by the operator norms
    ``||A^k||`` not growing over the second half of the range.  ``tail_bound``
    bounds ``||A^k x||`` for ``k > k_max`` by ``M ||A^{k_max} x||`` with ``M``
    the observed bound on the powers; ``exact`` says the tail cannot exceed the
    reported sup.
    """
    A = np.asarray(A.matrix if isinstance(A, LinearOperator) else A, dtype=float)
    tag = NormTag.parse(norm)
    x = np.asarray(x, dtype=float)
    P = np.eye(A.shape[0])
    vals, opn = [], []
    for _ in range(k_max + 1):
        vals.append(float(norm_of(P @ x, tag)))
        opn.append(_operator_norm(P, tag))
        P = A @ P
    vals, opn = np.array(vals), np.array(opn)
    half = len(opn) // 2
    M = bound if bound is not None else float(opn.max())
    if bound is None and opn[half:].max() > opn[: half + 1].max() * (1 + 1e-9):
        raise InvalidParameter("powers of A are not bounded on the sampled range")
    if k_max >= 2 and vals[-1] > vals[:-1].max() * (1 + 1e-12) and vals[-1] > 0:
        raise InvalidParameter("||A^k x|| is still increasing at k_max")
    tail = M * vals[-1]
    sup = float(vals.max())
    sup_pos = float(vals[1:].max()) if len(vals) > 1 else 0.0
    return PowerBoundedNorm(sup, sup_pos, float(tail), tail <= sup, vals)


def derived_norm(A, k_max: int = 200, norm=L2) -> Callable:
    """The norm ``x -> sup_{k>=0} ||A^k x||`` as a callable for :class:`VectorSpace`."""
    A = np.asarray(A.matrix if isinstance(A, LinearOperator) else A, dtype=float)

    tag = NormTag.parse(norm)
    powers = [np.eye(A.shape[0])]
    for _ in range(k_max):
        powers.append(A @ powers[-1])
    stack = np.array(powers)

    def f(x):
        return float(max(norm_of(v, tag) for v in stack @ np.asarray(x, dtype=float)))

    return f


def affinity_defect(h: Callable, a, b, ts=np.linspace(0, 1, 11)) -> float:
    """``max_t |h((1-t)a + t b) - (1-t)h(a) - t h(b)|`` over the segment probes."""
    ha, hb = h(a), h(b)
    return max(abs(h((1 - t) * a + t * b) - (1 - t) * ha - t * hb) for t in ts)

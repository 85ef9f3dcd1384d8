"""The cone of symmetric positive definite matrices with the Thompson metric.

Every function accepts a single matrix ``(n, n)`` or a stack ``(..., n, n)``;
property checks over thousands of random triples go through one batched
eigensolver call instead of a Python loop.

The eigensolver is a cyclic Jacobi method written out here, so that every
distance, logarithm and exponential on the cone goes through one audited
kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .core import (
    InvalidParameter,
    Isometry,
    MetricSpace,
    NumericError,
    check_t,
)

SPD_FLOOR = 1e-12
MAX_SWEEPS = 100
# rotation threshold relative to sqrt(|a_pp a_qq|); keeps small eigenvalues accurate
_REL_OFFDIAG = 1e-15
_ABS_OFFDIAG = 1e-300


class EigenDecomposition(NamedTuple):
    """``S = Q @ diag(lam) @ Q.T`` with ``lam`` ascending."""

    lam: np.ndarray
    Q: np.ndarray


def _as_stack(S):
    A = np.asarray(S, dtype=float)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2]:
        raise InvalidParameter(f"expected square matrices, got shape {A.shape}")
    return A


def _sym(A):
    return 0.5 * (A + np.swapaxes(A, -1, -2))


def symmetric_eigh(S, max_sweeps: int = MAX_SWEEPS) -> EigenDecomposition:
    """Eigendecomposition of symmetric matrices by cyclic Jacobi rotations.

    A rotation on the pair ``(p, q)`` is skipped once
    ``|a_pq| <= 1e-15 * sqrt(|a_pp a_qq|)``; the sweep loop ends when a whole
    sweep skips every pair.  This relative criterion (rather than an absolute
    off-diagonal norm) keeps tiny eigenvalues of well-scaled positive definite
    matrices accurate, which the logarithm needs.

    Raises
    ------
    NumericError
        Non-finite input, or no convergence within ``max_sweeps`` sweeps.
    """
    A0 = _as_stack(S)
    n = A0.shape[-1]
    if A0.ndim == 2:
        rows = A0.tolist()
        if not all(math.isfinite(v) for row in rows for v in row):
            raise NumericError("non-finite entries in eigensolver input")
        rows = [[0.5 * (rows[i][j] + rows[j][i]) for j in range(n)] for i in range(n)]
        lam, V = _jacobi_single(rows, n, max_sweeps)
        return EigenDecomposition(np.array(lam), np.array(V))
    if not np.all(np.isfinite(A0)):
        raise NumericError("non-finite entries in eigensolver input")
    batch = A0.shape[:-2]
    A = _sym(A0).reshape(-1, n, n).copy()
    m = A.shape[0]
    scale = np.abs(A).reshape(m, -1).max(axis=1)
    scale[scale == 0] = 1.0
    A /= scale[:, None, None]
    V = np.broadcast_to(np.eye(n), (m, n, n)).copy()

    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[:, p, q]
                app, aqq = A[:, p, p], A[:, q, q]
                active = np.abs(apq) > np.maximum(
                    _REL_OFFDIAG * np.sqrt(np.abs(app * aqq)), _ABS_OFFDIAG
                )
                if not active.any():
                    continue
                rotated = True
                idx = np.flatnonzero(active) if not active.all() else slice(None)
                a_pq = apq[idx]
                theta = (aqq[idx] - app[idx]) / (2.0 * a_pq)
                sgn = np.where(theta >= 0, 1.0, -1.0)
                t = sgn / (np.abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                Ai = A[idx]
                Vi = V[idx]
                c3, s3 = c[:, None], s[:, None]
                colp, colq = Ai[:, :, p].copy(), Ai[:, :, q].copy()
                Ai[:, :, p] = c3 * colp - s3 * colq
                Ai[:, :, q] = s3 * colp + c3 * colq
                rowp, rowq = Ai[:, p, :].copy(), Ai[:, q, :].copy()
                Ai[:, p, :] = c3 * rowp - s3 * rowq
                Ai[:, q, :] = s3 * rowp + c3 * rowq
                Ai[:, p, q] = 0.0
                Ai[:, q, p] = 0.0
                vp, vq = Vi[:, :, p].copy(), Vi[:, :, q].copy()
                Vi[:, :, p] = c3 * vp - s3 * vq
                Vi[:, :, q] = s3 * vp + c3 * vq
                A[idx] = Ai
                V[idx] = Vi
        if not rotated:
            break
    else:
        raise NumericError(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")

    lam = np.diagonal(A, axis1=1, axis2=2) * scale[:, None]
    order = np.argsort(lam, axis=1)
    lam = np.take_along_axis(lam, order, axis=1)
    V = np.take_along_axis(V, order[:, None, :], axis=2)
    return EigenDecomposition(lam.reshape(batch + (n,)), V.reshape(batch + (n, n)))


def _jacobi_single(A: list, n: int, max_sweeps: int):
    """Scalar version of the batched sweep for one matrix (nested lists, no numpy overhead)."""
    scale = max(abs(v) for row in A for v in row) or 1.0
    A = [[v / scale for v in row] for row in A]
    V = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p][q]
                app, aqq = A[p][p], A[q][q]
                if abs(apq) <= max(_REL_OFFDIAG * math.sqrt(abs(app * aqq)), _ABS_OFFDIAG):
                    continue
                rotated = True
                theta = (aqq - app) / (2.0 * apq)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                for row in A:
                    ap, aq = row[p], row[q]
                    row[p] = c * ap - s * aq
                    row[q] = s * ap + c * aq
                rp, rq = A[p], A[q]
                for k in range(n):
                    ap, aq = rp[k], rq[k]
                    rp[k] = c * ap - s * aq
                    rq[k] = s * ap + c * aq
                rp[q] = rq[p] = 0.0
                for row in V:
                    vp, vq = row[p], row[q]
                    row[p] = c * vp - s * vq
                    row[q] = s * vp + c * vq
        if not rotated:
            break
    else:
        raise NumericError(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")
    lam = [A[i][i] * scale for i in range(n)]
    order = sorted(range(n), key=lam.__getitem__)
    return [lam[i] for i in order], [[row[i] for i in order] for row in V]


def _funm(S, f, check_positive=False):
    lam, Q = symmetric_eigh(S)
    if check_positive and np.any(lam <= 0):
        raise NumericError("matrix lost positive definiteness")
    return (Q * f(lam)[..., None, :]) @ np.swapaxes(Q, -1, -2)


def sym_exp(S) -> np.ndarray:
    """Matrix exponential of symmetric matrices."""
    with np.errstate(over="raise"):
        try:
            return _sym(_funm(S, np.exp))
        except FloatingPointError as exc:
            raise NumericError("overflow in matrix exponential") from exc


def spd_log(P) -> np.ndarray:
    return _sym(_funm(P, np.log, check_positive=True))


def spd_power(P, t: float) -> np.ndarray:
    return _sym(_funm(P, lambda lam: np.exp(t * np.log(lam)), check_positive=True))


def spd_sqrt(P) -> np.ndarray:
    return _sym(_funm(P, np.sqrt, check_positive=True))


def spd_invsqrt(P) -> np.ndarray:
    return _sym(_funm(P, lambda lam: 1.0 / np.sqrt(lam), check_positive=True))


def validate_spd(P, floor: float = SPD_FLOOR) -> np.ndarray:
    """Symmetrize ``P`` and check all eigenvalues exceed ``floor``."""
    A = _as_stack(P)
    if not np.all(np.isfinite(A)):
        raise InvalidParameter("matrix has non-finite entries")
    asym = np.abs(A - np.swapaxes(A, -1, -2)).max(initial=0.0)
    if asym > 1e-8 * max(1.0, np.abs(A).max(initial=0.0)):
        raise InvalidParameter(f"matrix is not symmetric (asymmetry {asym:.3g})")
    A = _sym(A)
    lam = symmetric_eigh(A).lam
    if np.any(lam <= floor):
        raise InvalidParameter(f"matrix is not positive definite (min eigenvalue {lam.min():.3g})")
    return A


def _relative_lambda_max(p, q):
    R = spd_invsqrt(p)
    return symmetric_eigh(_sym(R @ q @ R)).lam[..., -1]


def thompson_distance(p, q) -> np.ndarray | float:
    """``max_i |log lambda_i(p^{-1/2} q p^{-1/2})|``.

    Computed as ``max(|log lam_max(p^-1 q)|, |log lam_max(q^-1 p)|)`` so that
    both extreme eigenvalues come out with relative accuracy even when the pair
    is badly conditioned.
    """
    p, q = _as_stack(p), _as_stack(q)
    if p.shape[-1] != q.shape[-1]:
        raise InvalidParameter("matrices of different dimension")
    hi = _relative_lambda_max(p, q)
    lo = _relative_lambda_max(q, p)
    if np.any(hi <= 0) or np.any(lo <= 0) or not (np.all(np.isfinite(hi)) and np.all(np.isfinite(lo))):
        raise NumericError("relative eigenvalues left the positive reals")
    d = np.maximum(np.abs(np.log(hi)), np.abs(np.log(lo)))
    return float(d) if d.ndim == 0 else d


def exp_bicombing(p, q, t) -> np.ndarray:
    """``p^{1/2} exp(t log(p^{-1/2} q p^{-1/2})) p^{1/2}``; the geodesic from ``p`` to ``q``."""
    check_t(t)
    p, q = _as_stack(p), _as_stack(q)
    if t == 0:
        return p.copy()
    if t == 1:
        return q.copy()
    lam, Q = symmetric_eigh(p)
    if np.any(lam <= 0):
        raise NumericError("matrix lost positive definiteness")
    Qt = np.swapaxes(Q, -1, -2)
    half = (Q * np.sqrt(lam)[..., None, :]) @ Qt
    ihalf = (Q / np.sqrt(lam)[..., None, :]) @ Qt
    inner = spd_power(_sym(ihalf @ q @ ihalf), t)
    return _sym(half @ inner @ half)


def _check_invertible(g):
    g = _as_stack(g)
    if abs(np.linalg.det(g)) <= 1e-12:
        raise InvalidParameter("congruence matrix is singular")
    return g


def congruence_apply(g, p) -> np.ndarray:
    """``g p g^T``."""
    g = _check_invertible(g)
    return _sym(g @ _as_stack(p) @ g.T)


def _log_sigma_max(M):
    lam = symmetric_eigh(M @ np.swapaxes(M, -1, -2)).lam[..., -1]
    return 0.5 * np.log(lam)


def _power_log_extremes(h, n_max: int):
    """``log sigma_max(h^n)`` and ``log sigma_max(h^-n)`` for ``n = 1..n_max``.

    Powers are renormalized by their largest entry each step and the scale
    accumulated in log form, so nothing overflows.
    """
    h = np.asarray(h, dtype=float)
    hinv = np.linalg.inv(h)
    k = h.shape[0]
    out = []
    for base in (h, hinv):
        mats = np.empty((n_max, k, k))
        logs = np.empty(n_max)
        G, L = np.eye(k), 0.0
        for n in range(n_max):
            G = base @ G
            m = np.abs(G).max()
            if not np.isfinite(m) or m == 0:
                raise NumericError("matrix power lost finiteness despite renormalization")
            G = G / m
            L += math.log(m)
            mats[n], logs[n] = G, L
        out.append(logs + _log_sigma_max(mats))
    return out[0], out[1]


def _orbit_distances(g):
    g = np.asarray(g, dtype=float)

    def orbit(x, n_max):
        x = np.asarray(x, dtype=float)
        lam, Q = symmetric_eigh(x)
        Qt = Q.T
        h = (Q / np.sqrt(lam)) @ Qt @ g @ (Q * np.sqrt(lam)) @ Qt
        up, down = _power_log_extremes(h, n_max)
        return 2.0 * np.maximum(np.abs(up), np.abs(down))

    return orbit


def tau_congruence(g, n_max: int):
    """Translation number of ``p -> g p g^T`` from the base point ``I``.

    Returns ``(estimate, partials)`` with
    ``partials[n-1] = (1/n) max_i |log lambda_i(g^n g^{nT})| = d(I, g^n I g^{nT}) / n``.
    """
    if n_max < 1:
        raise InvalidParameter("n_max must be at least 1")
    g = _check_invertible(g)
    dist = _orbit_distances(g)(np.eye(g.shape[0]), n_max)
    partials = dist / np.arange(1, n_max + 1)
    return float(partials[-1]), partials


def congruence_map(g, name="congruence") -> Isometry:
    g = _check_invertible(g)
    ginv = np.linalg.inv(g)
    return Isometry(
        name,
        lambda p: _sym(g @ p @ g.T),
        inverse=lambda p: _sym(ginv @ p @ ginv.T),
        params={"g": g.tolist()},
        orbit_distances=_orbit_distances(g),
    )


@dataclass(frozen=True)
class PosSpace(MetricSpace):
    """Positive definite ``n x n`` matrices, Thompson metric, exponential bicombing."""

    n: int = 2
    base_point: np.ndarray | None = None
    batched = True

    def __post_init__(self):
        if self.base_point is None:
            object.__setattr__(self, "base_point", np.eye(self.n))

    @property
    def name(self):
        return f"Pos{self.n}"

    def validate(self, x):
        x = validate_spd(x)
        if x.shape != (self.n, self.n):
            raise TypeError(f"{self.name} expects {self.n}x{self.n} matrices, got {x.shape}")
        return x

    def distance(self, x, y) -> float:
        return thompson_distance(x, y)

    def bicombing(self, x, y, t):
        return exp_bicombing(x, y, t)

    def contraction(self, s, y):
        if np.array_equal(self.base_point, np.eye(self.n)):
            check_t(s)
            return spd_power(y, s)
        return exp_bicombing(self.base_point, y, s)


def matrix_to_json(p) -> dict:
    p = np.asarray(p, dtype=float)
    return {"n": int(p.shape[0]), "entries": p.tolist()}


def matrix_from_json(data) -> np.ndarray:
    if isinstance(data, dict):
        m = np.asarray(data["entries"], dtype=float)
        if m.shape != (data["n"], data["n"]):
            raise InvalidParameter("matrix entries do not match the declared dimension")
        return m
    return np.asarray(data, dtype=float)


# ---------------------------------------------------------------------------
# the operator-theoretic statements


def random_sym(rng, n: int, scale: float = 1.0, size=None) -> np.ndarray:
    shape = (n, n) if size is None else (size, n, n)
    return _sym(rng.normal(scale=scale, size=shape))


def random_spd(rng, n: int, scale: float = 1.0, size=None) -> np.ndarray:
    """``exp(Y)`` with ``Y`` a random symmetric matrix of entry scale ``scale``."""
    return sym_exp(random_sym(rng, n, scale, size))


def segal_gap(u, v) -> np.ndarray | float:
    """``||exp(u/2) exp(v) exp(u/2)|| - ||exp(u + v)||`` in operator norm (nonnegative)."""
    lhs = symmetric_eigh(sym_exp(_sym(np.asarray(u) + np.asarray(v)))).lam[..., -1]
    h = sym_exp(0.5 * np.asarray(u))
    rhs = symmetric_eigh(_sym(h @ sym_exp(v) @ h)).lam[..., -1]
    gap = rhs - lhs
    return float(gap) if np.ndim(gap) == 0 else gap


def operator_norm_sym(S) -> np.ndarray | float:
    lam = symmetric_eigh(S).lam
    out = np.maximum(np.abs(lam[..., 0]), np.abs(lam[..., -1]))
    return float(out) if np.ndim(out) == 0 else out


@dataclass
class WitnessCheck:
    h_at_a: float
    h_at_b: float
    passed: bool


def unbounded_witness_check(p) -> WitnessCheck:
    """Evaluate ``h_p`` (base point ``I``) at ``a = e I`` and ``b = e^{-1} I``.

    If ``d(I, p) > 2`` then one of the two values exceeds 1/2, so ``h_p`` stays
    away from every bounded-below limit along such points.
    """
    p = validate_spd(p)
    n = p.shape[0]
    I = np.eye(n)
    r = thompson_distance(I, p)
    if not r > 2:
        raise InvalidParameter(f"witness check needs d(I, p) > 2, got {r:.6g}")
    ha = thompson_distance(math.e * I, p) - r
    hb = thompson_distance(I / math.e, p) - r
    return WitnessCheck(ha, hb, max(ha, hb) > 0.5)


def congruence_displacement(g, p, reading: str = "thompson"):
    """Displacement of ``p`` under ``q -> g q g^T``.

    ``reading="thompson"`` gives ``d(p, g p g^T)``; ``reading="literal"`` gives
    ``|log sup_v (p g^T v, g^T v) / (p v, v)|``.  Both are functions of the
    singular values of ``p^{-1/2} g p^{1/2}``.
    """
    lam, Q = symmetric_eigh(p)
    Qt = np.swapaxes(Q, -1, -2)
    M = (Q / np.sqrt(lam)[..., None, :]) @ Qt @ g @ (Q * np.sqrt(lam)[..., None, :]) @ Qt
    up = _log_sigma_max(M)
    if reading == "literal":
        return 2 * np.abs(up)
    Minv = (Q / np.sqrt(lam)[..., None, :]) @ Qt @ np.linalg.inv(g) @ (Q * np.sqrt(lam)[..., None, :]) @ Qt
    down = _log_sigma_max(Minv)
    return 2 * np.maximum(np.abs(up), np.abs(down))


@dataclass
class ISPReport:
    """Both sides of the displacement / growth-rate equality for a congruence."""

    lhs: float
    rhs: float
    gap: float
    lhs_literal: float
    rhs_literal: float
    gap_literal: float
    best_point: np.ndarray
    evaluations: int
    converged: bool
    rhs_n: int
    history: list = field(default_factory=list)

    def to_json(self):
        return {
            "lhs": self.lhs, "rhs": self.rhs, "gap": self.gap,
            "lhs_literal": self.lhs_literal, "rhs_literal": self.rhs_literal,
            "gap_literal": self.gap_literal, "best_point": matrix_to_json(self.best_point),
            "evaluations": self.evaluations, "converged": self.converged, "rhs_n": self.rhs_n,
        }


def _sym_from_params(theta, n):
    Y = np.zeros((n, n))
    iu = np.triu_indices(n)
    Y[iu] = theta
    return Y + np.triu(Y, 1).T


def isp_equality_report(
    g,
    search_budget: int = 4000,
    rhs_n: int = 100_000,
    seed: int = 0,
    candidates=(),
    restarts: int = 4,
    stable_tol: float = 1e-6,
) -> ISPReport:
    """Compare ``inf_p d(p, g p g^T)`` with ``lim (1/n) |log lambda(g^n g^{nT})|``.

    The infimum is searched over ``p = exp(Y)``: first the supplied
    ``candidates`` (typically solver resolvent points), then seeded
    Nelder-Mead restarts until ``search_budget`` objective evaluations are
    spent.  ``converged`` records whether the last restart failed to improve
    the best value by more than ``stable_tol``.
    """
    from scipy.optimize import minimize

    g = _check_invertible(g)
    n = g.shape[0]
    if n > 8:
        raise InvalidParameter("the displacement search is limited to n <= 8")
    rng = np.random.default_rng(seed)

    up, down = _power_log_extremes(g, rhs_n)
    rhs = float(2 * max(abs(up[-1]), abs(down[-1])) / rhs_n)
    rhs_lit = float(2 * abs(up[-1]) / rhs_n)

    evals = 0

    def objective(theta):
        nonlocal evals
        evals += 1
        Y = _sym_from_params(theta, n)
        try:
            return float(congruence_displacement(g, sym_exp(Y)))
        except (NumericError, InvalidParameter):
            return math.inf

    best_val, best_p = float(congruence_displacement(g, np.eye(n))), np.eye(n)
    for c in candidates:
        try:
            val = float(congruence_displacement(g, np.asarray(c, dtype=float)))
        except (NumericError, InvalidParameter):
            continue
        evals += 1
        if val < best_val:
            best_val, best_p = val, np.asarray(c, dtype=float)

    history = [best_val]
    converged = False
    m = n * (n + 1) // 2
    start_points = [spd_log(best_p)[np.triu_indices(n)]]
    for _ in range(max(restarts - 1, 0)):
        start_points.append(rng.normal(scale=1.0, size=m))
    for k, theta0 in enumerate(start_points):
        remaining = search_budget - evals
        if remaining <= 0:
            break
        res = minimize(objective, theta0, method="Nelder-Mead",
                       options={"maxfev": remaining, "xatol": 1e-10, "fatol": 1e-12})
        improved = best_val - res.fun
        if res.fun < best_val:
            best_val, best_p = float(res.fun), sym_exp(_sym_from_params(res.x, n))
        history.append(best_val)
        if k == len(start_points) - 1:
            converged = improved <= stable_tol
    lit = float(congruence_displacement(g, best_p, reading="literal"))
    return ISPReport(
        lhs=best_val, rhs=rhs, gap=best_val - rhs,
        lhs_literal=lit, rhs_literal=rhs_lit, gap_literal=lit - rhs_lit,
        best_point=best_p, evaluations=evals, converged=converged, rhs_n=rhs_n, history=history,
    )


@dataclass
class KernelCheck:
    fixed_residual: float
    kernel_dim: int
    leak: float
    passed: bool


def kernel_invariance_check(g, s, tol: float = 1e-10) -> KernelCheck:
    """For semipositive ``s`` with ``g s g^T = s``, measure how far ``g^T`` moves ``ker s`` out of ``ker s``.

    ``leak`` is ``||s g^T K||`` for an orthonormal kernel basis ``K``.
    """
    g, s = _as_stack(g), _sym(_as_stack(s))
    lam, Q = symmetric_eigh(s)
    if lam[0] < -tol:
        raise InvalidParameter("s is not semipositive")
    scale = max(1.0, abs(lam[-1]))
    K = Q[:, np.abs(lam) <= tol * scale]
    fixed = float(np.abs(g @ s @ g.T - s).max())
    leak = float(np.abs(s @ g.T @ K).max()) if K.size else 0.0
    return KernelCheck(fixed, K.shape[1], leak, fixed <= tol * scale and leak <= tol * scale)

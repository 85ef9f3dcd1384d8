"""Metric functionals of finite-dimensional l-infinity and their unboundedness.

A functional at infinity is described by two disjoint coordinate sets ``A_f``
and ``B_f`` with nonpositive offsets::

    h(x) = max( max_{i in A_f} a_i - x_i , max_{j in B_f} b_j + x_j )

Coordinates are 0-based.  The base point is the origin throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import InvalidParameter, HorolibError

CONV_TOL = 1e-6
DIVERGENCE_CUTOFF = -1e6


class ClassificationError(HorolibError, ValueError):
    """The sequence does not meet the preconditions of the classification."""


@dataclass(frozen=True)
class LinftyLimitData:
    N: int
    A_f: tuple
    a: tuple
    B_f: tuple
    b: tuple

    def __post_init__(self):
        if set(self.A_f) & set(self.B_f):
            raise InvalidParameter("A_f and B_f must be disjoint")
        if not (self.A_f or self.B_f):
            raise InvalidParameter("at least one coordinate must carry a finite limit")
        if len(self.A_f) != len(self.a) or len(self.B_f) != len(self.b):
            raise InvalidParameter("index sets and offsets differ in length")
        if any(v > 0 for v in self.a + self.b):
            raise InvalidParameter("offsets must be nonpositive")

    def to_json(self) -> dict:
        return {"N": self.N, "A_f": list(self.A_f), "a": list(self.a),
                "B_f": list(self.B_f), "b": list(self.b)}

    @classmethod
    def from_json(cls, data) -> "LinftyLimitData":
        return cls(int(data["N"]), tuple(data["A_f"]), tuple(float(v) for v in data["a"]),
                   tuple(data["B_f"]), tuple(float(v) for v in data["b"]))


def linf_horo(y, x) -> float:
    """``h_y(x) = ||x - y|| - ||y||`` in the sup norm, base point 0."""
    y, x = np.asarray(y, dtype=float), np.asarray(x, dtype=float)
    return float(np.abs(x - y).max() - np.abs(y).max())


def classify_limit_sequence(ys, conv_tol: float = CONV_TOL,
                            cutoff: float = DIVERGENCE_CUTOFF) -> LinftyLimitData:
    """Read off ``(A_f, a, B_f, b)`` from a sequence ``y_n`` with ``||y_n|| -> inf``.

    The caller supplies an already extracted sequence: norms strictly
    increasing, each coordinate of constant sign over the last third, and each
    shifted coordinate (``y^i - ||y||`` for nonnegative coordinates,
    ``-y^j - ||y||`` for negative ones) either settled within ``conv_tol``
    over the last third or below ``cutoff`` at the end.
    """
    Y = np.asarray(ys, dtype=float)
    if Y.ndim != 2 or Y.shape[0] < 3:
        raise ClassificationError("need at least three vectors of a common dimension")
    norms = np.abs(Y).max(axis=1)
    if np.any(np.diff(norms) <= 0):
        raise ClassificationError("norms must be strictly increasing")
    tail = Y[Y.shape[0] - max(Y.shape[0] // 3, 2):]
    tnorm = np.abs(tail).max(axis=1)
    A, a, B, b = [], [], [], []
    for i in range(Y.shape[1]):
        col = tail[:, i]
        if np.all(col >= 0):
            shifted, dest = col - tnorm, (A, a)
        elif np.all(col < 0):
            shifted, dest = -col - tnorm, (B, b)
        else:
            raise ClassificationError(f"coordinate {i} changes sign in the tail")
        if shifted.max() - shifted.min() <= conv_tol:
            dest[0].append(i)
            dest[1].append(min(float(shifted[-1]), 0.0))
        elif shifted[-1] <= cutoff:
            continue
        else:
            raise ClassificationError(
                f"coordinate {i}: shifted values neither settle nor pass the cutoff "
                f"(last {shifted[-1]:.6g})"
            )
    top = max(a + b, default=-np.inf)
    if abs(top) > conv_tol:
        raise ClassificationError("no coordinate attains the norm in the limit")
    return LinftyLimitData(Y.shape[1], tuple(A), tuple(a), tuple(B), tuple(b))


def eval_classified(hdata: LinftyLimitData, x) -> float:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != hdata.N:
        raise InvalidParameter(f"expected a vector of length {hdata.N}")
    terms = [ai - x[i] for i, ai in zip(hdata.A_f, hdata.a)]
    terms += [bj + x[j] for j, bj in zip(hdata.B_f, hdata.b)]
    return float(max(terms))


def busemann_from_ray(v, tol: float = 1e-12) -> LinftyLimitData:
    """Functional of the ray ``t -> t v`` for a sup-norm unit vector ``v``."""
    v = np.asarray(v, dtype=float).reshape(-1)
    if abs(np.abs(v).max() - 1) > tol:
        raise InvalidParameter("ray direction must be a sup-norm unit vector")
    A = tuple(int(i) for i in np.flatnonzero(np.abs(v - 1) <= tol))
    B = tuple(int(j) for j in np.flatnonzero(np.abs(v + 1) <= tol))
    return LinftyLimitData(v.size, A, (0.0,) * len(A), B, (0.0,) * len(B))


@dataclass
class LinftyWitness:
    h_at_minus: float
    h_at_plus: float
    case: str
    passed: bool


def unbounded_witness_linf(y, c: float = 2.0) -> LinftyWitness:
    """Evaluate ``h_y`` at ``-c 1`` and ``c 1`` for ``||y|| > 2``.

    If some coordinate exceeds ``||y|| - 1/2`` the first value is above
    ``c - 1/2``; otherwise a coordinate is below ``-(||y|| - 1/2)`` and the
    second value is.  ``passed`` asserts the value promised by the case.
    """
    y = np.asarray(y, dtype=float).reshape(-1)
    r = np.abs(y).max()
    if not r > 2:
        raise InvalidParameter(f"witness check needs ||y|| > 2, got {r:.6g}")
    if not c > 1:
        raise InvalidParameter("c must exceed 1")
    one = np.ones_like(y)
    hm, hp = linf_horo(y, -c * one), linf_horo(y, c * one)
    if y.max() > r - 0.5:
        case, val = "positive", hm
    else:
        case, val = "negative", hp
    return LinftyWitness(hm, hp, case, val > c - 0.5 and max(hm, hp) > 0.5)

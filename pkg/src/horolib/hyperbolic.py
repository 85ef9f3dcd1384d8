"""The hyperbolic upper half-plane, a proper CAT(0) space with closed-form geometry.

Points are Python complex numbers ``x + iy`` with ``y > 0``.  Isometries are
Mobius maps with real entries and determinant 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DomainError, InvalidParameter, Isometry, MetricSpace, check_t

IM_FLOOR = 1e-12


def check_point(z) -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)) or z.imag <= IM_FLOOR:
        raise DomainError(f"{z} is not a point of the upper half-plane")
    return z


def h2_distance(z, w) -> float:
    """``arcosh(1 + |z - w|**2 / (2 Im z Im w))``, evaluated as ``2 asinh(...)`` for accuracy.

    Points on a common vertical line use ``|log Im z - log Im w|`` directly.
    """
    z, w = complex(z), complex(w)
    if z.real == w.real:
        return abs(math.log(z.imag) - math.log(w.imag))
    return 2.0 * math.asinh(abs(z - w) / (2.0 * math.sqrt(z.imag) * math.sqrt(w.imag)))


def _to_hyperboloid(z: complex) -> np.ndarray:
    x, y = z.real, z.imag
    r2 = x * x + y * y
    return np.array([(r2 + 1) / (2 * y), (r2 - 1) / (2 * y), x / y])


def _from_hyperboloid(X) -> complex:
    y = 1.0 / (X[0] - X[1])
    return complex(X[2] * y, y)


def h2_geodesic(z, w, t: float) -> complex:
    """Constant-speed geodesic from ``z`` (``t = 0``) to ``w`` (``t = 1``).

    Vertical pairs interpolate ``log Im`` exactly; other pairs are interpolated
    on the hyperboloid model, where the geodesic is
    ``(sinh((1-t)D) P + sinh(tD) Q) / sinh D``.
    """
    check_t(t)
    z, w = complex(z), complex(w)
    if t == 0 or z == w:
        return z
    if t == 1:
        return w
    if z.real == w.real:
        return complex(z.real, math.exp((1 - t) * math.log(z.imag) + t * math.log(w.imag)))
    D = h2_distance(z, w)
    P, Q = _to_hyperboloid(z), _to_hyperboloid(w)
    if D < 1e-8:
        X = (1 - t) * P + t * Q
    else:
        X = (math.sinh((1 - t) * D) * P + math.sinh(t * D) * Q) / math.sinh(D)
    return _from_hyperboloid(X)


@dataclass(frozen=True)
class MobiusMap:
    """``z -> (a z + b) / (c z + d)`` with ``ad - bc = 1``.

    ``log_scale`` marks a pure dilation ``z -> exp(2 log_scale) z``; powers of
    such maps are computed through the exponent so ``g**n`` of a dilation is
    exactly the dilation by ``exp(2 n log_scale)``.
    """

    a: float
    b: float
    c: float
    d: float
    log_scale: float | None = None

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        # ad - bc cancels at the scale of the squared entries
        scale = max(1.0, abs(self.a), abs(self.b), abs(self.c), abs(self.d)) ** 2
        if not abs(det - 1) <= 1e-12 * scale:
            raise InvalidParameter(f"Mobius map must have determinant 1, got {det!r}")

    @classmethod
    def dilation(cls, lam: float) -> "MobiusMap":
        if not lam > 0:
            raise InvalidParameter("dilation factor must be positive")
        ls = 0.5 * math.log(lam)
        return cls(math.exp(ls), 0.0, 0.0, math.exp(-ls), log_scale=ls)

    @classmethod
    def translation(cls, b: float) -> "MobiusMap":
        return cls(1.0, float(b), 0.0, 1.0)

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls(1.0, 0.0, 0.0, 1.0)

    def __call__(self, z) -> complex:
        z = complex(z)
        if self.log_scale is not None:
            return complex(z.real * math.exp(2 * self.log_scale), z.imag * math.exp(2 * self.log_scale))
        return (self.a * z + self.b) / (self.c * z + self.d)

    def __matmul__(self, other: "MobiusMap") -> "MobiusMap":
        if self.log_scale is not None and other.log_scale is not None:
            return MobiusMap.dilation(math.exp(2 * (self.log_scale + other.log_scale)))
        m = self.matrix() @ other.matrix()
        return MobiusMap(*m.ravel())

    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def inverse(self) -> "MobiusMap":
        if self.log_scale is not None:
            return MobiusMap(self.d, 0.0, 0.0, self.a, log_scale=-self.log_scale)
        return MobiusMap(self.d, -self.b, -self.c, self.a)

    def power(self, n: int) -> "MobiusMap":
        if n < 0:
            return self.inverse().power(-n)
        if self.log_scale is not None:
            ls = n * self.log_scale
            return MobiusMap(math.exp(ls), 0.0, 0.0, math.exp(-ls), log_scale=ls)
        # no renormalization by the computed determinant: that determinant
        # carries cancellation error of order |m|^2 eps
        m = np.linalg.matrix_power(self.matrix(), n)
        return MobiusMap(*m.ravel())

    def translation_length(self) -> float:
        """``2 arcosh(|tr|/2)`` for hyperbolic maps, else 0."""
        tr = abs(self.a + self.d)
        return 2.0 * math.acosh(tr / 2) if tr > 2 else 0.0

    def to_json(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d}


def mobius_apply(m: MobiusMap, z) -> complex:
    return check_point(m(check_point(z)))


def mobius_isometry(m: MobiusMap, name: str = "mobius") -> Isometry:
    inv = m.inverse()
    return Isometry(name, m, inverse=inv, params=m.to_json())


def affine_h2_map(lam: float, beta: float = 0.0) -> Isometry:
    """``z -> lam z + beta``: a dilation followed by a horizontal translation."""
    if beta == 0:
        return mobius_isometry(MobiusMap.dilation(lam), name="dilation")
    m = MobiusMap.translation(beta) @ MobiusMap(math.sqrt(lam), 0.0, 0.0, 1 / math.sqrt(lam))
    return mobius_isometry(m, name="dilation+translation")


def busemann_vertical(z) -> float:
    """Busemann function of the ray ``t -> e^t i`` normalized at ``i``: ``-log Im z``."""
    return -math.log(check_point(z).imag)


def vertical_ray(t: float) -> complex:
    return complex(0.0, math.exp(t))


def busemann_truncated(z, t: float = 20.0) -> float:
    """``d(z, gamma(t)) - t``, the finite-time version of the Busemann limit."""
    return h2_distance(z, vertical_ray(t)) - t


def tracking_value(m: MobiusMap, n: int, x0: complex = 1j) -> float:
    """``(1/n) d(g^n x0, gamma(n d_g))`` for the vertical ray from ``i``.

    ``gamma(n d_g)`` is evaluated as ``exp(n d_g) i`` with ``d_g`` the
    translation length; for a pure dilation the orbit point is computed through
    the same exponent so the two points coincide.
    """
    if n < 1:
        raise InvalidParameter("n must be at least 1")
    gn = m.power(n)
    dg = m.translation_length()
    if m.log_scale is not None:
        target = complex(0.0, math.exp(2 * n * m.log_scale))
    else:
        target = vertical_ray(n * dg)
    return h2_distance(gn(x0), target) / n


def tracking_curve(m: MobiusMap, n_max: int, x0: complex = 1j) -> np.ndarray:
    """Tracking values for ``n = 1..n_max``, iterating ``g`` directly."""
    dg = m.translation_length()
    out = np.empty(n_max)
    z = complex(x0)
    for n in range(1, n_max + 1):
        z = m(z)
        out[n - 1] = h2_distance(z, vertical_ray(n * dg)) / n
    return out


@dataclass(frozen=True)
class H2Space(MetricSpace):
    """Upper half-plane model of the hyperbolic plane, base point ``i``."""

    base_point: complex = 1j
    name = "H2"

    def validate(self, x):
        return check_point(x)

    def distance(self, x, y) -> float:
        return h2_distance(x, y)

    def bicombing(self, x, y, t):
        return h2_geodesic(x, y, t)


def random_h2_point(rng, spread: float = 2.0) -> complex:
    return complex(rng.normal(scale=spread), math.exp(rng.normal(scale=spread / 2)))

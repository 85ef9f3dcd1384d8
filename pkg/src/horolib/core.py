"""Shared contracts: bicombed metric spaces, isometries and metric functionals.

A space is any object exposing ``distance``, ``bicombing`` and a
``base_point``.  Points are plain values of whatever type the space uses
(numpy arrays, :class:`~horolib.normed.FiniteSupportVector`, complex numbers
for the half-plane, ...).  Metric functionals are the normalized distance
functions ``h_y(x) = d(x, y) - d(x0, y)`` and their pointwise limits; they are
only ever compared pointwise on a finite probe set.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Mapping, Sequence

import numpy as np

DEFAULT_TOL = 1e-9


class HorolibError(Exception):
    """Base class for library errors."""


class DomainError(HorolibError, ValueError):
    """A map was applied outside its declared domain."""


class InvalidParameter(HorolibError, ValueError):
    """A parameter violates an operation's precondition."""


class UnsupportedOperation(HorolibError, TypeError):
    """The operation is not defined for this kind of input."""


class ResourceError(HorolibError, MemoryError):
    """A representation would exceed its configured size limit."""


class NumericError(HorolibError, ArithmeticError):
    """Overflow, loss of positivity or a non-converging numerical kernel."""


class NonConvergenceError(HorolibError):
    """An iteration hit its budget before meeting its stopping rule."""

    def __init__(self, message, last_iterate=None, residual=math.nan, iterations=0):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual
        self.iterations = iterations


class MetricSpace:
    """A metric space with a weak conical bicombing and a base point.

    Subclasses implement :meth:`distance`, :meth:`bicombing` and
    :meth:`validate`.  ``horo`` can be overridden with a cheaper or more
    accurate evaluation of ``d(x, y) - d(x0, y)``.
    """

    name = "space"
    base_point: Any = None

    def distance(self, x, y) -> float:
        raise NotImplementedError

    def bicombing(self, x, y, t):
        raise NotImplementedError

    def validate(self, x):
        """Return ``x`` unchanged, or raise ``TypeError`` if it is not a point."""
        return x

    def horo(self, y, x) -> float:
        """Value at ``x`` of the functional ``h_y`` normalized at the base point."""
        return self.distance(x, y) - self.distance(self.base_point, y)

    def rebased(self, x0):
        """Copy of this space with another base point."""
        return dataclasses.replace(self, base_point=self.validate(x0))

    def contraction(self, s, y):
        """The map ``r_s(y) = sigma(x0, y, s)`` contracting toward the base point."""
        return self.bicombing(self.base_point, y, s)


def check_t(t) -> float:
    if not 0.0 <= t <= 1.0:
        raise InvalidParameter(f"bicombing parameter t={t!r} outside [0, 1]")
    return t


@dataclass(frozen=True)
class Isometry:
    """A named (candidate) isometric map together with what is known about it.

    ``linear_power(n, v)`` describes an affine map ``T(x) = L x + T(0)`` by
    applying ``L**n`` to a vector; the solver uses it to compose the resolvent
    contraction by repeated doubling.  ``orbit_distances(x, n_max)`` may supply
    ``d(x, T^n x)`` for ``n = 1..n_max`` when direct iteration would overflow.
    """

    name: str
    forward: Callable[[Any], Any]
    inverse: Callable[[Any], Any] | None = None
    params: Mapping[str, Any] = field(default_factory=dict)
    linear_power: Callable[[int, Any], Any] | None = None
    orbit_distances: Callable[[Any, int], np.ndarray] | None = None
    isometric: bool = True

    def __call__(self, x):
        return self.forward(x)

    @property
    def has_inverse(self) -> bool:
        return self.inverse is not None

    @property
    def is_affine(self) -> bool:
        return self.linear_power is not None

    def inv(self, x):
        if self.inverse is None:
            raise UnsupportedOperation(f"{self.name} has no inverse (isometric embedding only)")
        return self.inverse(x)

    def inverse_map(self) -> "Isometry":
        if self.inverse is None:
            raise UnsupportedOperation(f"{self.name} has no inverse (isometric embedding only)")
        return Isometry(
            name=f"{self.name}^-1",
            forward=self.inverse,
            inverse=self.forward,
            params=dict(self.params, inverted=True),
            isometric=self.isometric,
        )

    def power(self, x, n: int):
        for _ in range(n):
            x = self.forward(x)
        return x


@dataclass(frozen=True, eq=False)
class MetricFunctional:
    """An element of the metric compactification, represented operationally.

    ``kind`` is one of ``"point"`` (the internal functional ``h_y``),
    ``"closed_form"`` (a named formula) or ``"empirical"`` (a sequence of
    anchor points; evaluation uses the last anchor and :meth:`trace` exposes
    the whole sequence for Cauchy diagnostics).
    """

    space: MetricSpace
    kind: str
    point: Any = None
    anchors: tuple = ()
    name: str | None = None
    formula: Callable[[Any], float] | None = None
    params: Mapping[str, Any] = field(default_factory=dict)

    @classmethod
    def at_point(cls, space: MetricSpace, y) -> "MetricFunctional":
        return cls(space, "point", point=space.validate(y))

    @classmethod
    def closed_form(cls, space, name, formula, params=None, normalize=True) -> "MetricFunctional":
        if normalize:
            offset = formula(space.base_point)
            raw = formula
            formula = lambda x: raw(x) - offset  # noqa: E731
        return cls(space, "closed_form", name=name, formula=formula, params=dict(params or {}))

    @classmethod
    def empirical(cls, space: MetricSpace, anchors: Sequence) -> "MetricFunctional":
        anchors = tuple(anchors)
        if not anchors:
            raise InvalidParameter("an empirical functional needs at least one anchor")
        return cls(space, "empirical", anchors=anchors)

    @property
    def base_point(self):
        return self.space.base_point

    def __call__(self, x) -> float:
        if self.kind == "point":
            return self.space.horo(self.point, x)
        if self.kind == "empirical":
            return self.space.horo(self.anchors[-1], x)
        return float(self.formula(x))

    def trace(self, x) -> np.ndarray:
        """Values at ``x`` along the anchor sequence (a single value otherwise)."""
        if self.kind == "empirical":
            return np.array([self.space.horo(a, x) for a in self.anchors])
        return np.array([self(x)])

    def on(self, probes: Sequence) -> np.ndarray:
        return np.array([self(x) for x in probes], dtype=float)


@dataclass
class BicombingDefects:
    """Worst violations of the bicombing contract over a set of triples."""

    conical: float  # max d(s_xy(t), s_xy'(t)) - t d(y, y')
    speed: float  # max |d(x, s_xy(t)) - t d(x, y)| and the same from y
    endpoints: float  # max d(s_xy(0), x) + d(s_xy(1), y)
    n_triples: int

    def worst(self) -> float:
        return max(self.conical, self.speed, self.endpoints)


def bicombing_defects(space: MetricSpace, triples: Sequence, ts=(0.25, 0.5, 0.75)) -> BicombingDefects:
    """Measure the conical inequality and constant speed on ``(x, y, y')`` triples."""
    d, sigma = space.distance, space.bicombing
    if getattr(space, "batched", False) and triples:
        # distance and bicombing accept stacks of points
        X, Y, Y2 = (np.stack(c) for c in zip(*triples))
        dxy, dyy = d(X, Y), d(Y, Y2)
        ends = np.max(d(sigma(X, Y, 0.0), X) + d(sigma(X, Y, 1.0), Y))
        con = speed = -np.inf
        for t in ts:
            A, B = sigma(X, Y, t), sigma(X, Y2, t)
            con = max(con, np.max(d(A, B) - t * dyy))
            speed = max(speed, np.max(np.abs(d(X, A) - t * dxy)), np.max(np.abs(d(A, Y) - (1 - t) * dxy)))
        return BicombingDefects(float(con), float(speed), float(ends), len(triples))
    con, speed, ends = -math.inf, 0.0, 0.0
    for x, y, y2 in triples:
        dxy, dyy = d(x, y), d(y, y2)
        ends = max(ends, d(sigma(x, y, 0.0), x) + d(sigma(x, y, 1.0), y))
        for t in ts:
            a, b = sigma(x, y, t), sigma(x, y2, t)
            con = max(con, d(a, b) - t * dyy)
            speed = max(speed, abs(d(x, a) - t * dxy), abs(d(a, y) - (1 - t) * dxy))
    return BicombingDefects(float(con), float(speed), float(ends), len(triples))


def isometry_defect(T: Isometry, space: MetricSpace, pairs: Sequence) -> float:
    """``max |d(Tx, Ty) - d(x, y)|`` over the pairs."""
    return max((abs(space.distance(T(x), T(y)) - space.distance(x, y)) for x, y in pairs),
               default=0.0)


def point_functional_eval(y, x, space: MetricSpace) -> float:
    """``h_y(x) = d(x, y) - d(x0, y)`` with ``x0`` the base point of ``space``."""
    return space.horo(space.validate(y), space.validate(x))


def displacement(T: Isometry, x, space: MetricSpace) -> float:
    """Pointwise displacement ``d(x, Tx)``."""
    x = space.validate(x)
    return space.distance(x, T(x))


def translation_number_estimate(T: Isometry, x0, space: MetricSpace, n_max: int):
    """Estimate ``lim d(x0, T^n x0) / n``.

    Returns ``(estimate, partials)`` where ``partials[n-1] = d(x0, T^n x0)/n``
    for ``n = 1..n_max``.
    """
    if n_max < 1:
        raise InvalidParameter("n_max must be at least 1")
    x0 = space.validate(x0)
    if T.orbit_distances is not None:
        dists = np.asarray(T.orbit_distances(x0, n_max), dtype=float)
    else:
        dists = np.empty(n_max)
        x = x0
        for n in range(n_max):
            x = T(x)
            dists[n] = space.distance(x0, x)
    partials = dists / np.arange(1, n_max + 1)
    return float(partials[-1]), partials


def pushforward_functional(T: Isometry, h: MetricFunctional) -> MetricFunctional:
    """The action ``(Th)(x) = h(T^-1 x) - h(T^-1 x0)`` of an invertible isometry."""
    if not T.has_inverse:
        raise UnsupportedOperation(
            f"{T.name} is only an isometric embedding; use the invariance identity instead"
        )
    x0 = h.space.base_point
    offset = h(T.inv(x0))
    return MetricFunctional(
        h.space,
        "closed_form",
        name=f"{T.name}.push({h.name or h.kind})",
        formula=lambda x: h(T.inv(x)) - offset,
        params={"map": T.name},
    )


def rebase_functional(h: MetricFunctional, y0) -> MetricFunctional:
    """Renormalize ``h`` at another base point: ``x -> h(x) - h(y0)``."""
    space = h.space.rebased(y0)
    if h.kind == "point":
        return MetricFunctional.at_point(space, h.point)
    if h.kind == "empirical":
        return MetricFunctional.empirical(space, h.anchors)
    shift = h(y0)
    return MetricFunctional(space, "closed_form", name=h.name, formula=lambda x: h(x) - shift,
                            params=h.params)


def to_jsonable(obj):
    """Convert points, numpy values and dataclasses to JSON-compatible data."""
    if hasattr(obj, "to_json"):
        return obj.to_json()
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, complex):
        return {"x": obj.real, "y": obj.imag}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, Fraction):
        return {"num": obj.numerator, "den": obj.denominator}
    return obj

"""Catalog of the named isometries with their spaces, base points and known data.

Each entry bundles what the solver, the scenarios and the property tests need:
the space (whose base point is the ``x0`` used by the solver), the map, the
minimal displacement when it is known in closed form, a probe generator and,
where one exists, the name of the closed-form invariant functional.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import InvalidParameter, Isometry, MetricSpace
from .hyperbolic import H2Space, MobiusMap, random_h2_point
from .normed import (
    BASSO,
    L1,
    L2,
    LINF,
    DyadicL1Space,
    EventuallyConstantSpace,
    FiniteSupportVector,
    SequenceSpace,
    VectorSpace,
    alspach_map,
    insert_shift_map,
    kakutani_map,
    linear_map,
    prus_map,
    random_alspach_point,
    random_ecs,
    random_vector,
    rotation_matrix,
    shift_map,
    translation_map,
)
from .pos import PosSpace, congruence_map, random_spd


@dataclass(frozen=True)
class MapEntry:
    name: str
    description: str
    space: MetricSpace
    map: Isometry
    known_d: float | None
    sample: Callable  # rng -> point of the map's domain
    closed_form: str | None = None
    resolvent: bool = True
    orbit_cap: int | None = None  # largest n for which T^n x0 is representable

    @property
    def x0(self):
        return self.space.base_point

    def probes(self, rng, n: int) -> list:
        return [self.sample(rng) for _ in range(n)]


def _dilation_isometry(lam: float) -> Isometry:
    m = MobiusMap.dilation(lam)
    a_step = 2 * m.log_scale

    def orbit(z, n_max):
        z = complex(z)
        ratio = abs(z) / z.imag
        a = a_step * np.arange(1, n_max + 1)
        half = 0.5 * a
        # d(z, e^a z) = 2 asinh(|z| sinh(a/2) / Im z), in log form once sinh overflows
        big = half > 30
        out = np.empty(n_max)
        out[~big] = 2 * np.arcsinh(ratio * np.sinh(half[~big]))
        out[big] = 2 * (math.log(2 * ratio) + half[big] - math.log(2))
        return out

    return Isometry("dilation", m, inverse=m.inverse(), params={"lambda": lam},
                    orbit_distances=orbit)


def _ball_probe(rng):
    return random_vector(rng, natural=True, radius=1.0)


def _build() -> dict:
    g_rot = rotation_matrix(math.pi / 5)
    entries = [
        MapEntry("translation", "x -> x + 1 on the real line",
                 VectorSpace(1, L1), translation_map(1.0), 1.0,
                 lambda rng: rng.uniform(-5, 5, 1)),
        MapEntry("rotation", "rotation by pi/2 of the Euclidean plane",
                 VectorSpace(2, L2), linear_map(rotation_matrix(math.pi / 2), "rotation"), 0.0,
                 lambda rng: rng.uniform(-3, 3, 2)),
        MapEntry("insert-shift-l1", "(x_0, x_1, ...) -> (1, x_0, x_1, ...) on l1(N)",
                 SequenceSpace(L1, natural=True), insert_shift_map("insert-shift-l1"), 1.0,
                 lambda rng: random_vector(rng, natural=True), closed_form="ones-direction"),
        MapEntry("insert-shift-l2", "(x_0, x_1, ...) -> (1, x_0, x_1, ...) on l2(N)",
                 SequenceSpace(L2, natural=True), insert_shift_map("insert-shift-l2"), 0.0,
                 lambda rng: random_vector(rng, natural=True)),
        MapEntry("kakutani", "(x_0, x_1, ...) -> (1, x_0, x_1, ...) on the unit ball of c0",
                 SequenceSpace(LINF, natural=True, radius=1.0), kakutani_map(), 0.0,
                 _ball_probe, closed_form="kakutani"),
        MapEntry("prus", "(y_n) -> (1 + lim y_n, y_0, y_1, ...) on convergent sequences",
                 EventuallyConstantSpace(), prus_map(), 0.0,
                 lambda rng: random_ecs(rng), closed_form="prus"),
        MapEntry("shift-l1z", "bilateral shift on l1(Z)",
                 SequenceSpace(L1), shift_map(1), 0.0,
                 lambda rng: random_vector(rng, natural=False), closed_form="shift-l1"),
        MapEntry("basso-shift", "bilateral shift on l1(Z) with the norm sqrt(|x|_1^2 + |x|_2^2)",
                 SequenceSpace(BASSO, base_point=FiniteSupportVector.unit(0)), shift_map(1), 0.0,
                 lambda rng: random_vector(rng, natural=False)),
        MapEntry("alspach", "Alspach's map on [0,2]-valued functions of integral 1 in L1[0,1]",
                 DyadicL1Space(), alspach_map(), 0.0,
                 lambda rng: random_alspach_point(rng, level=int(rng.integers(0, 5))),
                 resolvent=False, orbit_cap=23),
        MapEntry("congruence-diag", "p -> g p g^T on Pos(2) with g = diag(2, 1)",
                 PosSpace(2), congruence_map(np.diag([2.0, 1.0]), "congruence-diag"),
                 2 * math.log(2), lambda rng: random_spd(rng, 2, 0.5)),
        MapEntry("congruence-rotation", "p -> g p g^T on Pos(2) with g a rotation by pi/5",
                 PosSpace(2), congruence_map(g_rot, "congruence-rotation"), 0.0,
                 lambda rng: random_spd(rng, 2, 0.5)),
        MapEntry("h2-dilation", "z -> 2 z on the upper half-plane",
                 H2Space(), _dilation_isometry(2.0), math.log(2),
                 lambda rng: random_h2_point(rng, 1.0)),
    ]
    return {e.name: e for e in entries}


REGISTRY: dict[str, MapEntry] = _build()


def get_map(name: str) -> MapEntry:
    try:
        return REGISTRY[name]
    except KeyError:
        raise InvalidParameter(f"unknown map {name!r}; known: {', '.join(REGISTRY)}") from None


def solver_maps() -> list:
    return [e for e in REGISTRY.values() if e.resolvent]

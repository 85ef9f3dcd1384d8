"""
Fixed-point-free isometries of sequence spaces
==============================================

The insert-shift, Kakutani's map, Prus's map and Alspach's map, with the
closed-form functionals that stay invariant under them.
"""

from fractions import Fraction

import numpy as np

from horolib.normed import (
    EventuallyConstantSpace,
    DyadicL1Space,
    DyadicStepFunction,
    FiniteSupportVector,
    LINF,
    SequenceSpace,
    alspach_map,
    closed_form_functional_eval,
    insert_shift_map,
    kakutani_map,
    kakutani_ramp,
    prus_map,
    prus_ramp,
    random_alspach_point,
)

rng = np.random.default_rng(0)

# insert-shift: the ones-direction functional drops by exactly one per step
T = insert_shift_map()
x = FiniteSupportVector(0, np.array([Fraction(1, 3), Fraction(-2, 5)], dtype=object))
F = lambda v: closed_form_functional_eval("ones-direction", v)  # noqa: E731
print("ones-direction F(Tx) - F(x) =", F(T(x)) - F(x))

# Kakutani: ramps are almost fixed, the displacement is exactly 1/N
K, ball = kakutani_map(), SequenceSpace(LINF, natural=True, radius=1.0)
for N in (2, 8, 64):
    r = kakutani_ramp(N)
    print(f"Kakutani ramp N={N:3d}: displacement {ball.distance(r, K(r))}")

# Prus: same ramps on convergent sequences
P, ecs = prus_map(), EventuallyConstantSpace()
print("Prus ramp N=10 displacement:", ecs.distance(prus_ramp(10), P(prus_ramp(10))))

# Alspach: exact rational L1 distances are preserved
A, L1dy = alspach_map(), DyadicL1Space()
f, g = random_alspach_point(rng, 3), random_alspach_point(rng, 4)
print("Alspach d(f, g) =", L1dy.distance(f, g), " d(Af, Ag) =", L1dy.distance(A(f), A(g)))
print("A(1) on dyadic intervals:", A(DyadicStepFunction.constant()).values())

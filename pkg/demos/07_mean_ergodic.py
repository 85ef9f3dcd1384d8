"""
Mean ergodic theorems from an invariant functional
==================================================

For the affine isometry x -> Ux + v the functional evaluated at the orbit
sums gives (1/n) h(sum U^k v) -> -inf |Ux + v - x|.
"""

import math

import numpy as np

from horolib.ergodic import mean_identity_report, power_bounded_norm, von_neumann_projection
from horolib.normed import L1, L2, FiniteSupportVector, SequenceSpace, VectorSpace, rotation_matrix, shift_map

r = mean_identity_report(np.eye(1), np.array([1.0]), VectorSpace(1, L1))
print("U = I:        lhs", r.lhs_per_n, " rhs", r.rhs)

U = np.eye(3)
U[1:, 1:] = rotation_matrix(math.pi / 3)
r = mean_identity_report(U, np.array([0.5, 1.0, 0.0]), VectorSpace(3, L2))
print("rotation:     lhs", np.round(r.lhs_per_n, 6), " rhs", r.rhs, " least squares", r.d_lstsq)

r = mean_identity_report(shift_map(1), FiniteSupportVector.unit(0), SequenceSpace(L1, natural=True))
print("l1 shift:     lhs", np.round(r.lhs_per_n, 4), " rhs", r.rhs)

vn = von_neumann_projection(U, np.array([2.0, 1.0, 0.0]))
print("von Neumann:  projection", vn.projection, " errors", vn.errors)

pb = power_bounded_norm(np.array([[0.5, 1.0], [0.0, 0.5]]), np.array([1.0, 1.0]), norm=L1)
print("power bounded norm (k >= 0, k > 0):", pb.value, pb.value_positive)

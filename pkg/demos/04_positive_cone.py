"""
The positive definite cone with the Thompson metric
===================================================

Distances, geodesics, Segal's inequality and the congruence action
p -> g p g^T, whose minimal displacement matches the growth rate of g^n.
"""

import math

import numpy as np

from horolib.pos import (
    exp_bicombing,
    isp_equality_report,
    random_sym,
    segal_gap,
    tau_congruence,
    thompson_distance,
    unbounded_witness_check,
    sym_exp,
)

rng = np.random.default_rng(1)
q = np.array([[2.0, 1.0], [1.0, 2.0]])
print("d(I, q) =", thompson_distance(np.eye(2), q), " log 3 =", math.log(3))
mid = exp_bicombing(np.eye(2), q, 0.5)
print("midpoint squared equals q:", np.allclose(mid @ mid, q))

gaps = segal_gap(random_sym(rng, 4, size=500), random_sym(rng, 4, size=500))
print("Segal gap over 500 pairs: min", gaps.min())

for name, g in (("diag(2, 1)", np.diag([2.0, 1.0])), ("shear", np.array([[1.0, 1.0], [0.0, 1.0]]))):
    tau, _ = tau_congruence(g, 2000)
    rep = isp_equality_report(g, search_budget=1500, rhs_n=20_000)
    print(f"{name:10s} tau(2000) = {tau:.5f}  inf displacement = {rep.lhs:.5f}  growth rate = {rep.rhs:.5f}")

w = unbounded_witness_check(sym_exp(3 * np.eye(2)))
print("witness at exp(3I):", w)

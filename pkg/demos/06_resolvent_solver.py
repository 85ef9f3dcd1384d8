"""
Resolvent points and invariant functionals
==========================================

For s close to 1 the fixed point y_s of x -> T(sigma(x0, x, s)) runs off to
infinity, and h_{y_s} approaches a functional with h(Tx) = h(x) - d.
"""

import numpy as np

from horolib.registry import get_map
from horolib.solver import SolverConfig, invariance_report, run_schedule, schedule_from_k

rng = np.random.default_rng(2)
for name in ("translation", "insert-shift-l1", "kakutani", "congruence-diag"):
    e = get_map(name)
    rep = run_schedule(e.map, e.space, SolverConfig(schedule=schedule_from_k(1, 14)))
    inv = invariance_report(rep, e.map, e.probes(rng, 50))
    print(f"{name:16s} d_hat = {rep.d_hat:.6f}  |h(Tx) - h(x) + d_hat| <= {inv.max_abs_defect:.2e}"
          f"  last s = {rep.last.s}")

# the a priori bound d(x0, y_s) <= d(x0, T x0)/(1 - s) is attained by the insert-shift
e = get_map("insert-shift-l1")
rep = run_schedule(e.map, e.space, SolverConfig(schedule=schedule_from_k(1, 8)))
for r in rep.rows:
    print(f"s = {r.s:.6f}  d(x0, y_s) = {r.dist_x0:.6f}  bound = {r.bound:.6f}")

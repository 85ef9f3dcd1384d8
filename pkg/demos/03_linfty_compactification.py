"""
The metric compactification of finite-dimensional l-infinity
=============================================================

A sequence running to infinity is summarised by the coordinates that grow
fastest upwards (A_f) and downwards (B_f) and their finite offsets.
"""

import numpy as np

from horolib.linfty import busemann_from_ray, classify_limit_sequence, eval_classified, linf_horo, unbounded_witness_linf

ns = np.array([10.0**k for k in range(1, 9)])

ys = np.stack([ns, -ns + 1.0, ns / 2], axis=1)
data = classify_limit_sequence(ys)
print("limit data:", data.to_json())

x = np.array([0.3, -1.2, 4.0])
print("classified h(x) =", eval_classified(data, x), " last anchor h_y(x) =", linf_horo(ys[-1], x))

# rays give Busemann points; only the extreme coordinates matter
print("ray (1, 0.2, -1):", busemann_from_ray([1, 0.2, -1]).to_json())
print("ray (1, 0.7, -1):", busemann_from_ray([1, 0.7, -1]).to_json())

# internal functionals far from the origin are not bounded below by -1/2
w = unbounded_witness_linf(np.array([3.0, -0.5]))
print("witness:", w)

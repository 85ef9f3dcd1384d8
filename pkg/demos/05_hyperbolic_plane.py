"""
Orbits in the hyperbolic plane track a geodesic ray
===================================================

For a dilation the orbit of i sits on the vertical ray, and the Busemann
function of that ray drops by the translation length at every step.
"""

import math

from horolib.hyperbolic import MobiusMap, busemann_vertical, h2_distance, tracking_curve, tracking_value

g = MobiusMap.dilation(2.0)
print("translation length:", g.translation_length(), " log 2 =", math.log(2))
print("tracking value at n = 100:", tracking_value(g, 100))
for z in (1j, 0.5 + 3j):
    print(f"b(2z) - b(z) at z = {z}:", busemann_vertical(g(z)) - busemann_vertical(z))

m = MobiusMap.translation(1.0) @ g
curve = tracking_curve(m, 200)
print("perturbed map, tracking at n = 1, 10, 100, 200:", curve[[0, 9, 99, 199]])

# parabolic translation: displacement vanishes high up, no fixed point
for y in (1.0, 100.0, 1e4):
    print(f"d(z, z + 1) at Im z = {y:g}:", h2_distance(y * 1j, 1 + y * 1j))

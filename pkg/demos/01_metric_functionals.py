"""
Metric functionals on the real line and on sequences
=====================================================

A point y gives the functional h_y(x) = d(x, y) - d(x0, y).  Letting y run
off to infinity produces functionals that are not of this form.
"""

import numpy as np

from horolib.core import MetricFunctional, point_functional_eval, translation_number_estimate
from horolib.normed import L1, FiniteSupportVector, SequenceSpace, VectorSpace, translation_map

line = VectorSpace(1, L1)

# h_y for y far to the right approaches h(x) = -x
for y in (1.0, 10.0, 1000.0):
    vals = [point_functional_eval(np.array([y]), np.array([x]), line) for x in (-2.0, 0.5, 3.0)]
    print(f"y = {y:7.1f}   h_y(-2, 0.5, 3) = {vals}")

# the empirical functional keeps a list of anchors and evaluates at the last one
h = MetricFunctional.empirical(line, [np.array([k]) for k in (1.0, 10.0, 100.0)])
print("trace of h at x = 2 over the anchors:", h.trace(np.array([2.0])))

# in l1(Z) a unit vector pushed to infinity gives the norm
sp = SequenceSpace(L1)
x = FiniteSupportVector(-2, np.array([1.0, -0.5]))
print("h_{e_50}(x) =", sp.horo(FiniteSupportVector.unit(50), x), " |x|_1 =", x.norm(L1))

# translation number of x -> x + 1
tau, partials = translation_number_estimate(translation_map(1.0), np.zeros(1), line, 100)
print("tau of x -> x + 1:", tau)

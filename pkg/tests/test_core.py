import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from horolib.core import (
    InvalidParameter,
    Isometry,
    MetricFunctional,
    UnsupportedOperation,
    bicombing_defects,
    check_t,
    displacement,
    isometry_defect,
    point_functional_eval,
    pushforward_functional,
    rebase_functional,
    to_jsonable,
    translation_number_estimate,
)
from horolib.normed import (
    L1,
    L2,
    LINF,
    FiniteSupportVector,
    SequenceSpace,
    VectorSpace,
    identity_map,
    insert_shift_map,
    kakutani_map,
    shift_map,
    translation_map,
)
from horolib.registry import REGISTRY

finite = st.floats(-50, 50, allow_nan=False)
reals = st.lists(finite, min_size=1, max_size=6)


def fsv(draw_vals, start):
    return FiniteSupportVector(start, np.array(draw_vals))


seqs = st.builds(fsv, reals, st.integers(-5, 5))


# frozen examples


def test_point_functional_real_line():
    sp = VectorSpace(1, L1)
    assert point_functional_eval(np.array([1.0]), np.array([1.0]), sp) == -1.0


def test_point_functional_disjoint_supports():
    sp = SequenceSpace(L1)
    assert point_functional_eval(FiniteSupportVector.unit(5), FiniteSupportVector.unit(0), sp) == 1.0


def test_displacement_examples():
    assert displacement(translation_map(1.0), np.array([0.0]), VectorSpace(1, L1)) == 1.0
    ball = SequenceSpace(LINF, natural=True, radius=1.0)
    assert displacement(kakutani_map(), FiniteSupportVector.zero(), ball) == 1.0
    x = np.array([3.0, -1.0])
    assert displacement(identity_map(), x, VectorSpace(2, L2)) == 0.0


def test_translation_number_examples():
    est, partials = translation_number_estimate(translation_map(1.0), np.zeros(1), VectorSpace(1, L1), 50)
    assert est == 1.0 and np.all(partials == 1.0)
    e = REGISTRY["prus"]
    est, partials = translation_number_estimate(e.map, e.x0, e.space, 200)
    # the orbit of 0 is a block of ones, norm exactly 1
    assert np.allclose(partials * np.arange(1, 201), 1.0)
    assert est <= 1 / 200 + 1e-15
    e = REGISTRY["congruence-diag"]
    est, partials = translation_number_estimate(e.map, e.x0, e.space, 300)
    assert np.allclose(partials, 2 * math.log(2), rtol=0, atol=1e-12)


def test_translation_number_rejects_zero():
    with pytest.raises(InvalidParameter):
        translation_number_estimate(translation_map(1.0), np.zeros(1), VectorSpace(1, L1), 0)


def test_pushforward_examples():
    sp = VectorSpace(1, L1)
    h = MetricFunctional.closed_form(sp, "minus-x", lambda x: -float(x[0]))
    Th = pushforward_functional(translation_map(1.0), h)
    for x in (-3.0, 0.0, 2.5):
        assert Th(np.array([x])) == pytest.approx(-x, abs=1e-15)
    Ih = pushforward_functional(identity_map(), h)
    assert Ih(np.array([4.0])) == h(np.array([4.0]))
    l1z = SequenceSpace(L1)
    hn = MetricFunctional.closed_form(l1z, "norm", lambda x: x.norm(L1))
    Sh = pushforward_functional(shift_map(1), hn)
    x = FiniteSupportVector(-2, np.array([1.0, -2.0, 0.5]))
    assert Sh(x) == hn(x)


def test_pushforward_needs_inverse():
    h = MetricFunctional.at_point(SequenceSpace(L1, natural=True), FiniteSupportVector.unit(0))
    with pytest.raises(UnsupportedOperation):
        pushforward_functional(insert_shift_map(), h)


def test_homomorphism_of_translations():
    sp = VectorSpace(1, L1)
    h = MetricFunctional.closed_form(sp, "minus-x", lambda x: -float(x[0]))
    x0 = sp.base_point
    phi = lambda a: -h(translation_map(a)(x0))  # noqa: E731
    for a, b in [(0.25, 0.5), (1.0, -3.0), (2.0**-10, 7.0)]:
        assert phi(a + b) == phi(a) + phi(b)


def test_empirical_uses_last_anchor():
    sp = VectorSpace(1, L1)
    h = MetricFunctional.empirical(sp, [np.array([1.0]), np.array([5.0])])
    assert h(np.array([2.0])) == abs(2 - 5) - 5
    assert np.array_equal(h.trace(np.array([2.0])), [0.0, -2.0])
    with pytest.raises(InvalidParameter):
        MetricFunctional.empirical(sp, [])


def test_check_t():
    assert check_t(0.5) == 0.5
    with pytest.raises(InvalidParameter):
        check_t(1.5)


def test_isometry_inverse_roundtrip():
    T = shift_map(3)
    x = FiniteSupportVector(-1, np.array([1.0, 2.0]))
    assert T.inv(T(x)) == x
    assert T.inverse_map()(T(x)) == x
    with pytest.raises(UnsupportedOperation):
        insert_shift_map().inv(x)


def test_to_jsonable_types():
    out = to_jsonable({"f": Fraction(3, 4), "z": 1 + 2j, "n": np.float64("nan"), "a": np.arange(2)})
    assert out == {"f": {"num": 3, "den": 4}, "z": {"x": 1.0, "y": 2.0}, "n": "nan", "a": [0, 1]}


def test_isometry_defect_detects_scaling():
    sp = VectorSpace(1, L1)
    T = Isometry("double", lambda x: 2 * x)
    assert isometry_defect(T, sp, [(np.array([0.0]), np.array([1.0]))]) == 1.0


def test_bicombing_defects_flag_bad_geodesic():
    class Bent(VectorSpace):
        def bicombing(self, x, y, t):
            return (1 - t * t) * x + t * t * y

    d = bicombing_defects(Bent(1, L1), [(np.zeros(1), np.ones(1), 2 * np.ones(1))])
    assert d.speed > 0.1


# properties


@given(seqs, seqs, seqs)
def test_point_functional_nonexpansive_and_normalized(y, a, b):
    sp = SequenceSpace(L1)
    assert sp.horo(y, sp.base_point) == 0.0
    assert abs(sp.horo(y, a) - sp.horo(y, b)) <= sp.distance(a, b) + 1e-9


@given(seqs, seqs, st.integers(-4, 4))
def test_pushforward_of_point_functional_is_image_point(y, x, k):
    sp = SequenceSpace(L1)
    T = shift_map(k)
    Th = pushforward_functional(T, MetricFunctional.at_point(sp, y))
    assert Th(x) == pytest.approx(sp.horo(T(y), x), abs=1e-9)


@given(seqs, seqs, seqs)
def test_base_point_change_adds_constant(y, y0, x):
    sp = SequenceSpace(L2)
    h = MetricFunctional.at_point(sp, y)
    h2 = rebase_functional(h, y0)
    assert h2(x) == pytest.approx(h(x) - h(y0), abs=1e-9)
    assert h2(y0) == pytest.approx(0.0, abs=1e-9)


@given(st.lists(st.floats(-10, 10), min_size=1, max_size=5), st.integers(1, 30))
def test_tau_not_above_pointwise_displacement(xs, n):
    e = REGISTRY["insert-shift-l1"]
    x = FiniteSupportVector(0, np.array(xs))
    tau, _ = translation_number_estimate(e.map, e.x0, e.space, n)
    assert tau <= displacement(e.map, x, e.space) + 1e-6

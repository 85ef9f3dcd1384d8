import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from horolib.core import InvalidParameter
from horolib.ergodic import (
    LinearOperator,
    affine_isometry,
    affinity_defect,
    cesaro_average,
    derived_norm,
    invariant_projection,
    mean_identity_report,
    power_bounded_norm,
    von_neumann_projection,
)
from horolib.normed import L1, L2, FiniteSupportVector, SequenceSpace, VectorSpace, rotation_matrix, shift_map
from horolib.solver import run_schedule

R90 = rotation_matrix(math.pi / 2)


def blockdiag_rot(theta):
    U = np.eye(3)
    U[1:, 1:] = rotation_matrix(theta)
    return U


# frozen examples


def test_cesaro_examples():
    v = np.array([1.0, -2.0])
    for n in (1, 7, 100):
        assert np.array_equal(cesaro_average(np.eye(2), v, n), v)
    assert np.abs(cesaro_average(R90, np.array([1.0, 0.0]), 4)).max() <= 1e-16
    assert np.array_equal(cesaro_average(-np.eye(2), v, 2), np.zeros(2))
    with pytest.raises(InvalidParameter):
        cesaro_average(np.eye(2), v, 0)


def test_cesaro_on_sequences():
    avg = cesaro_average(shift_map(1), FiniteSupportVector.unit(0), 4)
    assert avg == FiniteSupportVector(0, np.full(4, 0.25))


def test_mean_identity_for_identity_is_exact():
    r = mean_identity_report(np.eye(1), np.array([1.0]), VectorSpace(1, L1))
    assert r.rhs == pytest.approx(-1, abs=1e-9)
    assert r.gap <= 1e-9


def test_mean_identity_for_reflection():
    r = mean_identity_report(-np.eye(1), np.array([1.0]), VectorSpace(1, L2), n_grid=(1, 10, 100, 1000))
    # y_s = 1/(1+s) is displaced by (1-s)/(1+s) at the last schedule step
    s = r.solver.last.s
    assert -r.rhs == pytest.approx((1 - s) / (1 + s), rel=1e-6)
    assert abs(r.lhs_per_n[-1]) <= 2e-3
    assert r.d_lstsq == pytest.approx(0, abs=1e-12)


def test_mean_identity_for_shift_window():
    r = mean_identity_report(shift_map(1), FiniteSupportVector.unit(0), SequenceSpace(L1, natural=True),
                             n_grid=(1, 10, 100, 1000))
    assert r.rhs == pytest.approx(-1, abs=1e-9)
    assert abs(r.lhs_per_n[-1] + 1) <= 1e-2


def test_mean_identity_for_rotation_matches_least_squares():
    U = blockdiag_rot(math.pi / 3)
    r = mean_identity_report(U, np.array([0.5, 1.0, 0.0]), VectorSpace(3, L2), n_grid=(1, 10, 100, 1000))
    assert -r.rhs == pytest.approx(r.d_lstsq, abs=1e-6)
    assert r.d_lstsq == pytest.approx(0.5, abs=1e-12)
    assert abs(r.lhs_per_n[-1] - r.rhs) <= 1e-2


def test_von_neumann_examples():
    r = von_neumann_projection(blockdiag_rot(math.pi / 3), np.array([2.0, 1.0, 0.0]))
    assert np.allclose(r.projection, [2, 0, 0], rtol=0, atol=1e-12)
    assert r.errors[-1] <= 1e-2
    assert all(5 <= q <= 20 for q in r.ratios)
    r = von_neumann_projection(np.eye(2), np.array([3.0, -1.0]), (1, 10, 100))
    assert np.array_equal(r.projection, [3.0, -1.0]) and max(r.errors) == 0
    r = von_neumann_projection(R90, np.array([1.0, 1.0]), (4, 40, 400, 401))
    assert np.allclose(r.projection, 0, atol=1e-15)
    # geometric-series bound: |sum_{k<n} U^k v| <= 2 |v| / |1 - i|
    bound = 2 * math.sqrt(2) / abs(1 - 1j)
    assert all(n * e <= bound + 1e-12 for n, e in zip(r.n_grid, r.errors))
    with pytest.raises(InvalidParameter):
        von_neumann_projection(2 * np.eye(2), np.ones(2))


def test_invariant_projection_is_orthogonal_projection(rng):
    U = blockdiag_rot(1.1)
    P = invariant_projection(U)
    assert np.allclose(P @ P, P) and np.allclose(P, P.T) and np.allclose(U @ P, P)


def test_power_bounded_examples():
    x = np.array([3.0, -4.0])
    assert power_bounded_norm(0.5 * np.eye(2), x).value == pytest.approx(5.0)
    assert power_bounded_norm(R90, x).value == pytest.approx(5.0)
    A = np.array([[0.0, 2.0], [0.0, 0.0]])
    r = power_bounded_norm(A, x)
    assert r.value == pytest.approx(max(5.0, np.linalg.norm(A @ x)))
    assert r.value_positive == pytest.approx(8.0)
    assert power_bounded_norm(0.5 * np.eye(2), x).value_positive == pytest.approx(2.5)
    with pytest.raises(InvalidParameter):
        power_bounded_norm(np.array([[1.0, 1.0], [0.0, 1.0]]), x, k_max=50)


def test_norm_preservation_defect(rng):
    assert LinearOperator(R90).norm_preservation_defect(rng) <= 1e-10
    assert LinearOperator(2 * np.eye(2)).norm_preservation_defect(rng) > 0.1
    with pytest.raises(InvalidParameter):
        LinearOperator(np.ones((2, 3)))


def test_power_bounded_functional_bound():
    A, v = np.array([[0.5, 1.0], [0.0, 0.5]]), np.array([1.0, 1.0])
    sp = VectorSpace(2, derived_norm(A, 200, L1))
    rep = run_schedule(affine_isometry(A, v), sp)
    h, tau = rep.limit_functional(), rep.d_hat
    s, w = np.zeros(2), v.copy()
    for n in range(1, 1001):
        s = s + w
        w = A @ w
        if n in (1, 10, 100, 1000):
            assert h(s) <= -n * tau + n * 1e-3


def test_hilbert_functional_is_affine_on_segments(rng):
    U, v = blockdiag_rot(0.9), np.array([1.0, 1.0, 0.0])
    rep = run_schedule(affine_isometry(U, v), VectorSpace(3, L2))
    assert rep.d_hat == pytest.approx(1.0, abs=1e-6)
    h = rep.limit_functional()
    for _ in range(20):
        a, b = rng.uniform(-3, 3, 3), rng.uniform(-3, 3, 3)
        assert affinity_defect(h, a, b) <= 1e-3


# properties


@given(st.lists(st.floats(-5, 5), min_size=2, max_size=2), st.lists(st.floats(-5, 5), min_size=2, max_size=2))
def test_derived_norm_makes_operator_nonexpansive(x, y):
    A = np.array([[0.5, 1.0], [0.0, 0.5]])
    f = derived_norm(A, 200, L1)
    x, y = np.array(x), np.array(y)
    assert f(A @ x - A @ y) <= f(x - y) + 1e-10
    assert f(x - y) >= np.abs(x - y).sum() - 1e-12


@given(st.floats(0, 2 * math.pi), st.lists(st.floats(-5, 5), min_size=3, max_size=3), st.integers(1, 300))
def test_cesaro_average_of_orthogonal_stays_in_ball(theta, v, n):
    v = np.array(v)
    avg = cesaro_average(blockdiag_rot(theta), v, n)
    assert np.linalg.norm(avg) <= np.linalg.norm(v) + 1e-9
    assert avg[0] == pytest.approx(v[0], abs=1e-9)

import csv
import functools
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from horolib.core import InvalidParameter, NonConvergenceError, point_functional_eval, translation_number_estimate
from horolib.normed import (
    L1,
    L2,
    LINF,
    EventuallyConstantSpace,
    FiniteSupportVector,
    SequenceSpace,
    VectorSpace,
    kakutani_map,
    kakutani_ramp,
    prus_map,
    prus_ramp,
    random_ecs,
    random_vector,
    translation_map,
)
from horolib.registry import REGISTRY, get_map, solver_maps
from horolib.solver import (
    SolverConfig,
    epsilon_displacement_functional,
    invariance_report,
    resolvent_point,
    run_schedule,
    schedule_from_k,
    stabilization_check,
)

R1 = VectorSpace(1, L1)


# frozen examples


def test_resolvent_translation():
    for s in (0.5, 0.75, 1 - 2.0**-10):
        r = resolvent_point(translation_map(1.0), R1, s)
        assert r.point[0] == pytest.approx(1 / (1 - s), abs=1e-9)
        assert r.certified_error <= 1e-10


def test_resolvent_at_zero_is_image_of_base_point():
    e = get_map("kakutani")
    r = resolvent_point(e.map, e.space, 0.0)
    assert r.point == e.map(e.x0) and r.iters == 1


def test_resolvent_insert_shift_is_geometric():
    e = get_map("insert-shift-l1")
    s = 0.75
    r = resolvent_point(e.map, e.space, s)
    y = r.point
    k = np.arange(y.size)
    assert y.start == 0
    assert np.max(np.abs(y.values - s**k)) <= 1e-12
    assert s ** y.size <= 1e-10 * (1 - s) * 10


def test_resolvent_rejects_s_outside_range():
    with pytest.raises(InvalidParameter):
        resolvent_point(translation_map(1.0), R1, 1.0)


def test_nonconvergence_carries_last_iterate():
    e = get_map("congruence-diag")
    with pytest.raises(NonConvergenceError) as info:
        resolvent_point(e.map, e.space, 0.999, SolverConfig(max_iter=3))
    assert info.value.last_iterate is not None and info.value.iterations == 3


def test_solver_config_validation():
    with pytest.raises(InvalidParameter):
        SolverConfig(schedule=(0.5, 0.4))
    with pytest.raises(InvalidParameter):
        SolverConfig(schedule=(0.5, 1.0))
    with pytest.raises(InvalidParameter):
        SolverConfig(contraction_tol=0)
    assert SolverConfig().schedule == schedule_from_k(1, 20)


def test_translation_probe_rows():
    probes = [np.array([x]) for x in (-3.0, 0.5, 7.0)]
    rep = run_schedule(translation_map(1.0), R1, SolverConfig(probes=probes))
    last = rep.probe_table[-1]
    for x, v in zip((-3.0, 0.5, 7.0), last):
        assert v == pytest.approx(-x, abs=2.0**-20 * abs(x) + 1e-9)
    assert rep.d_hat == pytest.approx(1.0, abs=1e-9)


def test_reanchor_pass_keeps_translation_rate():
    cfg = SolverConfig(schedule=schedule_from_k(1, 12), reanchor=1, probes=[np.array([2.0])])
    rep = run_schedule(translation_map(1.0), R1, cfg)
    assert rep.passes == 2
    assert rep.d_hat == pytest.approx(1.0, abs=1e-9)
    # rebased at the best point of the first pass, h(x) = -(x - base)
    base = float(rep.space.base_point[0])
    assert rep.probe_table[-1, 0] == pytest.approx(base - 2.0, abs=2.0**-12 * (1 + abs(base)))


def test_basso_limit_is_spreading_functional(solved, rng):
    # solver anchors spread their unit l1 mass, so the l2 part of the anchor vanishes
    h = solved("basso-shift").limit_functional()
    for _ in range(30):
        x = random_vector(rng, natural=False)
        F = math.sqrt((float(x.norm(L1)) + 1) ** 2 + float(x.norm(L2)) ** 2) - math.sqrt(5)
        assert h(x) == pytest.approx(F, abs=1e-4)


def test_insert_shift_saturates_lemma(solved):
    rep = solved("insert-shift-l1")
    for row in rep.converged_rows:
        assert row.lemma_ok
        assert abs(row.dist_x0 * (1 - row.s) - 1) <= 1e-9


def test_rotation_resolvent_points_are_origin():
    e = get_map("rotation")
    probes = e.probes(np.random.default_rng(0), 10)
    rep = run_schedule(e.map, e.space, SolverConfig(probes=probes))
    for row in rep.rows:
        assert np.array_equal(row.point, np.zeros(2))
    h0 = [point_functional_eval(np.zeros(2), p, e.space) for p in probes]
    assert np.array_equal(rep.probe_table, np.tile(h0, (len(rep.rows), 1)))


def test_stabilization_means_fixed_point():
    e = get_map("rotation")
    st_ = stabilization_check(run_schedule(e.map, e.space))
    assert st_.stabilized and st_.displacement <= 1e-8
    e = get_map("translation")
    assert not stabilization_check(run_schedule(e.map, e.space)).stabilized


def test_invariance_examples(solved, rng):
    e = get_map("translation")
    inv = invariance_report(solved("translation"), e.map, e.probes(rng, 100))
    assert inv.max_violation_lower <= 1e-6 and inv.max_violation_upper <= 1e-6
    e = get_map("kakutani")
    inv = invariance_report(solved("kakutani"), e.map, e.probes(rng, 100))
    assert inv.max_abs_defect <= 1e-3
    e = get_map("congruence-diag")
    rep = solved("congruence-diag")
    inv = invariance_report(rep, e.map, e.probes(rng, 100))
    assert max(inv.max_violation_lower, inv.max_violation_upper) <= 1e-3
    assert rep.d_hat == pytest.approx(2 * math.log(2), abs=1e-3)


def test_lemma_bound_every_map(solved):
    for e in solver_maps():
        rep = solved(e.name)
        assert all(r.lemma_ok for r in rep.converged_rows), e.name


def test_epsilon_functional_prus_and_kakutani(rng):
    N = 2**20  # power of two, so the float ramp is exact
    cases = [
        (prus_map(), EventuallyConstantSpace(), prus_ramp, lambda: random_ecs(rng)),
        (kakutani_map(), SequenceSpace(LINF, natural=True, radius=1.0), kakutani_ramp,
         lambda: random_vector(rng, natural=True, radius=1.0)),
    ]
    for T, sp, ramp, sample in cases:
        probes = [sample() for _ in range(30)]
        eps = [1e-1, 1e-3, 2e-6]
        rows = epsilon_displacement_functional(T, sp, eps, probes, anchors=lambda e_: ramp(N, exact=False))
        for row in rows:
            assert row.found and row.anchor_displacement == 1 / N
            assert row.max_increase <= row.eps + 1e-9


def test_epsilon_functional_rotation_exact(rng):
    e = get_map("rotation")
    probes = e.probes(rng, 20)
    rows = epsilon_displacement_functional(e.map, e.space, [1e-2, 1e-6], probes)
    for row in rows:
        assert row.found and row.anchor_displacement == 0
        assert row.max_increase == 0 and row.max_decrease == 0


def test_epsilon_schedule_must_decrease():
    e = get_map("rotation")
    with pytest.raises(InvalidParameter):
        epsilon_displacement_functional(e.map, e.space, [1e-3, 1e-2], [])


def test_unreachable_epsilon_is_flagged():
    e = get_map("translation")
    rows = epsilon_displacement_functional(e.map, e.space, [0.5], [np.zeros(1)])
    assert not rows[0].found


def test_tau_not_above_displacement_over_registry(rng):
    for e in REGISTRY.values():
        # exact dyadic orbits double in length each step, so keep alspach short
        n = 12 if e.orbit_cap else 200
        tau, _ = translation_number_estimate(e.map, e.x0, e.space, n)
        for x in e.probes(rng, 50):
            assert tau <= float(e.space.distance(x, e.map(x))) + 1e-9, e.name


def test_report_serialization(solved):
    rep = solved("kakutani")
    data = json.loads(json.dumps(rep.to_json()))
    assert data["map"] == "kakutani" and len(data["rows"]) == 20
    assert {"s", "status", "iters", "dist_x0", "bound", "displacement"} <= set(data["rows"][0])


def test_probe_csv_columns(rng):
    e = get_map("translation")
    rep = run_schedule(e.map, e.space, SolverConfig(schedule=(0.5, 0.75), probes=e.probes(rng, 3)))
    rows = list(csv.reader(io.StringIO(rep.probe_csv())))
    assert rows[0] == ["s", "probe_id", "h_value"]
    assert len(rows) == 1 + 2 * 3
    assert float(rows[1][0]) == 0.5


# properties


@functools.lru_cache(maxsize=None)
def _limit(name, k_max=20):
    e = get_map(name)
    return run_schedule(e.map, e.space, SolverConfig(schedule=schedule_from_k(1, k_max)))


@given(st.floats(-50, 50), st.integers(1, 200))
def test_translation_functional_drops_linearly(x, n):
    rep = _limit("translation")
    h = rep.limit_functional()
    T = translation_map(1.0)
    xn = np.array([x])
    for _ in range(n):
        xn = T(xn)
    assert abs(h(np.array([x])) - h(xn) - n * rep.d_hat) <= n * 1e-6


@given(st.lists(st.floats(-1, 1), min_size=1, max_size=6))
def test_ones_direction_drop_along_orbit(vals):
    e = get_map("insert-shift-l1")
    h = _limit("insert-shift-l1", 14).limit_functional()
    x = FiniteSupportVector(0, np.array(vals))
    xs = [x]
    for _ in range(5):
        xs.append(e.map(xs[-1]))
    drops = [h(a) - h(b) for a, b in zip(xs, xs[1:])]
    assert np.allclose(drops, 1.0, atol=1e-2)

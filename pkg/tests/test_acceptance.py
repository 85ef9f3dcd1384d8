"""One test per acceptance criterion, each at its stated tolerance.

Every test prints a single ``ACCEPTANCE <n> PASS|FAIL`` line with the
measured quantities, visible in ``pytest -v`` output.
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from horolib.core import bicombing_defects, translation_number_estimate
from horolib.ergodic import cesaro_average, mean_identity_report, von_neumann_projection
from horolib.hyperbolic import H2Space, MobiusMap, busemann_vertical, random_h2_point, tracking_curve, tracking_value
from horolib.linfty import unbounded_witness_linf
from horolib.normed import (
    BASSO,
    L1,
    L2,
    LINF,
    DyadicL1Space,
    FiniteSupportVector,
    EventuallyConstantSpace,
    SequenceSpace,
    VectorSpace,
    alspach_map,
    closed_form_functional_eval,
    prus_map,
    prus_ramp,
    random_alspach_point,
    random_vector,
    rotation_matrix,
    shift_map,
)
from horolib.pos import (
    PosSpace,
    isp_equality_report,
    operator_norm_sym,
    random_spd,
    random_sym,
    segal_gap,
    sym_exp,
    symmetric_eigh,
    unbounded_witness_check,
)
from horolib.registry import REGISTRY, get_map, solver_maps
from horolib.solver import invariance_report

SEED = 20240601


@pytest.fixture
def verdict(capsys):
    def report(number, title, ok, **measured):
        parts = ", ".join(f"{k}={v:.3g}" if isinstance(v, float) else f"{k}={v}" for k, v in measured.items())
        with capsys.disabled():
            print(f"\nACCEPTANCE {number:>2} {'PASS' if ok else 'FAIL'} {title}: {parts}")
        assert ok, f"criterion {number} ({title}) failed: {parts}"

    return report


def test_01_bicombing_contract(verdict):
    rng = np.random.default_rng(SEED)
    seq = lambda: random_vector(rng, natural=False)  # noqa: E731
    worst = {}
    for name, sp in (("l1", SequenceSpace(L1)), ("l2", SequenceSpace(L2)),
                     ("linf", SequenceSpace(LINF)), ("basso", SequenceSpace(BASSO))):
        d = bicombing_defects(sp, [(seq(), seq(), seq()) for _ in range(1000)])
        worst[name] = d.worst()
    # 200 triples in each dimension 2..6
    pos = 0.0
    for n in range(2, 7):
        p, q, r = (random_spd(rng, n, 0.5, size=200) for _ in range(3))
        pos = max(pos, bicombing_defects(PosSpace(n), list(zip(p, q, r))).worst())
    worst["pos"] = pos
    h2 = [tuple(random_h2_point(rng) for _ in range(3)) for _ in range(1000)]
    worst["h2"] = bicombing_defects(H2Space(), h2).worst()
    verdict(1, "bicombing contract", max(worst.values()) <= 1e-8, **worst)


def test_02_lemma_bound(verdict, solved):
    bad, skipped = [], 0
    for e in solver_maps():
        rep = solved(e.name)
        bad += [(e.name, r.s) for r in rep.converged_rows if not r.dist_x0 <= r.bound + 1e-9]
        skipped += len(rep.rows) - len(rep.converged_rows)
    rows = solved("insert-shift-l1").converged_rows
    sat = max(abs(r.dist_x0 - 1 / (1 - r.s)) for r in rows)
    verdict(2, "lemma bound", not bad and sat <= 1e-9,
            violations=len(bad), saturation_error=sat, rows_saturated=len(rows), rows_not_converged=skipped)


def test_03_invariance(verdict, solved):
    rng = np.random.default_rng(SEED)
    defects = {}
    for e in solver_maps():
        inv = invariance_report(solved(e.name), e.map, e.probes(rng, 100))
        defects[e.name] = inv.max_abs_defect
    verdict(3, "invariant functional", max(defects.values()) <= 5e-3, **defects)


def test_04_closed_forms(verdict, solved):
    rng = np.random.default_rng(SEED)
    gaps = {}
    for name in ("kakutani", "insert-shift-l1", "shift-l1z"):
        e = get_map(name)
        h = solved(name).limit_functional()
        F = lambda x: closed_form_functional_eval(e.closed_form, x)  # noqa: E731
        f0 = F(e.x0)
        gaps[e.closed_form] = max(abs(h(x) - float(F(x) - f0)) for x in e.probes(rng, 100))
    # exact: h(Tx) - h(x) = -1 in rational arithmetic for the ones-direction functional
    T = get_map("insert-shift-l1").map
    exact_bad = 0
    for _ in range(200):
        x = random_vector(rng, natural=True)
        x = FiniteSupportVector(x.start, np.array([Fraction(float(v)).limit_denominator(1024) for v in x.values],
                                                  dtype=object))
        exact_bad += closed_form_functional_eval("ones-direction", T(x)) - \
            closed_form_functional_eval("ones-direction", x) != -1
    verdict(4, "closed-form agreement", max(gaps.values()) <= 1e-2 and exact_bad == 0,
            exact_failures=exact_bad, **gaps)


def test_05_tau_equals_d(verdict, solved):
    expected = {"translation": 1.0, "insert-shift-l1": 1.0, "kakutani": 0.0, "prus": 0.0,
                "congruence-diag": 2 * math.log(2)}
    errs = {}
    for name, d in expected.items():
        e = get_map(name)
        tau, _ = translation_number_estimate(e.map, e.x0, e.space, 10_000)
        d_hat = solved(name).d_hat
        errs[name] = max(abs(tau - d_hat), abs(tau - d), abs(d_hat - d))
    verdict(5, "tau = d", max(errs.values()) <= 1e-2, **errs)


def test_06_mean_ergodic_identity(verdict):
    ident = mean_identity_report(np.eye(1), np.array([1.0]), VectorSpace(1, L1), n_grid=(1, 10, 100, 1000))
    rot = mean_identity_report(rotation_matrix(math.pi / 2), np.array([1.0, 0.0]), VectorSpace(2, L2),
                               n_grid=(1, 10, 100, 1000))
    shift = mean_identity_report(shift_map(1), FiniteSupportVector.unit(0), SequenceSpace(L1, natural=True),
                                 n_grid=(1, 10, 100, 1000))
    g_id = max(ident.gap, abs(ident.rhs + 1))
    g_rot = abs(rot.lhs_per_n[-1] - rot.rhs)
    g_shift = abs(shift.lhs_per_n[-1] - shift.rhs)
    verdict(6, "mean ergodic identity", g_id <= 1e-9 and g_rot <= 1e-2 and g_shift <= 1e-2
            and abs(shift.rhs + 1) <= 1e-9,
            identity_gap=g_id, rotation_gap=g_rot, shift_gap=g_shift, shift_rhs=shift.rhs)


def test_07_von_neumann(verdict):
    U = np.eye(3)
    U[1:, 1:] = rotation_matrix(math.pi / 3)
    v = np.array([2.0, 1.0, 0.0])
    grid = (10, 100, 1000, 10_000)
    r = von_neumann_projection(U, v, grid)
    err = float(np.linalg.norm(cesaro_average(U, v, 10_000) - np.array([2.0, 0.0, 0.0])))
    ok_rate = all(5 <= q <= 20 for q in r.ratios)
    verdict(7, "von Neumann", err <= 1e-2 and ok_rate and np.allclose(r.projection, [2, 0, 0], atol=1e-12),
            error_at_1e4=err, ratios=[round(q, 3) for q in r.ratios])


def test_08_isp_equality(verdict):
    two_log2 = 2 * math.log(2)
    diag = isp_equality_report(np.diag([2.0, 1.0]))
    c, s = math.cos(0.7), math.sin(0.7)
    orth = isp_equality_report(np.array([[c, -s], [s, c]]), search_budget=500, rhs_n=10_000)
    shear = isp_equality_report(np.array([[1.0, 1.0], [0.0, 1.0]]))
    ok = (abs(diag.lhs - two_log2) <= 1e-3 and abs(diag.rhs - two_log2) <= 1e-3
          and abs(orth.lhs) <= 1e-9 and abs(orth.rhs) <= 1e-9
          and shear.rhs <= 1e-3 and shear.lhs <= 5e-2)
    verdict(8, "ISP equality (Thompson reading)", ok,
            diag_lhs_err=abs(diag.lhs - two_log2), diag_rhs_err=abs(diag.rhs - two_log2),
            orth_lhs=orth.lhs, orth_rhs=orth.rhs, shear_lhs=shear.lhs, shear_rhs=shear.rhs)


def test_09_segal(verdict):
    rng = np.random.default_rng(SEED)
    worst = math.inf
    for n in range(1, 7):
        k = 1000 // 6 + (n <= 1000 % 6)
        worst = min(worst, float(np.min(segal_gap(random_sym(rng, n, size=k), random_sym(rng, n, size=k)))))
    verdict(9, "Segal's inequality", worst >= -1e-10, pairs=1000, min_gap=worst)


def test_10_unboundedness(verdict):
    rng = np.random.default_rng(SEED)
    pos_fail = 0
    for _ in range(500):
        n = int(rng.integers(1, 6))
        Y = random_sym(rng, n)
        Y *= rng.uniform(2.5, 10) / operator_norm_sym(Y)
        pos_fail += not unbounded_witness_check(sym_exp(Y)).passed
    lin_fail = 0
    for _ in range(500):
        y = rng.uniform(-1, 1, int(rng.integers(1, 9)))
        y *= rng.uniform(2.001, 50) / np.abs(y).max()
        lin_fail += not unbounded_witness_linf(y).passed
    verdict(10, "unboundedness witnesses", pos_fail == 0 and lin_fail == 0,
            pos_failures=pos_fail, linf_failures=lin_fail)


def test_11_h2_tracking(verdict):
    g = MobiusMap.dilation(2.0)
    track = max(tracking_value(g, n) for n in range(1, 201))
    rng = np.random.default_rng(SEED)
    zs = [random_h2_point(rng) for _ in range(200)]
    bus = max(abs(busemann_vertical(2 * z) - (busemann_vertical(z) - math.log(2))) for z in zs)
    curve = tracking_curve(MobiusMap.translation(1.0) @ g, 200)
    decreasing = bool(np.all(np.diff(curve) <= 0))
    verdict(11, "H2 tracking", track == 0 and bus <= 1e-12 and decreasing and curve[-1] < curve[0],
            tracking=track, busemann_err=bus, perturbed_first=float(curve[0]), perturbed_last=float(curve[-1]))


def test_12_alspach(verdict):
    rng = np.random.default_rng(SEED)
    T, sp = alspach_map(), DyadicL1Space()
    bad = outside = 0
    for _ in range(200):
        f = random_alspach_point(rng, level=int(rng.integers(0, 7)))
        g = random_alspach_point(rng, level=int(rng.integers(0, 7)))
        d = sp.distance(f, g)
        bad += not (isinstance(d, Fraction) and sp.distance(T(f), T(g)) == d)
        outside += not (T(f).in_alspach_set() and T(g).in_alspach_set())
    verdict(12, "Alspach exact isometry", bad == 0 and outside == 0, mismatches=bad, outside_X=outside)


def test_13_prus(verdict, solved):
    T, sp = prus_map(), EventuallyConstantSpace()
    wrong = [N for N in range(2, 65) if sp.distance(prus_ramp(N), T(prus_ramp(N))) != Fraction(1, N)]
    rows = solved("prus").converged_rows
    disp = [r.displacement for r in rows]
    decreasing = all(b < a for a, b in zip(disp, disp[1:]))
    verdict(13, "Prus map", not wrong and decreasing and min(disp) > 0 and disp[-1] <= 1e-5,
            ramp_mismatches=len(wrong), first_residual=disp[0], last_residual=disp[-1], min_residual=min(disp))


def test_14_eigensolver(verdict):
    rng = np.random.default_rng(SEED)
    S = random_sym(rng, 8, size=100)
    lam, Q = symmetric_eigh(S)
    Qt = np.swapaxes(Q, -1, -2)
    orth = float(np.abs(Qt @ Q - np.eye(8)).max())
    rec = float((np.abs((Q * lam[..., None, :]) @ Qt - S).max(axis=(1, 2))
                 / (1 + np.abs(S).max(axis=(1, 2)))).max())
    verdict(14, "eigensolver", orth <= 1e-10 and rec <= 1e-10, orthogonality=orth, reconstruction=rec)


def test_registry_has_every_acceptance_map():
    assert {"translation", "insert-shift-l1", "kakutani", "prus", "congruence-diag", "shift-l1z"} <= set(REGISTRY)

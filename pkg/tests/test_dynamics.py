import math

import numpy as np
import pytest

from hbarlab.curves import make_keyhole
from hbarlab.dynamics import (
    PlaneTranslation,
    ProjectiveSwap,
    certify_swap_displacement,
    certify_translation_displacement,
    flow,
    hofer_norm,
    point_sampling,
    rk4_translation,
    smoothstep,
    swap_flow,
    symplectic_gradient,
)
from hbarlab.errors import ChartMismatch, DoesNotFit, DomainError, StepFailure
from hbarlab.tori import Product, brendel_torus, projective_chekanov_torus


def random_cp(n, count, seed=0):
    rng = np.random.default_rng(seed)
    return rng.normal(size=(count, n + 1)) + 1j * rng.normal(size=(count, n + 1))


def same_point(v, w):
    # projective equality up to a complex scalar
    v = v / np.linalg.norm(v, axis=-1, keepdims=True)
    w = w / np.linalg.norm(w, axis=-1, keepdims=True)
    return np.abs(np.abs(np.sum(np.conj(v) * w, axis=-1)) - 1)


# --- swap ----------------------------------------------------------------------


def test_swap_endpoints():
    H = ProjectiveSwap(2, (1, 2))
    w = random_cp(2, 50)
    np.testing.assert_allclose(swap_flow(H, w, 0.0), w, atol=1e-15)
    np.testing.assert_allclose(swap_flow(H, w, 1.0), w[:, [0, 2, 1]], atol=1e-14)


def test_swap_is_involution():
    H = ProjectiveSwap(3, (0, 3))
    w = random_cp(3, 50, seed=1)
    assert same_point(flow(H, flow(H, w, 1.0), 1.0), w).max() < 1e-12


def test_swap_hamiltonian_scale_invariant():
    H = ProjectiveSwap(2)
    w = random_cp(2, 30, seed=2)
    np.testing.assert_allclose(H(w * (0.3 - 2j)), H(w), rtol=1e-13)


def test_swap_flow_is_generated_by_half_h():
    # on the unit sphere the closed-form velocity equals -X_H / 2 up to the
    # circle direction i w; the stated H itself has time-1 map the identity
    H = ProjectiveSwap(2, (1, 2))
    rng = np.random.default_rng(3)
    for _ in range(10):
        w = rng.normal(size=3) + 1j * rng.normal(size=3)
        w /= np.linalg.norm(w)
        h = 1e-6
        dw = (swap_flow(H, w, h) - swap_flow(H, w, -h)) / (2 * h)
        r = dw + 0.5 * symplectic_gradient(H, w)
        r -= np.vdot(1j * w, r).real * 1j * w
        assert np.linalg.norm(r) < 1e-7
        # the flow of H rotates w_1 - w_2 by a full turn at t = 1
        full = swap_flow(H, w, 2.0)
        assert same_point(full[None], w[None])[0] < 1e-12


@pytest.mark.parametrize("n", [2, 3])
def test_swap_hofer_norm_all_slots(n):
    for i in range(n + 1):
        for j in range(i + 1, n + 1):
            m = hofer_norm(ProjectiveSwap(n, (i, j)))
            assert m.norm == pytest.approx(math.pi, abs=1e-3)
            assert m.minimum == pytest.approx(0, abs=1e-6)


def test_hofer_norm_scales():
    H = ProjectiveSwap(2)
    assert hofer_norm(H.scaled(3.0)).norm == pytest.approx(3 * hofer_norm(H).norm, rel=1e-12)
    with pytest.raises(ValueError):
        hofer_norm(H, grid=8)


def test_swap_rejects_bad_slots():
    with pytest.raises(DomainError):
        ProjectiveSwap(2, (1, 1))
    with pytest.raises(DomainError):
        ProjectiveSwap(2, (0, 3))


# --- translation -----------------------------------------------------------------


def test_smoothstep_is_c2():
    u = np.array([0.0, 1.0])
    assert smoothstep(u).tolist() == [0.0, 1.0]
    h = 1e-4
    for x in (0.0, 1.0):
        d1 = (smoothstep(np.array(x + h)) - smoothstep(np.array(x - h))) / (2 * h)
        d2 = (smoothstep(np.array(x + h)) - 2 * smoothstep(np.array(x)) + smoothstep(np.array(x - h))) / h**2
        assert abs(d1) < 1e-6 and abs(d2) < 1e-3


def test_translation_moves_disk_exactly():
    H = PlaneTranslation(1.0, 0.05, 0.05)
    rng = np.random.default_rng(4)
    z = H.radius * np.sqrt(rng.uniform(size=200)) * np.exp(2j * math.pi * rng.uniform(size=200))
    moved = flow(H, z[:, None], 1.0)[:, 0]
    np.testing.assert_allclose(moved, z + H.shift, atol=1e-10)


def test_translation_conserves_energy():
    # a wide cutoff keeps RK4 resolved over the whole support
    H = PlaneTranslation(1.0, cutoff_width=1.0)
    rng = np.random.default_rng(5)
    (x0, x1), (y0, y1) = H.support_box
    z = rng.uniform(x0, x1, 200) + 1j * rng.uniform(y0, y1, 200)
    moved = rk4_translation(H, z[:, None], 1.0)[:, 0]
    assert np.max(np.abs(H.value(moved) - H.value(z))) < 1e-8


def test_translation_conserves_energy_on_disk_orbits():
    H = PlaneTranslation(1.0)
    rng = np.random.default_rng(9)
    z = H.radius * np.sqrt(rng.uniform(size=200)) * np.exp(2j * math.pi * rng.uniform(size=200))
    moved = rk4_translation(H, z[:, None], 1.0)[:, 0]
    assert np.max(np.abs(H.value(moved) - H.value(z))) < 1e-8


def test_translation_velocity_matches_gradient():
    H = PlaneTranslation(0.8)
    rng = np.random.default_rng(6)
    (x0, x1), (y0, y1) = H.support_box
    z = rng.uniform(x0, x1, 50) + 1j * rng.uniform(y0, y1, 50)
    numeric = symplectic_gradient(lambda p: H.value(p[..., 0]), z[:, None])[:, 0]
    np.testing.assert_allclose(H.velocity(z), numeric, atol=1e-6)


def test_translation_is_symplectic():
    # infinitesimal triangle areas: the central-difference Jacobian has det 1
    H = PlaneTranslation(1.0, cutoff_width=1.0)
    rng = np.random.default_rng(7)
    (x0, x1), (y0, y1) = H.support_box
    c = rng.uniform(x0, x1, 20) + 1j * rng.uniform(y0, y1, 20)
    h = 1e-5
    probe = np.concatenate([c + h, c - h, c + 1j * h, c - 1j * h])
    img = flow(H, probe[:, None], 1.0)[:, 0].reshape(4, -1)
    dx, dy = (img[0] - img[1]) / (2 * h), (img[2] - img[3]) / (2 * h)
    det = (dx.conjugate() * dy).imag
    assert np.max(np.abs(det - 1)) < 1e-6


def test_translation_energy_drift_detected():
    H = PlaneTranslation(1.0, cutoff_width=0.01)
    (x0, x1), (y0, y1) = H.support_box
    z = np.array([[0.5 * (x0 + x1) + 1j * (y1 - 0.005)]])
    with pytest.raises(StepFailure):
        rk4_translation(H, z, 1.0, step=0.25)


def test_translation_hofer_breakdown():
    H = PlaneTranslation(1.0, 0.05)
    m = hofer_norm(H)
    R = math.sqrt(1 / math.pi)
    assert m.breakdown["translation_cost"] == pytest.approx(2 * R * (2 * R + 0.05))
    assert m.breakdown["cutoff_overhead"] >= -1e-9
    assert m.norm == pytest.approx(m.breakdown["translation_cost"] + m.breakdown["cutoff_overhead"])


def test_flow_rejects_bad_time():
    with pytest.raises(ValueError):
        flow(PlaneTranslation(1.0), np.zeros((1, 1), complex), 1.5)


# --- certificates ------------------------------------------------------------------


@pytest.fixture(scope="module")
def swap_cert():
    curve = make_keyhole(0.9, 0.95)
    return certify_swap_displacement(2, 0.9, curve)


def test_swap_certificate(swap_cert):
    c = swap_cert
    assert c.method == "MomentInterval" and c.verdict and c.separation > 0
    # oracle: moment interval bound with the container area replaced by the curve's
    s_max = c.bounds["torus"][1]
    assert c.separation == pytest.approx(math.pi - 2 * s_max - s_max)
    assert s_max < 0.95 + 1e-3
    assert c.separation >= math.pi - 3 * 0.95 - 3e-3
    assert c.details["hofer_stated"] == pytest.approx(math.pi, abs=1e-3)
    d = c.to_dict()
    assert d["verdict"] is True and "cross_check" in d


def test_point_sampling_false_verdict_has_witness(swap_cert):
    cross = swap_cert.details["cross_check"]
    assert cross["method"] == "PointSampling"
    if not cross["verdict"]:
        assert cross["witness"]["distance"] == pytest.approx(cross["separation"])


def test_point_sampling_on_coincident_clouds():
    rng = np.random.default_rng(8)
    pts = rng.normal(size=(200, 2)) + 1j * rng.normal(size=(200, 2))
    cert = point_sampling(pts, pts.copy())
    assert not cert.verdict and cert.witness["distance"] == 0
    far = point_sampling(pts, pts + 100)
    assert far.verdict and far.separation > 0 and far.witness is None


def test_chart_slots_mismatch():
    curve = make_keyhole(0.9, 0.95)
    with pytest.raises(ChartMismatch) as info:
        certify_swap_displacement(2, 0.9, curve, chart_slot=1, slots=(0, 2))
    assert info.value.witness["distance_to_torus"] < 1e-9


def test_swap_gap_closes_near_monotone():
    a = math.pi / 3 - 0.01
    curve = make_keyhole(a, a + 0.005)
    c = certify_swap_displacement(2, a, curve)
    assert 0 < c.separation < 0.05


def test_translation_certificate_upsilon():
    a = math.pi / 3 + 0.05
    T = brendel_torus(2, a)
    cert, energy = certify_translation_displacement(T, 2, samples=4000)
    A = cert.details["optimal_floor"]
    assert cert.verdict and cert.separation > 0
    # confining area pi max|Gamma|^2 = a + eps, inside the keyhole's container
    assert a < A < T.curve.container_area
    assert 1.0 <= energy / A <= 1.6
    assert energy >= A


def test_translation_certificate_product():
    cert, energy = certify_translation_displacement(Product((1.0, 1.0)), 0, samples=2000)
    assert cert.verdict
    assert energy == pytest.approx(4 / math.pi + 0.05 * 2 / math.sqrt(math.pi) + cert.details["breakdown"]["cutoff_overhead"])
    assert energy >= 1.0


def test_translation_does_not_fit_cpn():
    T = projective_chekanov_torus(2, 0.9)
    with pytest.raises(DoesNotFit) as info:
        certify_translation_displacement(T, 0)
    assert 0 < info.value.max_feasible_a < 0.9

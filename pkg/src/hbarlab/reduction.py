"""Moment maps, the T^2-action behind Brendel tori, the reduction map to the
punctured disk B*(pi/k) and its inverse section.

Polar coordinates use angles in turns: z_j = r_j exp(2 pi i theta_j).
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .curves import CurveSpec
from .errors import CurveHitsOrigin, CurveTooLarge, NotOnLevelSet, OutOfDisk
from .tori import Brendel, std_form

LEVEL_TOL = 1e-10


def mu(z):
    """Standard toric moment map, mu_j = pi |z_j|^2."""
    return math.pi * np.abs(np.asarray(z, dtype=complex)) ** 2


def chekanov_map(z):
    m = mu(z)
    return m[..., :1] - m[..., 1:]


def nu(z, k):
    m = mu(z)
    return np.stack([m[..., 0] + k * m[..., 2], m[..., 1] - m[..., 2]], axis=-1)


def nu_jacobian(z, k):
    """2 x 6 real Jacobian of nu_k in coordinates (x1, y1, x2, y2, x3, y3)."""
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    two_pi = 2 * math.pi
    row1 = two_pi * np.array([x[0], y[0], 0, 0, k * x[2], k * y[2]])
    row2 = two_pi * np.array([0, 0, x[1], y[1], -x[2], -y[2]])
    return np.vstack([row1, row2])


def torus_action(theta, z, k):
    """(theta_1, theta_2) . z = (e(theta_1) z_1, e(theta_2) z_2, e(k theta_1 - theta_2) z_3)."""
    theta = np.asarray(theta, dtype=float)
    z = np.asarray(z, dtype=complex)
    t1, t2 = theta[..., 0], theta[..., 1]
    phase = np.stack([t1, t2, k * t1 - t2], axis=-1)
    return np.exp(2j * math.pi * phase) * z


@dataclass(frozen=True)
class LevelPoint:
    point: np.ndarray
    k: int

    @property
    def on_Z(self):
        p = np.asarray(self.point, dtype=complex)
        r = np.abs(p)
        level = nu(p, self.k) - np.array([math.pi, 0.0])
        return bool(
            np.all(np.abs(level) < LEVEL_TOL)
            and r[0] > LEVEL_TOL
            and r[2] > LEVEL_TOL
            and abs(r[1] - r[2]) < LEVEL_TOL
        )


def q_raw(p, k):
    """q on arrays of points, no level-set check.

    The reduced coordinate is r_3 exp(2 pi i (theta_2 + theta_3 - k theta_1)),
    the phase combination annihilated by both generators of the action.
    """
    p = np.asarray(p, dtype=complex)
    u1 = p[..., 0] / np.abs(p[..., 0])
    u2 = p[..., 1] / np.abs(p[..., 1])
    return p[..., 2] * np.conj(u1) ** k * u2


def q_map(p):
    """Reduced coordinate of a point of Z_k, a point of B*(pi/k)."""
    if not p.on_Z:
        raise NotOnLevelSet("point is not on Z_k")
    return complex(q_raw(p.point, p.k))


def section_g_raw(w, k):
    w = np.asarray(w, dtype=complex)
    m = np.abs(w)
    return np.stack([np.sqrt(1 - k * m**2) + 0j, m + 0j, w], axis=-1)


def section_g(w, k):
    """Orbit representative (sqrt(1 - k|w|^2), |w|, w) over w in B*(pi/k)."""
    w = complex(w)
    if not (0 < math.pi * abs(w) ** 2 < math.pi / k):
        raise OutOfDisk("w must lie in the punctured disk B*(pi/k)")
    return LevelPoint(section_g_raw(w, k), k)


def random_level_points(k, count, rng):
    """Random points of Z_k: a random orbit over a random reduced point."""
    rad = np.sqrt(rng.uniform(0.02, 0.98, count) / k)
    w = rad * np.exp(2j * math.pi * rng.uniform(size=count))
    theta = rng.uniform(size=(count, 2))
    return torus_action(theta, section_g_raw(w, k), k)


def tangent_basis(p, k, threshold=1e-10):
    """Orthonormal real basis (as complex 3-vectors) of ker d(nu_k) at p."""
    J = nu_jacobian(p, k)
    _, sv, vt = np.linalg.svd(J)
    rank = int(np.sum(sv > threshold))
    ker = vt[rank:]
    return ker[:, 0::2] + 1j * ker[:, 1::2]


def orbit_directions(p, k):
    """Generators of the T^2-action at p."""
    p = np.asarray(p, dtype=complex)
    two_pi_i = 2j * math.pi
    return np.array(
        [[two_pi_i * p[0], 0, two_pi_i * k * p[2]], [0, two_pi_i * p[1], -two_pi_i * p[2]]]
    )


def dq(p, v, k, h=1e-6):
    """Directional derivative of q along v by central differences."""
    return (q_raw(p + h * v, k) - q_raw(p - h * v, k)) / (2 * h)


def reduced_form_defects(k, samples, seed=0, target_scale=1.0, pairs=4):
    """|omega_std(v, v') - scale * (dx ^ dy)(dq v, dq v')| over random
    tangent pairs of Z_k."""
    rng = np.random.default_rng(seed)
    pts = random_level_points(k, samples, rng)
    out = []
    for p in pts:
        basis = tangent_basis(p, k)
        for _ in range(pairs):
            c = rng.normal(size=(2, basis.shape[0]))
            v, vp = c @ basis
            lhs = std_form(v, vp)
            a, b = dq(p, v, k), dq(p, vp, k)
            rhs = target_scale * float(np.imag(np.conj(a) * b))
            out.append(abs(lhs - rhs))
    return np.array(out)


def verify_reduced_form(k, samples=200, seed=0):
    """Largest defect of the pullback identity omega_std = q^*(area form) on Z_k."""
    if samples < 2:
        raise ValueError("samples >= 2")
    return float(reduced_form_defects(k, samples, seed).max())


def reduction_record(k, samples=200, seed=0):
    return {"k": k, "samples": samples, "max_defect": verify_reduced_form(k, samples, seed), "seed": seed}


def reduction_record_json(k, samples=200, seed=0):
    return json.dumps(reduction_record(k, samples, seed), sort_keys=True)


def lift_curve(curve: CurveSpec, k: int, a=None) -> Brendel:
    """Brendel torus q^{-1}(curve): orbits of the section over the curve."""
    if math.pi * curve.max_modulus**2 >= math.pi / k:
        raise CurveTooLarge(f"curve leaves B*(pi/{k})")
    if curve.min_modulus <= 0 or curve.winding_about(0.0) != 0:
        raise CurveHitsOrigin("curve must avoid and not enclose the origin")
    return Brendel(k, curve.target_area if a is None else a, curve)


def lifted_points(curve, k, angles, t):
    """Points action(theta, g(curve(t))) used to check a lift against Brendel's formula."""
    return torus_action(angles, section_g_raw(curve(t), k), k)

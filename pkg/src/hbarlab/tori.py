"""The four torus families, the Darboux chart into CP^n and Lagrangian checks.

Every family exposes ``parametrize(angles, t)`` and ``tangent_frame(angles, t)``
with analytic derivatives.  Angles are in turns (period 1).  Points of C^n are
complex arrays with the coordinate axis last; points of CP^n are unit
homogeneous vectors of length n + 1.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .curves import CurveSpec, make_keyhole
from .errors import DomainError, OutOfChart

TWO_PI_I = 2j * math.pi


def _e(theta):
    return np.exp(TWO_PI_I * np.asarray(theta, dtype=float))


def _radial_rate(z, dz):
    """d|z|/dt given z(t) and dz/dt."""
    return np.real(np.conj(z) * dz) / np.abs(z)


@dataclass(frozen=True)
class Product:
    areas: tuple

    family = "product"

    def __post_init__(self):
        object.__setattr__(self, "areas", tuple(float(a) for a in self.areas))
        if not self.areas or min(self.areas) <= 0:
            raise DomainError("product torus needs positive areas")

    @property
    def n(self):
        return len(self.areas)

    @property
    def dim(self):
        return self.n

    @property
    def n_angles(self):
        return self.n

    @property
    def uses_curve(self):
        return False

    @property
    def radii(self):
        return np.sqrt(np.array(self.areas) / math.pi)

    def parametrize(self, angles, t=None):
        return self.radii * _e(angles)

    def tangent_frame(self, angles, t=None):
        p = self.parametrize(angles)
        frame = np.zeros(p.shape + (self.n,), dtype=complex)
        for j in range(self.n):
            frame[..., j, j] = TWO_PI_I * p[..., j]
        return frame


@dataclass(frozen=True)
class ChekanovCn:
    """Lift of a contractible curve through the reduction by
    (mu_1 - mu_2, ..., mu_1 - mu_n).  The free angles are theta_1..theta_{n-1};
    theta_n = -(theta_1 + ... + theta_{n-1}) enforces the phase constraint."""

    n: int
    a: float
    curve: CurveSpec

    family = "chekanov_cn"

    def __post_init__(self):
        if self.n < 2:
            raise DomainError("n >= 2 required")
        if self.curve.container_area > math.pi / self.n + 1e-12:
            raise DomainError("curve container exceeds pi/n")
        if abs(self.curve.target_area - self.a) > 1e-9:
            raise DomainError("curve area does not match a")

    @property
    def dim(self):
        return self.n

    @property
    def n_angles(self):
        return self.n - 1

    @property
    def uses_curve(self):
        return True

    def parametrize(self, angles, t):
        angles = np.asarray(angles, dtype=float)
        z = self.curve(t)
        last = -np.sum(angles, axis=-1)
        head = np.abs(z)[..., None] * _e(angles)
        return np.concatenate([head, (_e(last) * z)[..., None]], axis=-1)

    def tangent_frame(self, angles, t):
        angles = np.asarray(angles, dtype=float)
        p = self.parametrize(angles, t)
        z = self.curve(t)
        dz = self.curve.derivative(t)
        n = self.n
        frame = np.zeros(p.shape + (n,), dtype=complex)
        for j in range(n - 1):
            frame[..., j, j] = TWO_PI_I * p[..., j]
            frame[..., n - 1, j] = -TWO_PI_I * p[..., n - 1]
        last = -np.sum(angles, axis=-1)
        frame[..., : n - 1, n - 1] = _radial_rate(z, dz)[..., None] * _e(angles)
        frame[..., n - 1, n - 1] = _e(last) * dz
        return frame


@dataclass(frozen=True)
class Brendel:
    """Lift of a contractible curve in B*(pi/k) through the reduction by
    nu_k = (mu_1 + k mu_3, mu_2 - mu_3) at level (pi, 0)."""

    k: int
    a: float
    curve: CurveSpec

    family = "brendel"

    def __post_init__(self):
        k = self.k
        if k < 2:
            raise DomainError("k >= 2 required")
        if not (math.pi / (k + 1) - 1e-12 <= self.a < math.pi / k):
            raise DomainError("a must lie in [pi/(k+1), pi/k)")
        if self.curve.container_area > math.pi / k + 1e-12:
            raise DomainError("curve container exceeds pi/k")
        if abs(self.curve.target_area - self.a) > 1e-9:
            raise DomainError("curve area does not match a")

    n = 3

    @property
    def dim(self):
        return 3

    @property
    def n_angles(self):
        return 2

    @property
    def uses_curve(self):
        return True

    def parametrize(self, angles, t):
        angles = np.asarray(angles, dtype=float)
        z = self.curve(t)
        rad = 1.0 - self.k * np.abs(z) ** 2
        if np.any(rad <= 0):
            raise DomainError("curve leaves B(pi/k)")
        th1, th2 = angles[..., 0], angles[..., 1]
        return np.stack(
            [np.sqrt(rad) * _e(th1), np.abs(z) * _e(th2), _e(self.k * th1 - th2) * z],
            axis=-1,
        )

    def tangent_frame(self, angles, t):
        angles = np.asarray(angles, dtype=float)
        p = self.parametrize(angles, t)
        z = self.curve(t)
        dz = self.curve.derivative(t)
        k = self.k
        th1, th2 = angles[..., 0], angles[..., 1]
        frame = np.zeros(p.shape + (3,), dtype=complex)
        frame[..., 0, 0] = TWO_PI_I * p[..., 0]
        frame[..., 2, 0] = TWO_PI_I * k * p[..., 2]
        frame[..., 1, 1] = TWO_PI_I * p[..., 1]
        frame[..., 2, 1] = -TWO_PI_I * p[..., 2]
        rr = np.real(np.conj(z) * dz)
        frame[..., 0, 2] = -k * rr / np.sqrt(1 - k * np.abs(z) ** 2) * _e(th1)
        frame[..., 1, 2] = rr / np.abs(z) * _e(th2)
        frame[..., 2, 2] = _e(k * th1 - th2) * dz
        return frame


# --- Darboux chart into CP^n -------------------------------------------------


def darboux_chart(zeta, chart_slot=1):
    """Unit homogeneous coordinates of the image of ``zeta`` (|zeta| < 1).

    The slot ``chart_slot`` receives sqrt(1 - |zeta|^2); the entries of zeta
    fill the remaining slots in order.  The deleted hyperplane is
    {w_chart_slot = 0}.
    """
    zeta = np.asarray(zeta, dtype=complex)
    norm2 = np.sum(np.abs(zeta) ** 2, axis=-1)
    if np.any(norm2 >= 1.0):
        raise OutOfChart("|zeta| >= 1")
    s = np.sqrt(1.0 - norm2)
    return np.concatenate([zeta[..., :chart_slot], s[..., None], zeta[..., chart_slot:]], axis=-1)


def chart_inverse(w, chart_slot=1):
    """Inverse of :func:`darboux_chart` on the hyperplane complement."""
    w = np.asarray(w, dtype=complex)
    w = w / np.linalg.norm(w, axis=-1, keepdims=True)
    ws = w[..., chart_slot]
    if np.any(np.abs(ws) < 1e-15):
        raise OutOfChart("point lies on the deleted hyperplane")
    phase = np.conj(ws) / np.abs(ws)
    return np.delete(w, chart_slot, axis=-1) * phase[..., None]


def chart_affine(zeta):
    """Affine coordinate w = zeta / sqrt(1 - |zeta|^2) of the chart image."""
    zeta = np.asarray(zeta, dtype=complex)
    s = np.sqrt(1.0 - np.sum(np.abs(zeta) ** 2, axis=-1))
    return zeta / s[..., None]


def chart_affine_differential(zeta, v):
    """Differential of :func:`chart_affine` at zeta applied to v."""
    zeta = np.asarray(zeta, dtype=complex)
    s = np.sqrt(1.0 - np.sum(np.abs(zeta) ** 2, axis=-1))[..., None]
    rr = np.sum(np.real(np.conj(zeta) * v), axis=-1)[..., None]
    return v / s + zeta * rr / s**3


def fs_hermitian(w):
    """Hermitian coefficient matrix of the Fubini-Study form in an affine
    chart, normalised so that a projective line has area pi."""
    w = np.asarray(w, dtype=complex)
    n2 = 1.0 + np.sum(np.abs(w) ** 2, axis=-1)
    eye = np.eye(w.shape[-1])
    outer = w[..., :, None] * np.conj(w)[..., None, :]
    return eye / n2[..., None, None] - outer / (n2**2)[..., None, None]


def fs_form(w, u, v):
    """omega_FS(u, v) at affine point w: Im(u^dagger H(w) v)."""
    H = fs_hermitian(w)
    return np.imag(np.einsum("...i,...ij,...j->...", np.conj(u), H, v))


def std_form(u, v):
    """omega_std(u, v) = Im <u, v> for u, v in C^n (last axis)."""
    return np.sum(np.imag(np.conj(u) * v), axis=-1)


@dataclass(frozen=True)
class ChekanovCPn:
    """Image of a Chekanov torus of C^n under the Darboux chart into CP^n."""

    n: int
    a: float
    curve: CurveSpec
    chart_slot: int = 1
    base: ChekanovCn = field(init=False, repr=False, compare=False)

    family = "chekanov_cpn"

    def __post_init__(self):
        object.__setattr__(self, "base", ChekanovCn(self.n, self.a, self.curve))
        if self.n * self.curve.container_area >= math.pi:
            raise DomainError("torus does not fit the chart ball")
        if not 0 <= self.chart_slot <= self.n:
            raise DomainError("chart_slot out of range")

    @property
    def dim(self):
        return self.n

    @property
    def n_angles(self):
        return self.n - 1

    @property
    def uses_curve(self):
        return True

    def parametrize(self, angles, t):
        return darboux_chart(self.base.parametrize(angles, t), self.chart_slot)

    def affine_frame(self, angles, t):
        """Affine point and tangent frame in the chart's affine coordinates."""
        zeta = self.base.parametrize(angles, t)
        frame = self.base.tangent_frame(angles, t)
        w = chart_affine(zeta)
        cols = [
            chart_affine_differential(zeta, frame[..., :, j]) for j in range(self.dim)
        ]
        return w, np.stack(cols, axis=-1)


def chart_pullback_defect(n, samples=200, seed=0, radius=0.95):
    """Largest |omega_FS(dA u, dA v) - omega_std(u, v)| over random points of
    the open ball and random tangent pairs, A being the affine chart map."""
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(samples, n)) + 1j * rng.normal(size=(samples, n))
    rad = radius * rng.uniform(size=(samples, 1)) ** (1.0 / (2 * n))
    zeta = rad * z / np.linalg.norm(z, axis=-1, keepdims=True)
    u = rng.normal(size=(samples, n)) + 1j * rng.normal(size=(samples, n))
    v = rng.normal(size=(samples, n)) + 1j * rng.normal(size=(samples, n))
    w = chart_affine(zeta)
    lhs = fs_form(w, chart_affine_differential(zeta, u), chart_affine_differential(zeta, v))
    return float(np.max(np.abs(lhs - std_form(u, v))))


# --- grids and Lagrangian residual ------------------------------------------


def parameter_grid(spec, samples):
    """Uniform grid with ``samples`` points per torus dimension."""
    axes = [np.arange(samples) / samples] * spec.dim
    mesh = np.meshgrid(*axes, indexing="ij")
    flat = np.stack([m.ravel() for m in mesh], axis=-1)
    if spec.uses_curve:
        return flat[:, : spec.n_angles], flat[:, spec.n_angles]
    return flat, None


def lagrangian_residual(spec, samples=12):
    """Max |omega(d_i, d_j)| over tangent-frame pairs on a samples^dim grid."""
    if samples < 2:
        raise ValueError("samples >= 2")
    angles, t = parameter_grid(spec, samples)
    if isinstance(spec, ChekanovCPn):
        w, frame = spec.affine_frame(angles, t)

        def form(u, v):
            return fs_form(w, u, v)

    else:
        frame = spec.tangent_frame(angles, t)
        form = std_form
    worst = 0.0
    for i in range(spec.dim):
        for j in range(i + 1, spec.dim):
            val = np.max(np.abs(form(frame[..., :, i], frame[..., :, j])))
            worst = max(worst, float(val))
    return worst


def embedding_gap(spec, samples=12):
    """Smallest distance between images of distinct grid parameters."""
    angles, t = parameter_grid(spec, samples)
    pts = spec.parametrize(angles, t)
    real = np.concatenate([pts.real, pts.imag], axis=-1)
    dist, _ = cKDTree(real).query(real, k=2)
    return float(dist[:, 1].min())


# --- membership -------------------------------------------------------------


def brendel_params_of(spec, p):
    """Torus parameters (theta_1, theta_2, t) of points on a Brendel torus and
    the distance of each point from its reconstruction."""
    from .reduction import q_raw

    p = np.atleast_2d(np.asarray(p, dtype=complex))
    z = q_raw(p, spec.k)
    t, _ = spec.curve.locate(z)
    angles = np.stack(
        [np.angle(p[:, 0]) / (2 * math.pi), np.angle(p[:, 1]) / (2 * math.pi)], axis=-1
    )
    rebuilt = spec.parametrize(angles, t)
    return angles, t, np.linalg.norm(rebuilt - p, axis=-1)


def chekanov_params_of(spec, p):
    p = np.atleast_2d(np.asarray(p, dtype=complex))
    n = spec.n
    rho = np.abs(p[:, 0])
    z = np.prod(p, axis=-1) / rho ** (n - 1)
    t, _ = spec.curve.locate(z)
    angles = np.angle(p[:, : n - 1]) / (2 * math.pi)
    rebuilt = spec.parametrize(angles, t)
    return angles, t, np.linalg.norm(rebuilt - p, axis=-1)


def product_params_of(spec, p):
    p = np.atleast_2d(np.asarray(p, dtype=complex))
    angles = np.angle(p) / (2 * math.pi)
    rebuilt = spec.parametrize(angles)
    return angles, None, np.linalg.norm(rebuilt - p, axis=-1)


def torus_distance(spec, p):
    """Distance from each point to its nearest-parameter point of the torus."""
    if isinstance(spec, Brendel):
        return brendel_params_of(spec, p)[2]
    if isinstance(spec, ChekanovCn):
        return chekanov_params_of(spec, p)[2]
    if isinstance(spec, Product):
        return product_params_of(spec, p)[2]
    if isinstance(spec, ChekanovCPn):
        zeta = chart_inverse(p, spec.chart_slot)
        return chekanov_params_of(spec.base, zeta)[2]
    raise TypeError(spec)


# --- convenience constructors -----------------------------------------------


def brendel_torus(k, a, margin=0.05):
    """Brendel torus over a keyhole confined to B(min(a + margin, pi/k))."""
    container = min(float(a) + margin, math.pi / k)
    return Brendel(k, float(a), make_keyhole(float(a), container))


def chekanov_torus(n, a, margin=0.05):
    container = min(float(a) + margin, math.pi / n)
    return ChekanovCn(n, float(a), make_keyhole(float(a), container))


def projective_chekanov_torus(n, a, margin=0.05, chart_slot=1):
    container = min(float(a) + margin, math.pi / n)
    return ChekanovCPn(n, float(a), make_keyhole(float(a), container), chart_slot)

"""Explicit disks with boundary on the tori, and their invariants.

Area is the Liouville boundary integral, the Maslov index is the winding of
det(frame)^2 along the boundary, and intersection numbers with a hypersurface
{g = 0} are windings of g along the boundary.  Disks are evaluated on the
closed unit disk; the boundary is parametrised by s in [0, 1) through
z = exp(2 pi i s).
"""

import cmath
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable

import numpy as np

from .errors import (
    BadBasePoint,
    BoundaryTouchesDivisor,
    DegenerateFrame,
    DegenerateValue,
    DomainError,
    NotAZero,
)
from .numeric import boundary_line_integral, complex_det, winding_of
from .reduction import section_g_raw
from .tori import Brendel, ChekanovCn, torus_distance

TWO_PI_I = 2j * math.pi


class DiskFamily(Enum):
    ALPHA = "alpha"
    BETA1 = "beta1"
    BETA2 = "beta2"
    CHEKANOV_ALPHA = "chekanov_alpha"


class Direction(Enum):
    MOVE_FROM_SLOT2 = "slot2"
    MOVE_FROM_SLOT3 = "slot3"


@dataclass(frozen=True)
class DiskMap:
    """A smooth map of the closed unit disk with boundary on ``torus``.

    ``boundary_params(s)`` returns the torus parameters (angles, t) of the
    boundary point at s; the Maslov frame is the torus tangent frame there.
    """

    eval: Callable
    boundary: Callable
    dboundary: Callable
    boundary_params: Callable
    torus: object
    holomorphic: bool
    label: str
    breakpoints: tuple = ()
    meta: dict = field(default_factory=dict)

    def boundary_frame(self, s):
        angles, t = self.boundary_params(np.asarray(s, dtype=float))
        return self.torus.tangent_frame(angles, t)


def _unit(s):
    return np.exp(TWO_PI_I * np.asarray(s, dtype=float))


def _split(z):
    z = np.asarray(z, dtype=complex)
    return np.abs(z), np.angle(z) / (2 * math.pi)


def max_modulus_point(curve, samples=4096):
    t = np.arange(samples) / samples
    pts = curve(t)
    return complex(pts[int(np.argmax(np.abs(pts)))])


def _base_point(spec, w0):
    curve = spec.curve
    if w0 is None:
        w0 = max_modulus_point(curve)
    t0, dist = curve.locate(w0)
    if dist[0] > 1e-9:
        raise BadBasePoint(f"w0 = {w0} is {dist[0]:.2e} away from the curve")
    return complex(w0), float(t0[0])


def _alpha_brendel(spec):
    k, curve = spec.k, spec.curve
    c = curve.interior_point()

    def fill(zeta):
        rad, psi = _split(zeta)
        return rad * curve(psi) + (1 - rad) * c

    def lift(w):
        return section_g_raw(w, k)

    def dlift(w, dw):
        m = np.abs(w)
        rr = np.real(np.conj(w) * dw)
        return np.stack([-k * rr / np.sqrt(1 - k * m**2) + 0j, rr / m + 0j, dw], axis=-1)

    return DiskMap(
        eval=lambda zeta: lift(fill(zeta)),
        boundary=lambda s: lift(curve(s)),
        dboundary=lambda s: dlift(curve(s), curve.derivative(s)),
        boundary_params=lambda s: (np.zeros(np.shape(s) + (2,)), np.asarray(s)),
        torus=spec,
        holomorphic=False,
        label="alpha",
        breakpoints=curve.breakpoints,
        meta={"anchor": c},
    )


def _alpha_chekanov(spec):
    n, curve = spec.n, spec.curve
    c = curve.interior_point()

    def lift(w):
        m = np.abs(w)
        return np.concatenate([np.repeat(m[..., None], n - 1, axis=-1) + 0j, w[..., None]], axis=-1)

    def dlift(w, dw):
        rr = np.real(np.conj(w) * dw) / np.abs(w)
        return np.concatenate([np.repeat(rr[..., None], n - 1, axis=-1) + 0j, dw[..., None]], axis=-1)

    def fill(zeta):
        rad, psi = _split(zeta)
        return rad * curve(psi) + (1 - rad) * c

    return DiskMap(
        eval=lambda zeta: lift(fill(zeta)),
        boundary=lambda s: lift(curve(s)),
        dboundary=lambda s: dlift(curve(s), curve.derivative(s)),
        boundary_params=lambda s: (np.zeros(np.shape(s) + (n - 1,)), np.asarray(s)),
        torus=spec,
        holomorphic=False,
        label="chekanov_alpha",
        breakpoints=curve.breakpoints,
        meta={"anchor": c},
    )


def _beta1(spec, w0, t0):
    k = spec.k
    c1 = math.sqrt(1 - k * abs(w0) ** 2)
    m = abs(w0)

    def ev(z):
        z = np.asarray(z, dtype=complex)
        return np.stack([c1 * z, np.full(z.shape, m, dtype=complex), w0 * z**k], axis=-1)

    def dev(z):
        z = np.asarray(z, dtype=complex)
        return np.stack([np.full(z.shape, c1, dtype=complex), np.zeros(z.shape, complex), k * w0 * z ** (k - 1)], axis=-1)

    def params(s):
        s = np.asarray(s, dtype=float)
        return np.stack([s, np.zeros_like(s)], axis=-1), np.full(s.shape, t0)

    return DiskMap(
        eval=ev,
        boundary=lambda s: ev(_unit(s)),
        dboundary=lambda s: TWO_PI_I * _unit(s)[..., None] * dev(_unit(s)),
        boundary_params=params,
        torus=spec,
        holomorphic=True,
        label="beta1",
        meta={"w0": w0, "t0": t0, "derivative": dev},
    )


def _beta2(spec, w0, t0):
    k = spec.k
    c1 = math.sqrt(1 - k * abs(w0) ** 2)
    m = abs(w0)

    def ev(z):
        z = np.asarray(z, dtype=complex)
        return np.stack([np.full(z.shape, c1, dtype=complex), m * z, w0 * np.conj(z)], axis=-1)

    def dbd(s):
        z = _unit(s)
        return np.stack([np.zeros(z.shape, complex), TWO_PI_I * m * z, -TWO_PI_I * w0 * np.conj(z)], axis=-1)

    def params(s):
        s = np.asarray(s, dtype=float)
        return np.stack([np.zeros_like(s), s], axis=-1), np.full(s.shape, t0)

    return DiskMap(
        eval=ev,
        boundary=lambda s: ev(_unit(s)),
        dboundary=dbd,
        boundary_params=params,
        torus=spec,
        holomorphic=False,
        label="beta2",
        meta={"w0": w0, "t0": t0},
    )


def standard_disk(family, spec, w0=None):
    """Explicit representative of alpha, beta_1, beta_2 (Brendel tori) or of
    the Maslov-2 class of a Chekanov torus in C^n."""
    family = DiskFamily(family)
    if family is DiskFamily.CHEKANOV_ALPHA:
        if not isinstance(spec, ChekanovCn):
            raise DomainError("chekanov_alpha needs a ChekanovCn torus")
        return _alpha_chekanov(spec)
    if not isinstance(spec, Brendel):
        raise DomainError(f"{family.value} needs a Brendel torus")
    if family is DiskFamily.ALPHA:
        return _alpha_brendel(spec)
    w0, t0 = _base_point(spec, w0)
    return (_beta1 if family is DiskFamily.BETA1 else _beta2)(spec, w0, t0)


# --- invariants ---------------------------------------------------------------


def disk_area(u, tol=1e-10):
    """Signed standard-symplectic area of the relative class of u."""
    return boundary_line_integral(u.boundary, u.dboundary, tol=tol, breakpoints=u.breakpoints)


def maslov_index(u, n_start=512):
    def det_sq(s):
        d = complex_det(u.boundary_frame(s))
        if np.min(np.abs(d)) < 1e-8:
            raise DegenerateFrame(f"|det frame| = {np.min(np.abs(d)):.2e}")
        return d * d

    return winding_of(det_sq, n_start=n_start)


def boundary_residual(u, samples=256):
    s = np.arange(samples) / samples
    return float(np.max(torus_distance(u.torus, u.boundary(s))))


def cr_residual(u, grid=64, h=1e-5, radius=0.95):
    """Max |du/dzbar| over a cell-centred grid of the disk of given radius."""
    x = (np.arange(grid) + 0.5) / grid * 2 - 1
    X, Y = np.meshgrid(x, x, indexing="ij")
    z = (X + 1j * Y).ravel()
    z = z[np.abs(z) <= radius]
    dx = (u.eval(z + h) - u.eval(z - h)) / (2 * h)
    dy = (u.eval(z + 1j * h) - u.eval(z - 1j * h)) / (2 * h)
    return float(np.max(np.abs(0.5 * (dx + 1j * dy))))


# --- hypersurfaces ------------------------------------------------------------


@dataclass(frozen=True)
class Hypersurface:
    kind: str
    g: Callable
    k: int | None = None
    epsilon_complex: complex | None = None
    interior_point: complex | None = None


def plane13():
    """The z1-z3 plane {z2 = 0}."""
    return Hypersurface("plane13", lambda p: np.asarray(p)[..., 1])


def plane12():
    """The z1-z2 plane {z3 = 0}; its transverse perturbation near the origin is
    not modelled since boundary loops avoid {z3 = 0}."""
    return Hypersurface("plane12", lambda p: np.asarray(p)[..., 2])


def reduced_invariant(w, k):
    """F(g(w)) = z1^-k z2 z3 evaluated on the section over w."""
    w = np.asarray(w, dtype=complex)
    return np.abs(w) * w / (1 - k * np.abs(w) ** 2) ** (k / 2)


def default_sigma_point(curve, w0, degrees=13.0):
    """An interior point of the region bounded by the curve that is not a
    real multiple of w0."""
    c = curve.interior_point()
    candidates = [c * cmath.exp(1j * math.radians(degrees))]
    if w0 is not None and abs(w0) > 0:
        inner = max(0.5 * (abs(w0) - abs(c)), 1e-3 * abs(w0)) if abs(w0) > abs(c) else 0.1 * abs(c)
        candidates.append(c + 0.5 * inner * 1j * w0 / abs(w0))
    for p in candidates:
        if w0 is not None and abs((p / w0).imag) < 1e-6 * abs(p / w0):
            continue
        if curve.winding_about(p) == 1:
            return p
    raise DomainError("no admissible interior point found")


def sigma_f(spec, point=None, w0=None):
    """Sigma_F = {eps z1^k = z2 z3} with eps = F(q^{-1}(point))."""
    if w0 is None:
        w0 = max_modulus_point(spec.curve)
    if point is None:
        point = default_sigma_point(spec.curve, w0)
    k = spec.k
    eps = complex(reduced_invariant(point, k))
    return Hypersurface(
        "sigmaF",
        lambda p, eps=eps, k=k: eps * np.asarray(p)[..., 0] ** k - np.asarray(p)[..., 1] * np.asarray(p)[..., 2],
        k=k,
        epsilon_complex=eps,
        interior_point=complex(point),
    )


def min_on_torus(S, spec, samples=16):
    from .tori import parameter_grid

    angles, t = parameter_grid(spec, samples)
    return float(np.min(np.abs(S.g(spec.parametrize(angles, t)))))


def standard_hypersurfaces(spec, check=True):
    surfaces = {"plane13": plane13(), "plane12": plane12(), "sigmaF": sigma_f(spec)}
    if check:
        for name, S in surfaces.items():
            if min_on_torus(S, spec) <= 1e-6:
                raise DomainError(f"{name} meets the torus")
    return surfaces


def intersection_number(u, S, samples=4096):
    s = np.arange(samples) / samples
    vals = S.g(u.boundary(s))
    if np.min(np.abs(vals)) <= 1e-9:
        raise BoundaryTouchesDivisor(f"boundary meets {S.kind}")
    try:
        return winding_of(lambda ss: S.g(u.boundary(ss)), n_start=1024)
    except DegenerateValue as exc:
        raise BoundaryTouchesDivisor(str(exc)) from exc


# --- Blaschke transport ---------------------------------------------------------


def blaschke(w):
    """f_w(z) = ((1 - conj w)/(1 - w)) (z - w)/(1 - conj(w) z), with f_w(1) = 1."""
    w = complex(w)
    if abs(w) >= 1:
        raise DomainError("|w| < 1 required")
    c = (1 - w.conjugate()) / (1 - w)

    def f(z):
        z = np.asarray(z, dtype=complex)
        return c * (z - w) / (1 - w.conjugate() * z)

    f.zero = w
    return f


def local_winding(func, center, radius, samples=256):
    s = np.arange(samples) / samples
    return winding_of(lambda ss: func(center + radius * _unit(ss)), n_start=samples)


def _mean_on_circle(func, z, radius=1e-3, nodes=32):
    ring = radius * _unit(np.arange(nodes) / nodes)
    return np.mean(func(z[..., None] + ring), axis=-2) if False else np.mean(
        np.stack([func(z + r) for r in ring], axis=0), axis=0
    )


def blaschke_transport(u, zeros, direction):
    """Move zeros of one slot of a holomorphic disk into the other slot."""
    if not u.holomorphic:
        raise DomainError("transport needs a holomorphic disk")
    if not isinstance(u.torus, Brendel):
        raise DomainError("transport is defined for Brendel tori")
    direction = Direction(direction)
    src = 2 if direction is Direction.MOVE_FROM_SLOT3 else 1
    dst = 1 if src == 2 else 2
    zeros = [complex(w) for w in zeros]
    if not zeros:
        return u
    distinct = sorted(set(zeros), key=lambda w: (w.real, w.imag))
    for w in distinct:
        others = [abs(w - v) for v in distinct if v != w]
        rad = min([0.5 * (1 - abs(w)), 1e-2] + [0.5 * d for d in others])
        wind = local_winding(lambda z: u.eval(z)[..., src], w, rad)
        if wind < zeros.count(w):
            raise NotAZero(f"{w} is a zero of order {wind} < {zeros.count(w)}")
    factors = [blaschke(w) for w in zeros]

    def prod(z):
        out = np.ones(np.shape(z), dtype=complex)
        for f in factors:
            out = out * f(z)
        return out

    def log_deriv(z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for w in zeros:
            out = out + (1 - abs(w) ** 2) / ((z - w) * (1 - w.conjugate() * z))
        return out

    def raw(z):
        z = np.asarray(z, dtype=complex)
        vals = np.array(u.eval(z), dtype=complex)
        P = prod(z)
        vals[..., dst] = vals[..., dst] * P
        vals[..., src] = vals[..., src] / P
        return vals

    def ev(z):
        z = np.asarray(z, dtype=complex)
        out = raw(z)
        bad = np.abs(prod(z)) < 1e-8
        if np.any(bad):
            # removable singularity: mean value over a small circle
            zb = z[bad]
            ring = 1e-3 * _unit(np.arange(32) / 32)
            out[bad] = np.mean(np.stack([raw(zb + r) for r in ring]), axis=0)
        return out

    def dbd(s):
        z = _unit(s)
        vals = np.array(u.boundary(s), dtype=complex)
        d = np.array(u.dboundary(s), dtype=complex)
        P = prod(z)
        L = TWO_PI_I * z * log_deriv(z)
        d_new = d.copy()
        d_new[..., dst] = (d[..., dst] + vals[..., dst] * L) * P
        d_new[..., src] = (d[..., src] - vals[..., src] * L) / P
        return d_new

    def params(s):
        angles, t = u.boundary_params(s)
        b = ev(_unit(s))
        angles = np.array(angles, dtype=float)
        angles[..., 1] = np.angle(b[..., 1]) / (2 * math.pi)
        return angles, t

    moved = len(zeros) if direction is Direction.MOVE_FROM_SLOT3 else -len(zeros)
    meta = dict(u.meta)
    meta.update({"zeros": zeros, "direction": direction.value, "beta2_shift": moved})
    return replace(
        u,
        eval=ev,
        boundary=lambda s: ev(_unit(s)),
        dboundary=dbd,
        boundary_params=params,
        label=f"{u.label}+{moved}beta2" if moved >= 0 else f"{u.label}{moved}beta2",
        meta=meta,
    )


def disk_report(u, surfaces):
    """JSON-ready record of a disk's invariants."""
    inter = {name: intersection_number(u, S) for name, S in surfaces.items()}
    rec = {
        "label": u.label,
        "area": disk_area(u),
        "maslov": maslov_index(u),
        "intersections": inter,
        "residuals": {"boundary": boundary_residual(u)},
    }
    if u.holomorphic:
        rec["residuals"]["cauchy_riemann"] = cr_residual(u)
    k = u.torus.k
    # functionals: plane13 = r, plane12 = qk - r, sigmaF = p + qk
    r = inter["plane13"]
    q = (inter["plane12"] + r) // k
    p = inter["sigmaF"] - q * k
    rec["class_guess"] = [p, q, r]
    return rec

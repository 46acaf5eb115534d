"""Shared numerical services.

Winding numbers of sampled loops, adaptive Gauss-Legendre line integrals of
the Liouville form, batched complex determinants and central differences.
Everything here is a pure function of its inputs.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateValue, QuadratureFailure, Undersampled

DEGENERACY_FLOOR = 1e-12
MAX_JUMP = np.pi / 2
MAX_SAMPLES = 2**20
GL_ORDER = 10

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(GL_ORDER)


@dataclass(frozen=True)
class WindingTrace:
    """Result of unwrapping the argument of a sampled loop."""

    samples: np.ndarray  # (m, 2) columns: parameter t, complex value
    total_turns: float
    max_step: float

    @property
    def winding(self):
        return int(round(self.total_turns))

    @property
    def residual(self):
        return abs(self.total_turns - self.winding)


def _as_loop(values, closed_tol=1e-9):
    v = np.asarray(values, dtype=complex).ravel()
    if v.size == 0:
        raise ValueError("empty loop")
    scale = max(1.0, float(np.max(np.abs(v))))
    if v.size > 1 and abs(v[-1] - v[0]) <= closed_tol * scale:
        v = v[:-1]
    return v


def winding_trace(values, params=None, floor=DEGENERACY_FLOOR):
    """Unwrap the argument of a cyclic sample sequence.

    The closing step from the last sample back to the first is always
    included, so a duplicated endpoint is optional.
    """
    v = _as_loop(values)
    mod = np.abs(v)
    if np.any(mod < floor):
        raise DegenerateValue(f"loop modulus {mod.min():.3e} below floor {floor:g}")
    ratios = np.roll(v, -1) / v
    steps = np.angle(ratios)
    max_step = float(np.max(np.abs(steps)))
    if max_step >= MAX_JUMP:
        raise Undersampled(f"argument jump {max_step:.3f} rad >= pi/2")
    if params is None:
        params = np.arange(v.size) / v.size
    turns = float(np.sum(steps) / (2 * np.pi))
    samples = np.column_stack([np.asarray(params, dtype=complex)[: v.size], v])
    return WindingTrace(samples=samples, total_turns=turns, max_step=max_step)


def winding_number(values, floor=DEGENERACY_FLOOR):
    """Winding number about 0 of a closed sequence of nonzero complex values."""
    trace = winding_trace(values, floor=floor)
    if trace.residual >= 0.1:
        raise Undersampled(f"rounding residual {trace.residual:.3f} turns")
    return trace.winding


def winding_of(func, n_start=256, max_samples=MAX_SAMPLES, floor=DEGENERACY_FLOOR):
    """Winding number of the loop ``t -> func(t)``, t in [0, 1).

    ``func`` must accept an array of parameters.  The grid is refined
    dyadically until consecutive argument jumps drop below pi/2.
    """
    n = n_start
    while True:
        t = np.arange(n) / n
        try:
            trace = winding_trace(func(t), params=t, floor=floor)
        except Undersampled:
            if n >= max_samples:
                raise
            n *= 2
            continue
        if trace.residual >= 0.1:
            if n >= max_samples:
                raise Undersampled(f"rounding residual {trace.residual:.3f} turns")
            n *= 2
            continue
        return trace.winding


def liouville_density(u, du):
    """Pointwise value of the Liouville primitive on a velocity.

    ``lambda = 1/2 sum(x dy - y dx) = 1/2 sum Im(conj(z) dz)``; arrays of shape
    (..., n) are contracted over the last axis.
    """
    return 0.5 * np.sum(np.imag(np.conj(u) * du), axis=-1)


def adaptive_gauss_legendre(f, a, b, tol=1e-9, breakpoints=(), max_depth=48):
    """Integrate a vectorised scalar function on [a, b].

    Composite order-10 Gauss-Legendre with bisection wherever the panel
    estimate disagrees with its two halves by more than the local share of
    ``tol``.
    """
    edges = sorted({a, b, *[p for p in breakpoints if a < p < b]})
    pending = [(lo, hi, 0) for lo, hi in zip(edges[:-1], edges[1:])]
    total_len = b - a
    result = 0.0

    def panel(lo, hi):
        lo = np.asarray(lo)[:, None]
        hi = np.asarray(hi)[:, None]
        half = 0.5 * (hi - lo)
        x = 0.5 * (hi + lo) + half * _GL_NODES[None, :]
        fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
        return np.sum(fx * _GL_WEIGHTS[None, :], axis=1) * half[:, 0]

    while pending:
        lo = np.array([p[0] for p in pending])
        hi = np.array([p[1] for p in pending])
        depth = np.array([p[2] for p in pending])
        mid = 0.5 * (lo + hi)
        whole = panel(lo, hi)
        halves = panel(np.concatenate([lo, mid]), np.concatenate([mid, hi]))
        split = halves[: lo.size] + halves[lo.size:]
        err = np.abs(whole - split)
        allowed = np.maximum(tol * (hi - lo) / total_len, 1e-16)
        done = err <= allowed
        result += float(np.sum(split[done]))
        nxt = []
        for i in np.flatnonzero(~done):
            if depth[i] >= max_depth:
                raise QuadratureFailure(
                    f"tolerance {tol:g} not reached on [{lo[i]:.6g}, {hi[i]:.6g}]"
                )
            nxt.append((lo[i], mid[i], depth[i] + 1))
            nxt.append((mid[i], hi[i], depth[i] + 1))
        pending = nxt
    return result


def boundary_line_integral(u, du, tol=1e-9, breakpoints=()):
    """Integral of the Liouville primitive over a closed loop in C^n.

    ``u`` and ``du`` map an array of parameters t in [0, 1] to arrays of
    shape (len(t), n).  The result is the standard symplectic area of any
    disk filling the loop.
    """

    def integrand(t):
        return liouville_density(np.asarray(u(t)), np.asarray(du(t)))

    return adaptive_gauss_legendre(integrand, 0.0, 1.0, tol=tol, breakpoints=breakpoints)


def complex_det(columns):
    """Determinant of the matrix whose columns are the given vectors.

    ``columns`` is either a sequence of n vectors of length n, or an array of
    shape (..., n, n) already laid out with vectors as columns.
    """
    m = np.asarray(columns, dtype=complex)
    if m.ndim == 2:
        m = m.T
    return np.linalg.det(m)


def central_difference(f, x, direction, h=1e-5):
    """Directional derivative of ``f`` at ``x`` by central differences."""
    x = np.asarray(x)
    return (np.asarray(f(x + h * direction)) - np.asarray(f(x - h * direction))) / (2 * h)


def shoelace_area(points):
    """Signed area enclosed by a closed polygon given as complex vertices."""
    z = np.asarray(points, dtype=complex)
    return 0.5 * float(np.sum(np.imag(np.conj(z) * np.roll(z, -1))))

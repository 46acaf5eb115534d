"""Closed plane curves in the punctured disk.

A curve is parametrised by t in [0, 1) proportionally to arclength and is
assembled from circular arcs and straight segments joined with matching
tangents, so it is C^1 with analytic derivative on every piece.
"""

import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import Infeasible
from .numeric import shoelace_area, winding_of


@dataclass(frozen=True)
class _Arc:
    center: complex
    radius: float
    theta0: float
    theta1: float

    @property
    def length(self):
        return self.radius * abs(self.theta1 - self.theta0)

    def point(self, s):
        th = self.theta0 + s * (self.theta1 - self.theta0)
        return self.center + self.radius * np.exp(1j * th)

    def velocity(self, s):
        span = self.theta1 - self.theta0
        th = self.theta0 + s * span
        return 1j * self.radius * span * np.exp(1j * th)

    def area(self):
        c, rho = self.center, self.radius
        span = self.theta1 - self.theta0
        chord = (np.exp(1j * self.theta1) - np.exp(1j * self.theta0)) / 1j
        return 0.5 * (rho * rho * span + rho * (np.conj(c) * chord).real)


@dataclass(frozen=True)
class _Segment:
    start: complex
    end: complex

    @property
    def length(self):
        return abs(self.end - self.start)

    def point(self, s):
        return self.start + s * (self.end - self.start)

    def velocity(self, s):
        return np.full(np.shape(s), self.end - self.start, dtype=complex)

    def area(self):
        return 0.5 * (np.conj(self.start) * self.end).imag


class CurveSpec:
    """Common interface of the Circle and Keyhole curve variants."""

    variant = "curve"
    target_area: float
    container_area: float

    # subclasses provide ``_pieces``

    @cached_property
    def _table(self):
        lengths = np.array([p.length for p in self._pieces])
        total = float(lengths.sum())
        edges = np.concatenate([[0.0], np.cumsum(lengths) / total])
        edges[-1] = 1.0
        return lengths, total, edges

    @property
    def length(self):
        return self._table[1]

    @property
    def breakpoints(self):
        """Parameter values where consecutive pieces meet."""
        return tuple(float(x) for x in self._table[2][1:-1])

    def _locate_pieces(self, t):
        t = np.mod(np.asarray(t, dtype=float), 1.0)
        edges = self._table[2]
        idx = np.clip(np.searchsorted(edges, t, side="right") - 1, 0, len(self._pieces) - 1)
        s = (t - edges[idx]) / (edges[idx + 1] - edges[idx])
        return idx, s

    def __call__(self, t):
        idx, s = self._locate_pieces(t)
        out = np.empty(np.shape(s), dtype=complex)
        for i, piece in enumerate(self._pieces):
            m = idx == i
            if np.any(m):
                out[m] = piece.point(s[m])
        return out

    def derivative(self, t):
        """d(curve)/dt, t being the global parameter."""
        idx, s = self._locate_pieces(t)
        edges = self._table[2]
        out = np.empty(np.shape(s), dtype=complex)
        for i, piece in enumerate(self._pieces):
            m = idx == i
            if np.any(m):
                out[m] = piece.velocity(s[m]) / (edges[i + 1] - edges[i])
        return out

    @property
    def exact_area(self):
        """Enclosed area from Green's theorem applied piece by piece."""
        return float(sum(p.area() for p in self._pieces))

    def measured_area(self, samples=2**15):
        t = np.arange(samples) / samples
        return shoelace_area(self(t))

    def winding_about(self, z0=0.0):
        return winding_of(lambda t: self(t) - z0, n_start=4096)

    def locate(self, z, coarse=4096):
        """Nearest curve parameter to each point ``z``; returns (t, distance)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        grid = np.arange(coarse) / coarse
        pts = self(grid)
        ts = np.empty(z.shape)
        ds = np.empty(z.shape)
        for i, zi in enumerate(z.ravel()):
            j = int(np.argmin(np.abs(pts - zi)))
            res = minimize_scalar(
                lambda tt: abs(self(np.array([tt]))[0] - zi) ** 2,
                bounds=(grid[j] - 1.0 / coarse, grid[j] + 1.0 / coarse),
                method="bounded",
                options={"xatol": 1e-13},
            )
            ts.flat[i] = res.x % 1.0
            ds.flat[i] = math.sqrt(max(res.fun, 0.0))
        return ts, ds

    def svg_path(self, transform, samples=2048):
        """SVG path data through ``samples`` points mapped by ``transform``."""
        t = np.arange(samples) / samples
        pts = [transform(z) for z in self(t)]
        head = "M {:.6f} {:.6f}".format(*pts[0])
        body = " ".join("L {:.6f} {:.6f}".format(x, y) for x, y in pts[1:])
        return f"{head} {body} Z"

    def to_dict(self):
        return {
            "variant": self.variant,
            "parameters": self.parameters(),
            "target_area": self.target_area,
            "container_area": self.container_area,
            "measured_area": self.measured_area(),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass(frozen=True)
class Circle(CurveSpec):
    center: complex
    radius: float
    container_area: float = math.inf

    variant = "Circle"

    @property
    def target_area(self):
        return math.pi * self.radius**2

    @cached_property
    def _pieces(self):
        return (_Arc(complex(self.center), self.radius, 0.0, 2 * math.pi),)

    @property
    def max_modulus(self):
        return abs(self.center) + self.radius

    @property
    def min_modulus(self):
        return max(abs(self.center) - self.radius, 0.0)

    def interior_point(self):
        return complex(self.center)

    def parameters(self):
        c = complex(self.center)
        return {"center": [c.real, c.imag], "radius": self.radius}


@dataclass(frozen=True)
class Keyhole(CurveSpec):
    """Outer arc about the origin, slit along the positive real axis
    leading to a small circle that keeps the origin outside the region."""

    outer_radius: float
    inner_radius: float
    slit_half_width: float
    smoothing: float
    target_area: float
    container_area: float

    variant = "Keyhole"

    def __post_init__(self):
        R, r, w, s = self.outer_radius, self.inner_radius, self.slit_half_width, self.smoothing
        if not (0 < s and 0 < w < r and r + 2 * (s + w) < R - 2 * s):
            raise ValueError("inconsistent keyhole dimensions")

    @cached_property
    def _pieces(self):
        R, r, w, rho = self.outer_radius, self.inner_radius, self.slit_half_width, self.smoothing
        h = w + rho
        # fillet centres: tangent to the outer circle (inside) / inner circle
        # (outside) and to the slit edge y = +-w
        c_out = math.sqrt((R - rho) ** 2 - h * h)
        c_in = math.sqrt((r + rho) ** 2 - h * h)
        psi_out = math.atan2(h, c_out)
        psi_in = math.atan2(h, c_in)
        C1, C2 = complex(c_out, h), complex(c_in, h)
        C1l, C2l = C1.conjugate(), C2.conjugate()
        half_pi = math.pi / 2
        return (
            _Arc(0j, R, psi_out, 2 * math.pi - psi_out),
            _Arc(C1l, rho, -psi_out, half_pi),
            _Segment(complex(c_out, -w), complex(c_in, -w)),
            _Arc(C2l, rho, half_pi, math.pi - psi_in),
            _Arc(0j, r, -psi_in, psi_in - 2 * math.pi),
            _Arc(C2, rho, math.pi + psi_in, 3 * half_pi),
            _Segment(complex(c_in, w), complex(c_out, w)),
            _Arc(C1, rho, -half_pi, psi_out),
        )

    @property
    def max_modulus(self):
        return self.outer_radius

    @property
    def min_modulus(self):
        return self.inner_radius

    def interior_point(self):
        return complex(-0.5 * (self.outer_radius + self.inner_radius), 0.0)

    def parameters(self):
        return {
            "outer_radius": self.outer_radius,
            "inner_radius": self.inner_radius,
            "slit_half_width": self.slit_half_width,
            "smoothing": self.smoothing,
        }


SMOOTHING_RATIO = 1e-3


def _keyhole(R, target_area, container_area):
    s = SMOOTHING_RATIO * R
    return Keyhole(
        outer_radius=R,
        inner_radius=10 * s,
        slit_half_width=s,
        smoothing=s,
        target_area=target_area,
        container_area=container_area,
    )


def keyhole_area_ratio():
    """Enclosed area of the unit-outer-radius keyhole.

    The smoothing scales with the outer radius, so the area of any keyhole
    built here is this constant times the outer radius squared.
    """
    return _keyhole(1.0, 1.0, math.inf).exact_area


def max_keyhole_area(container_area):
    r_max = math.sqrt(container_area / math.pi) / (1 + 2 * SMOOTHING_RATIO)
    return keyhole_area_ratio() * r_max**2


def make_keyhole(target_area, container_area):
    """Keyhole enclosing ``target_area`` inside the open disk of area
    ``container_area`` centred at the origin."""
    if not (0 < target_area < container_area):
        raise Infeasible("need 0 < target_area < container_area")
    achievable = max_keyhole_area(container_area)
    if target_area >= achievable:
        raise Infeasible(
            f"target area {target_area:.9g} exceeds achievable maximum {achievable:.9g}"
        )
    R = math.sqrt(target_area / keyhole_area_ratio())
    curve = _keyhole(R, target_area, container_area)
    assert abs(curve.exact_area - target_area) < 1e-12
    return curve

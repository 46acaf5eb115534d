"""Deterministic SVG drawings of moment images and curves, computed from the
actual constructions.  Only fixed-precision numbers enter the files, so the
same inputs always produce the same bytes."""

import math
import re
from pathlib import Path

import numpy as np

from .curves import make_keyhole
from .dynamics import ProjectiveSwap, swap_flow
from .reduction import mu
from .tori import ChekanovCPn, brendel_torus, chekanov_torus, parameter_grid

SIZE = 400
PAD = 30


def _frame(xmax, ymax):
    """Map moment coordinates in [0, xmax] x [0, ymax] to SVG pixels."""
    sx = (SIZE - 2 * PAD) / xmax
    sy = (SIZE - 2 * PAD) / ymax

    def to_px(x, y):
        return PAD + sx * x, SIZE - PAD - sy * y

    return to_px


def _svg(body, title):
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">\n<title>{title}</title>\n'
    )
    return head + "\n".join(body) + "\n</svg>\n"


def _line(p, q, color="black", width=1.0):
    return (
        f'<line x1="{p[0]:.4f}" y1="{p[1]:.4f}" x2="{q[0]:.4f}" y2="{q[1]:.4f}" '
        f'stroke="{color}" stroke-width="{width:g}"/>'
    )


def _polyline(points, color, width=1.0):
    pts = " ".join(f"{x:.4f},{y:.4f}" for x, y in points)
    return f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="{width:g}"/>'


def _label(p, text):
    return f'<text x="{p[0]:.4f}" y="{p[1]:.4f}" font-size="12">{text}</text>'


def _axes(to_px, xmax, ymax):
    return [_line(to_px(0, 0), to_px(xmax, 0)), _line(to_px(0, 0), to_px(0, ymax))]


def _extent(values):
    return float(np.min(values)), float(np.max(values))


def brendel_segment_svg(k=2, a=None):
    """The segment l_k = mu(nu_k^{-1}(pi, 0)) drawn in the (mu_1, mu_3) plane,
    with the moment image of Upsilon_k(a) on it."""
    a = math.pi / (k + 1) if a is None else a
    spec = brendel_torus(k, a)
    angles, t = parameter_grid(spec, 24)
    m = mu(spec.parametrize(angles, t))
    s_lo, s_hi = _extent(m[:, 2])
    xmax = math.pi * 1.05
    to_px = _frame(xmax, xmax)
    ends = [(math.pi, 0.0), (0.0, math.pi / k)]
    body = _axes(to_px, xmax, xmax)
    body.append(_line(to_px(*ends[0]), to_px(*ends[1]), "gray", 1.5))
    body.append(_line(to_px(math.pi - k * s_lo, s_lo), to_px(math.pi - k * s_hi, s_hi), "red", 3))
    body.append(_label(to_px(*ends[0]), "(pi,0,0)"))
    body.append(_label(to_px(*ends[1]), f"(0,pi/{k},pi/{k})"))
    return _svg(body, f"l_{k} and Upsilon_{k}"), {"endpoints": [(math.pi, 0.0, 0.0), (0.0, math.pi / k, math.pi / k)], "image": [s_lo, s_hi]}


def chekanov_segment_svg(a=0.9):
    """Diagonal segment mu(T_Ch(a)) in the moment quadrant of C^2."""
    spec = chekanov_torus(2, a)
    angles, t = parameter_grid(spec, 48)
    m = mu(spec.parametrize(angles, t))
    s_lo, s_hi = _extent(m[:, 0])
    xmax = 1.2 * s_hi
    to_px = _frame(xmax, xmax)
    body = _axes(to_px, xmax, xmax)
    body.append(_line(to_px(s_lo, s_lo), to_px(s_hi, s_hi), "red", 3))
    return _svg(body, "Chekanov torus moment image"), {"image": [s_lo, s_hi]}


def swap_polytope_svg(a=0.9, margin=0.05, chart_slot=1):
    """CP^2 moment triangle with the projective Chekanov torus and its swap image."""
    curve = make_keyhole(a, a + margin)
    spec = ChekanovCPn(2, a, curve, chart_slot)
    angles, t = parameter_grid(spec, 48)
    w = spec.parametrize(angles, t)
    H = ProjectiveSwap(2, (chart_slot, 2 if chart_slot != 2 else 1))
    img = swap_flow(H, w, 1.0)
    chart = [s for s in range(3) if s != chart_slot]

    def coords(p):
        m = mu(p) / np.sum(np.abs(p) ** 2, axis=-1, keepdims=True)
        return m[:, chart[0]], m[:, chart[1]]

    to_px = _frame(math.pi * 1.05, math.pi * 1.05)
    body = [_polyline([to_px(0, 0), to_px(math.pi, 0), to_px(0, math.pi), to_px(0, 0)], "black")]
    info = {"vertices": [(0.0, 0.0), (math.pi, 0.0), (0.0, math.pi)]}
    for pts, color, key in ((w, "red", "torus"), (img, "blue", "image")):
        x, y = coords(pts)
        order = np.argsort(x + y, kind="stable")
        lo, hi = order[0], order[-1]
        body.append(_line(to_px(x[lo], y[lo]), to_px(x[hi], y[hi]), color, 3))
        info[key] = [(float(x[lo]), float(y[lo])), (float(x[hi]), float(y[hi]))]
    return _svg(body, "CP^2 swap displacement"), info


def keyhole_svg(a=1.0, container=1.1):
    curve = make_keyhole(a, container)
    rad = math.sqrt(container / math.pi)
    scale = (SIZE / 2 - PAD) / rad

    def transform(z):
        return SIZE / 2 + scale * z.real, SIZE / 2 - scale * z.imag

    c = f'<circle cx="{SIZE / 2:.4f}" cy="{SIZE / 2:.4f}" r="{scale * rad:.4f}" fill="none" stroke="gray"/>'
    path = f'<path d="{curve.svg_path(transform)}" fill="none" stroke="red"/>'
    origin = f'<circle cx="{SIZE / 2:.4f}" cy="{SIZE / 2:.4f}" r="2" fill="black"/>'
    return _svg([c, path, origin], "keyhole curve"), {"center_px": (SIZE / 2, SIZE / 2)}


_NUM = re.compile(r"[-+]?\d*\.?\d+(?:[eE][-+]?\d+)?")


def path_points(svg_text):
    """Vertices of the first <path> element as complex numbers (SVG y down)."""
    d = re.search(r'<path d="([^"]+)"', svg_text).group(1)
    nums = [float(x) for x in _NUM.findall(d)]
    xy = np.array(nums).reshape(-1, 2)
    return xy[:, 0] - 1j * xy[:, 1]


FIGURES = {
    "brendel_segment_k2.svg": lambda: brendel_segment_svg(2),
    "brendel_segment_k3.svg": lambda: brendel_segment_svg(3),
    "chekanov_segment.svg": chekanov_segment_svg,
    "swap_polytope.svg": swap_polytope_svg,
    "keyhole.svg": keyhole_svg,
}


def write_figures(out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = {}
    for name, make in FIGURES.items():
        text, info = make()
        (out / name).write_text(text)
        written[name] = info
    return written

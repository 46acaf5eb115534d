"""Exact arithmetic on the relative classes of Upsilon_k and closed-form
invariants of the torus families.

Classes are written p*alpha + q*beta1 + r*beta2.  Areas are either exact
rational multiples of pi (``PiQ``) or plain floats; sums and integer multiples
of ``PiQ`` values stay exact.
"""

import csv
import io
import itertools
import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import OutOfPolytope, ParameterOutOfRange

FLOAT_TOL = 1e-12


@dataclass(frozen=True, order=True)
class PiQ:
    """The real number ``coeff * pi`` with a rational coefficient."""

    coeff: Fraction

    def __post_init__(self):
        object.__setattr__(self, "coeff", Fraction(self.coeff))

    def __float__(self):
        return float(self.coeff) * math.pi

    def __add__(self, other):
        if isinstance(other, PiQ):
            return PiQ(self.coeff + other.coeff)
        if isinstance(other, int) and other == 0:
            return self
        return float(self) + float(other)

    __radd__ = __add__

    def __neg__(self):
        return PiQ(-self.coeff)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return PiQ(self.coeff * other)
        return float(self) * float(other)

    __rmul__ = __mul__

    def __str__(self):
        c = self.coeff
        if c == 0:
            return "0"
        num = "pi" if abs(c.numerator) == 1 else f"{abs(c.numerator)}pi"
        sign = "-" if c < 0 else ""
        return f"{sign}{num}" if c.denominator == 1 else f"{sign}{num}/{c.denominator}"


PI = PiQ(1)

_PI_RE = re.compile(r"^\s*([+-]?\d*)\s*\*?\s*pi\s*(?:/\s*(\d+))?\s*$")


def parse_quantity(text):
    """Parse ``"pi/3"``, ``"2pi/7"``, ``"2*pi/7"``, ``"pi"`` exactly; other
    strings as decimals."""
    if isinstance(text, (PiQ, float, int)):
        return text if not isinstance(text, int) else float(text)
    m = _PI_RE.match(str(text))
    if m:
        num = m.group(1)
        num = 1 if num in ("", "+") else (-1 if num == "-" else int(num))
        den = int(m.group(2)) if m.group(2) else 1
        return PiQ(Fraction(num, den))
    return float(text)


def sub(x, y):
    if isinstance(x, PiQ) or isinstance(y, PiQ):
        if isinstance(x, PiQ) and isinstance(y, PiQ):
            return PiQ(x.coeff - y.coeff)
        return float(x) - float(y)
    return x - y


def scale(c, x):
    return PiQ(x.coeff * c) if isinstance(x, PiQ) else c * float(x)


def compare(x, y):
    """-1, 0, 1; exact for two PiQ values, FLOAT_TOL-tolerant otherwise."""
    if isinstance(x, PiQ) and isinstance(y, PiQ):
        return (x.coeff > y.coeff) - (x.coeff < y.coeff)
    fx, fy = float(x), float(y)
    if math.isinf(fx) or math.isinf(fy):
        return (fx > fy) - (fx < fy)
    if abs(fx - fy) <= FLOAT_TOL * max(1.0, abs(fx), abs(fy)):
        return 0
    return 1 if fx > fy else -1


def qmin(values):
    best = None
    for v in values:
        if best is None or compare(v, best) < 0:
            best = v
    return best


def show(x):
    if x is None:
        return None
    f = float(x)
    if math.isinf(f):
        return "inf" if f > 0 else "-inf"
    return f


def exact_str(x):
    if x is None:
        return "not computed"
    if isinstance(x, PiQ):
        return str(x)
    f = float(x)
    return "inf" if math.isinf(f) else repr(f)


# --- relative classes ------------------------------------------------------


@dataclass(frozen=True, order=True)
class RelClass:
    p: int
    q: int
    r: int
    k: int
    a: object = None

    def __add__(self, other):
        if self.k != other.k:
            raise ValueError("classes of different Upsilon_k")
        return RelClass(self.p + other.p, self.q + other.q, self.r + other.r, self.k, self.a)

    def __mul__(self, c):
        return RelClass(c * self.p, c * self.q, c * self.r, self.k, self.a)

    __rmul__ = __mul__

    def area(self):
        if self.a is None:
            raise ValueError("class has no area parameter")
        return scale(self.p, self.a) + (self.q * PI if isinstance(self.a, PiQ) else self.q * math.pi)

    @property
    def maslov(self):
        return 2 * self.p + self.q * (2 * self.k + 2)

    @property
    def plane13(self):
        return self.r

    @property
    def plane12(self):
        return self.q * self.k - self.r

    @property
    def sigmaF(self):
        return self.p + self.q * self.k

    @property
    def intersections(self):
        return (self.plane13, self.plane12, self.sigmaF)

    def name(self):
        parts = []
        for coef, sym in ((self.q, "beta1"), (self.p, "alpha"), (self.r, "beta2")):
            if coef == 0:
                continue
            term = sym if abs(coef) == 1 else f"{abs(coef)}{sym}"
            sign = "-" if coef < 0 else "+"
            parts.append((sign, term))
        if not parts:
            return "0"
        head = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        return head + "".join(s + t for s, t in parts[1:])


def generators(k, a=None):
    return {
        "alpha": RelClass(1, 0, 0, k, a),
        "beta1": RelClass(0, 1, 0, k, a),
        "beta2": RelClass(0, 0, 1, k, a),
    }


def is_positive(c):
    return c.plane13 >= 0 and c.plane12 >= 0 and c.sigmaF >= 0


def enumerate_maslov2(k):
    """Maslov-2 classes meeting all three hypersurfaces nonnegatively.

    Maslov 2 forces p = 1 - (k+1) q, so sigmaF = 1 - q and the two plane
    functionals sum to qk; positivity leaves q in {0, 1} and 0 <= r <= qk.
    """
    if k < 2:
        raise ParameterOutOfRange("k >= 2 required")
    out = []
    for q in (0, 1):
        p = 1 - (k + 1) * q
        for r in range(0, q * k + 1):
            c = RelClass(p, q, r, k)
            if c.maslov == 2 and is_positive(c):
                out.append(c)
    return sorted(out)


def brute_force_maslov2(k, box=50):
    """Exhaustive oracle over |p|, |q|, |r| <= box."""
    out = []
    rng = range(-box, box + 1)
    for q in rng:
        for r in rng:
            # p from the Maslov condition; keep only in-box solutions
            twice = 2 - q * (2 * k + 2)
            if twice % 2:
                continue
            p = twice // 2
            if abs(p) > box:
                continue
            c = RelClass(p, q, r, k)
            if is_positive(c):
                out.append(c)
    return sorted(out)


def _check_upsilon(k, a):
    if k < 2:
        raise ParameterOutOfRange("k >= 2 required")
    lo, hi = PiQ(Fraction(1, k + 1)), PiQ(Fraction(1, k))
    if isinstance(a, PiQ):
        ok = lo.coeff <= a.coeff < hi.coeff
    else:
        ok = float(lo) - FLOAT_TOL <= float(a) < float(hi)
    if not ok:
        raise ParameterOutOfRange(f"a = {exact_str(a)} outside [pi/{k + 1}, pi/{k})")


def hbar_upsilon(k, a):
    """Minimal area pi - k a of a holomorphic disk on Upsilon_k(a)."""
    a = parse_quantity(a)
    _check_upsilon(k, a)
    return sub(PI if isinstance(a, PiQ) else math.pi, scale(k, a))


@dataclass(frozen=True)
class SearchResult:
    area: object
    minimizers: tuple
    box: int
    note: str


def min_area_search(k, a, box=12):
    """Smallest area among positive classes of Maslov index >= 2.

    Classes are reparametrised as l = p + (k+1) q, m = q, n = r with
    l in [1, box], m in [0, l], n in [0, m k]; then the area equals
    (l - m) a + m (pi - k a), a sum of nonnegative multiples of positive
    numbers, so any class outside the box has area >= a >= pi - k a.
    """
    a = parse_quantity(a)
    _check_upsilon(k, a)
    best, arg = None, []
    for l in range(1, box + 1):
        for m in range(0, l + 1):
            for n in range(0, m * k + 1):
                c = RelClass(l - (k + 1) * m, m, n, k, a)
                if c.maslov < 2 or not is_positive(c):
                    continue
                area = c.area()
                cmp = 1 if best is None else compare(best, area)
                if cmp > 0:
                    best, arg = area, [c]
                elif cmp == 0:
                    arg.append(c)
    note = f"box l <= {box}: area = (l-m) a + m (pi - k a) grows beyond the box"
    return SearchResult(best, tuple(arg), box, note)


# --- reports ----------------------------------------------------------------


@dataclass
class InvariantReport:
    family: str
    parameters: dict
    e_upper: object
    e_lower: object
    hbar: object
    monotone: bool
    spheres_min: object = math.inf
    notes: list = field(default_factory=list)
    certificates: list = field(default_factory=list)

    def consistent(self):
        up = float(self.e_upper)
        ok = compare(self.e_lower, self.e_upper) <= 0
        if self.hbar is not None and not math.isinf(up):
            ok = ok and compare(self.hbar, self.e_upper) <= 0
        return ok

    def to_dict(self):
        return {
            "family": self.family,
            "params": {key: exact_str(v) if isinstance(v, PiQ) else v for key, v in self.parameters.items()},
            "hbar": show(self.hbar) if self.hbar is not None else "not computed",
            "hbar_exact": exact_str(self.hbar),
            "e_lower": show(self.e_lower),
            "e_upper": show(self.e_upper),
            "monotone": self.monotone,
            "spheres_min": show(self.spheres_min),
            "certificates": list(self.certificates),
            "notes": list(self.notes),
        }

    CSV_FIELDS = ("family", "params", "hbar", "e_lower", "e_upper", "monotone", "certificates")

    def csv_row(self):
        d = self.to_dict()
        d["params"] = json.dumps(d["params"], sort_keys=True)
        d["certificates"] = "; ".join(d["certificates"])
        return {key: d[key] for key in self.CSV_FIELDS}


def reports_csv(reports):
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=InvariantReport.CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for rep in reports:
        writer.writerow(rep.csv_row())
    return buf.getvalue()


def invariants_product(areas):
    areas = [parse_quantity(x) for x in areas]
    if not areas or any(float(x) <= 0 for x in areas):
        raise ParameterOutOfRange("areas must be positive")
    m = qmin(areas)
    mono = all(compare(x, areas[0]) == 0 for x in areas)
    return InvariantReport(
        family="product",
        parameters={"areas": [exact_str(x) for x in areas]},
        e_upper=m,
        e_lower=m,
        hbar=m,
        monotone=mono,
        certificates=["hbar = e = min area (citation: product tori)"],
    )


def invariants_chekanov_cpn(n, a):
    a = parse_quantity(a)
    if n < 2:
        raise ParameterOutOfRange("n >= 2 required")
    top = PiQ(Fraction(1, n))
    if not (0 < float(a) and compare(a, top) < 0):
        raise ParameterOutOfRange(f"a must lie in (0, pi/{n})")
    mono_pt = PiQ(Fraction(1, n + 1))
    params = {"n": n, "a": exact_str(a)}
    if compare(a, mono_pt) < 0:
        # hbar(phi(L)) >= min{hbar(L, J0), A - n a-style cap}; the chart ball gives
        # min{a, pi - pi n/(n+1)} = min{a, pi/(n+1)} = a
        chain = qmin([a, mono_pt])
        return InvariantReport(
            family="chekanov_cpn",
            parameters=params,
            e_upper=a,
            e_lower=a,
            hbar=a,
            monotone=False,
            spheres_min=PI,
            certificates=[
                f"chain min{{a, pi/(n+1)}} = {exact_str(chain)} = a",
                "e upper: displacement inside the chart (swap or translation)",
                "e lower: Chekanov's bound (citation)",
            ],
        )
    return InvariantReport(
        family="chekanov_cpn",
        parameters=params,
        e_upper=math.inf,
        e_lower=math.inf,
        hbar=None,
        monotone=compare(a, mono_pt) == 0,
        spheres_min=PI,
        certificates=["non-displaceable (citation: nonvanishing Floer cohomology)"],
        notes=["hbar not computed for a >= pi/(n+1)"],
    )


def invariants_upsilon(k, a):
    a = parse_quantity(a)
    h = hbar_upsilon(k, a)
    mono = compare(a, PiQ(Fraction(1, k + 1))) == 0
    return InvariantReport(
        family="upsilon",
        parameters={"k": k, "a": exact_str(a)},
        e_upper=a,
        e_lower=h,
        hbar=h,
        monotone=mono,
        certificates=[
            "hbar = pi - k a (lattice min-area search)",
            "e lower: Chekanov's bound hbar <= e (citation)",
            "e upper: displacement in C^2 x B(a + eps), eps -> 0 (citation)",
        ],
        notes=[] if mono else ["exact e open; interval [pi - k a, a]"],
    )


def monotone_condition(k, a):
    """Area class proportional to Maslov class: 2c = a and 2c(k+1) = pi."""
    a = parse_quantity(a)
    c = scale(Fraction(1, 2), a)
    return compare(scale(2 * (k + 1), c), PI) == 0


def check_property_CS(areas, A, lambda_S=math.inf):
    """Both strict inequalities min + sum < A and min < lambda_S."""
    areas = [float(parse_quantity(x)) for x in areas]
    lo = min(areas)
    return lo + sum(areas) < float(parse_quantity(A)) and lo < float(lambda_S)


def invariants_property_cs(areas, A, lambda_S=math.inf):
    if not check_property_CS(areas, A, lambda_S):
        raise ParameterOutOfRange("chart condition fails")
    rep = invariants_product(areas)
    rep.family = "property_cs"
    rep.parameters.update({"A": exact_str(parse_quantity(A)), "lambda_S": show(lambda_S)})
    rep.certificates = ["chart condition holds, so hbar = e = min area (citation)"]
    return rep


# --- FOOO fibre -------------------------------------------------------------


def _fooo_values(a, x1, x2):
    ax1, ax2 = abs(x1), abs(x2)
    if ax1 > a + FLOAT_TOL or ax2 > 2 * a + FLOAT_TOL:
        raise OutOfPolytope(f"({x1}, {x2}) outside [-a, a] x [-2a, 2a]")
    hbar = min(a - ax1, a + ax1, 2 * a - ax2, 2 * a + ax2, 2 * a)
    if ax1 > 0:
        e = min(a - ax1, 2 * a - ax2)
    elif ax2 == 0:
        # the middle fibre: equator times equator
        e = math.inf
    else:
        # the equator in the small sphere cannot move; displace the second factor
        e = 2 * a - ax2
    return hbar, e


def fooo_fiber(a, x):
    a = float(parse_quantity(a))
    x1, x2 = (float(v) for v in x)
    hbar, e = _fooo_values(a, x1, x2)
    on_segment = x1 == 0 and abs(x2) <= a
    notes = []
    if x1 != 0:
        notes.append("heuristic: factor-wise displacement away from the fibre family")
    if on_segment:
        certs = ["e lower bound on the segment (citation: FOOO)"]
        if not math.isinf(e):
            certs.append(f"e upper: displace the second factor, energy 2a - |x2| = {e!r}")
    else:
        certs = ["e = hbar off the segment (citation)"]
    return InvariantReport(
        family="fooo",
        parameters={"a": a, "x": [x1, x2]},
        e_upper=e,
        e_lower=hbar if math.isinf(e) else e,
        hbar=hbar,
        monotone=False,
        spheres_min=2 * a,
        certificates=certs,
        notes=notes,
    )


@dataclass(frozen=True)
class FoooScan:
    a: float
    x1: tuple
    x2: tuple
    hbar: tuple
    e: tuple
    jumps: tuple
    discontinuities: tuple
    closure: tuple
    mismatches_off_axis: int


def _limit_estimates(E, i, j, grid):
    """One-sided limits of E at node (i, j) from each grid direction.

    A side counts only when its three nearest nodes are collinear; then the
    linear extrapolation is exact for the piecewise linear e.
    """
    out = []
    for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        pts = []
        for s in (1, 2, 3):
            ii, jj = i + s * di, j + s * dj
            if 0 <= ii < grid and 0 <= jj < grid:
                pts.append(E[ii][jj])
        if len(pts) < 3 or any(map(math.isinf, pts)):
            continue
        # use the side only where it is linear, so no kink or jump intervenes
        if abs(pts[0] - 2 * pts[1] + pts[2]) <= 1e-12 * max(1.0, abs(pts[0])):
            out.append(2 * pts[0] - pts[1])
    return out


def fooo_scan(a=1.0, grid=41, tol=1e-9):
    """e and hbar on a grid x grid lattice of the moment rectangle.

    The jump at a node is e minus the smallest one-sided limit estimate; a
    node is a discontinuity when the jump exceeds ``tol``.  The closure adds,
    at each end of a run of discontinuities along a grid line, the next node
    when the linearly extrapolated jump vanishes there.
    """
    a = float(parse_quantity(a))
    xs1 = [a * (2 * i / (grid - 1) - 1) for i in range(grid)]
    xs2 = [2 * a * (2 * j / (grid - 1) - 1) for j in range(grid)]
    if grid % 2:
        # snap the middle node to an exact zero
        mid = (grid - 1) // 2
        xs1[mid] = 0.0
        xs2[mid] = 0.0
    H = [[0.0] * grid for _ in range(grid)]
    E = [[0.0] * grid for _ in range(grid)]
    for i, j in itertools.product(range(grid), repeat=2):
        H[i][j], E[i][j] = _fooo_values(a, xs1[i], xs2[j])
    J = [[0.0] * grid for _ in range(grid)]
    bad = 0
    for i, j in itertools.product(range(grid), repeat=2):
        lims = _limit_estimates(E, i, j, grid)
        J[i][j] = E[i][j] - min(lims) if lims else 0.0
        if xs1[i] != 0 and E[i][j] != H[i][j]:
            bad += 1
    flagged = {(i, j) for i, j in itertools.product(range(grid), repeat=2) if J[i][j] > tol}
    closed = set(flagged)
    for i, j in flagged:
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nxt = (i + di, j + dj)
            prev = (i - di, j - dj)
            if nxt in flagged or not (0 <= nxt[0] < grid and 0 <= nxt[1] < grid):
                continue
            if prev not in flagged or math.isinf(J[i][j]) or math.isinf(J[prev[0]][prev[1]]):
                continue
            predicted = 2 * J[i][j] - J[prev[0]][prev[1]]
            if abs(predicted) <= tol and abs(J[nxt[0]][nxt[1]]) <= tol:
                closed.add(nxt)
    to_pts = lambda nodes: tuple(sorted((xs1[i], xs2[j]) for i, j in nodes))
    return FoooScan(
        a=a,
        x1=tuple(xs1),
        x2=tuple(xs2),
        hbar=tuple(map(tuple, H)),
        e=tuple(map(tuple, E)),
        jumps=tuple(map(tuple, J)),
        discontinuities=to_pts(flagged),
        closure=to_pts(closed),
        mismatches_off_axis=bad,
    )


# --- classification ---------------------------------------------------------


@dataclass(frozen=True)
class Classification:
    distinct: bool
    certificate: str


def classify(first, second):
    """Decide whether Upsilon_k(a) and Upsilon_k'(a') are distinguished."""
    (k, a), (k2, a2) = first, second
    a, a2 = parse_quantity(a), parse_quantity(a2)
    h1, h2 = hbar_upsilon(k, a), hbar_upsilon(k2, a2)
    if k != k2:
        return Classification(True, "k differs (citation: Brendel, Theorem A)")
    if compare(h1, h2) != 0:
        return Classification(True, f"hbar differs: {exact_str(h1)} != {exact_str(h2)}")
    return Classification(False, "same parameters")


def area_equivalent_product(k, a):
    """Product torus with the same area data as Upsilon_k(a)."""
    a = parse_quantity(a)
    return (hbar_upsilon(k, a), a, a)

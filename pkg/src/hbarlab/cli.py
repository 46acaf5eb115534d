"""Command-line front end: ``hbar-lab verify|table|displace|figures|classify``.

Exit codes: 0 when every check passes, 1 on a failed check, 2 on bad
parameters.  Artifacts written with ``--out`` are deterministic for a given
seed; the wall time appears only on stdout.
"""

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import lattice
from .curves import make_keyhole
from .disks import (
    disk_area,
    intersection_number,
    maslov_index,
    standard_disk,
    standard_hypersurfaces,
)
from .dynamics import certify_swap_displacement, certify_translation_displacement
from .errors import ChartMismatch, DoesNotFit, DomainError, HbarLabError, Infeasible
from .figures import write_figures
from .reduction import q_raw, random_level_points, section_g_raw, verify_reduced_form
from .tori import (
    Product,
    brendel_torus,
    chart_pullback_defect,
    chekanov_torus,
    darboux_chart,
    lagrangian_residual,
    projective_chekanov_torus,
)

SCHEMA = "hbar-lab/1"


@dataclass
class RunReport:
    command: str
    parameters: dict
    results: dict = field(default_factory=dict)
    checks_passed: int = 0
    checks_failed: int = 0
    wall_time: float | None = None
    artifacts: dict = field(default_factory=dict)

    def check(self, name, ok, **values):
        self.results.setdefault("checks", []).append({"name": name, "ok": bool(ok), **values})
        if ok:
            self.checks_passed += 1
        else:
            self.checks_failed += 1
        return ok

    def to_dict(self, with_time=True):
        return {
            "schema": SCHEMA,
            "command": self.command,
            "parameters": self.parameters,
            "results": self.results,
            "checks_passed": self.checks_passed,
            "checks_failed": self.checks_failed,
            "wall_time": self.wall_time if with_time else None,
        }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        f = float(x)
        return f if math.isfinite(f) else ("inf" if f > 0 else "-inf" if f < 0 else "nan")
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, lattice.PiQ):
        return str(x)
    return x


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _quantity(text):
    return lattice.parse_quantity(text) if text is not None else None


def _float(text):
    return float(lattice.parse_quantity(text))


def _k_range(text):
    lo, hi = text.split("..")
    return list(range(int(lo), int(hi) + 1))


# --- verify ------------------------------------------------------------------


def _family_spec(args):
    fam = args.family
    if fam == "product":
        return Product(tuple(_float(x) for x in args.areas.split(",")))
    if fam in ("brendel", "upsilon"):
        return brendel_torus(args.k, _float(args.a), args.margin)
    if fam == "chekanov":
        return chekanov_torus(args.n, _float(args.a), args.margin)
    if fam == "chekanov_cpn":
        return projective_chekanov_torus(args.n, _float(args.a), args.margin)
    raise DomainError(f"unknown family {fam}")


def disk_table(k, a):
    """Rows (class, area, maslov, plane13, plane12, sigmaF) numeric and lattice."""
    spec = brendel_torus(k, a)
    surfaces = standard_hypersurfaces(spec)
    gens = lattice.generators(k, a)
    rows = []
    for name in ("alpha", "beta1", "beta2"):
        u = standard_disk(name, spec)
        numeric = {
            "area": disk_area(u),
            "maslov": maslov_index(u),
            "intersections": [intersection_number(u, surfaces[s]) for s in ("plane13", "plane12", "sigmaF")],
        }
        c = gens[name]
        exact = {"area": float(c.area()), "maslov": c.maslov, "intersections": list(c.intersections)}
        match = (
            abs(numeric["area"] - exact["area"]) < 1e-6
            and numeric["maslov"] == exact["maslov"]
            and numeric["intersections"] == exact["intersections"]
        )
        rows.append({"class": name, "numeric": numeric, "lattice": exact, "match": match})
    return rows


def cmd_verify(args, rep):
    t = args.target
    if t == "lagrangian":
        spec = _family_spec(args)
        res = lagrangian_residual(spec, args.samples)
        rep.check("lagrangian_residual", res < 1e-8, value=res, tolerance=1e-8)
    elif t == "reduction":
        rng = np.random.default_rng(args.seed)
        w = np.sqrt(rng.uniform(0.02, 0.98, 1000) / args.k) * np.exp(2j * math.pi * rng.uniform(size=1000))
        qg = float(np.max(np.abs(q_raw(section_g_raw(w, args.k), args.k) - w)))
        rep.check("q_of_g_identity", qg < 1e-12, value=qg, tolerance=1e-12)
        pts = random_level_points(args.k, 1000, rng)
        err = float(np.max(np.abs(np.abs(q_raw(pts, args.k)) - np.abs(pts[:, 2]))))
        rep.check("q_modulus", err < 1e-12, value=err)
        d = verify_reduced_form(args.k, args.samples, args.seed)
        rep.check("reduced_form_defect", d < 1e-6, value=d, tolerance=1e-6)
    elif t == "chart":
        d = chart_pullback_defect(args.n, args.samples, args.seed)
        rep.check("chart_pullback_defect", d < 1e-10, value=d, tolerance=1e-10)
        rng = np.random.default_rng(args.seed)
        z = rng.normal(size=(100, args.n)) + 1j * rng.normal(size=(100, args.n))
        z *= 0.9 / np.linalg.norm(z, axis=-1, keepdims=True)
        norm = float(np.max(np.abs(np.linalg.norm(darboux_chart(z), axis=-1) - 1)))
        rep.check("unit_norm", norm < 1e-12, value=norm)
    elif t == "disks":
        a = _float(args.a)
        rows = disk_table(args.k, a)
        rep.results["table"] = rows
        for row in rows:
            rep.check(f"disk_{row['class']}", row["match"])


# --- table ---------------------------------------------------------------------


def cmd_table(args, rep):
    which = args.which
    if which == "classes":
        a = _float(args.a)
        rows = disk_table(args.k, a)
        rep.results["table"] = rows
        header = ["class", "area_numeric", "area_lattice", "maslov_numeric", "maslov_lattice"]
        header += [f"{s}_{src}" for s in ("plane13", "plane12", "sigmaF") for src in ("numeric", "lattice")]
        header += ["match", "provenance"]
        csv_rows = []
        for r in rows:
            n, l = r["numeric"], r["lattice"]
            inter = [v for pair in zip(n["intersections"], l["intersections"]) for v in pair]
            csv_rows.append(
                [r["class"], repr(n["area"]), repr(l["area"]), n["maslov"], l["maslov"], *inter, r["match"], "numeric|lattice"]
            )
            rep.check(f"row_{r['class']}", r["match"])
        rep.artifacts["classes.csv"] = _csv_text(header, csv_rows)
    elif which == "classcount":
        ks = _k_range(args.k_range)
        counts = []
        for k in ks:
            c = len(lattice.enumerate_maslov2(k))
            counts.append(c)
            rep.check(f"count_k{k}", c == k + 2 and lattice.enumerate_maslov2(k) == lattice.brute_force_maslov2(k), count=c)
        rep.results["counts"] = dict(zip(ks, counts))
        rep.artifacts["classcount.csv"] = _csv_text(["k", "count", "expected", "provenance"], [[k, c, k + 2, "lattice"] for k, c in zip(ks, counts)])
    elif which == "invariants":
        reports = _invariant_reports(args)
        for r in reports:
            rep.check(f"consistent_{r.family}", r.consistent())
        rep.results["reports"] = [r.to_dict() for r in reports]
        rep.artifacts["invariants.csv"] = lattice.reports_csv(reports)
    elif which == "fooo":
        a = _float(args.a)
        scan = lattice.fooo_scan(a, args.grid)
        closed = sorted(scan.closure)
        expected = sorted((0.0, y) for y in scan.x2 if abs(y) <= a + 1e-12)
        rep.check("off_axis_e_equals_hbar", scan.mismatches_off_axis == 0)
        rep.check("discontinuity_is_segment", closed == expected, found=len(closed), expected=len(expected))
        rep.results["jump_nodes"] = sorted(scan.discontinuities)
        rep.results["discontinuities"] = closed
        rows = [
            [f"{x1:.6f}", f"{x2:.6f}", repr(scan.hbar[i][j]), "inf" if math.isinf(scan.e[i][j]) else repr(scan.e[i][j])]
            for i, x1 in enumerate(scan.x1)
            for j, x2 in enumerate(scan.x2)
        ]
        rep.artifacts["fooo.csv"] = _csv_text(["x1", "x2", "hbar", "e"], rows)


def _invariant_reports(args):
    fam = args.family
    if fam == "upsilon":
        return [lattice.invariants_upsilon(args.k, _quantity(args.a))]
    if fam == "product":
        return [lattice.invariants_product([_quantity(x) for x in args.areas.split(",")])]
    if fam == "chekanov_cpn":
        return [lattice.invariants_chekanov_cpn(args.n, _quantity(args.a))]
    if fam == "fooo":
        x = [float(v) for v in args.x.split(",")]
        return [lattice.fooo_fiber(_quantity(args.a), x)]
    raise DomainError(f"unknown family {fam}")


# --- displace / figures / classify -------------------------------------------------


def cmd_displace(args, rep):
    a = _float(args.a)
    if args.method == "swap":
        curve = make_keyhole(a, a + args.margin)
        slots = tuple(int(s) for s in args.slots.split(",")) if args.slots else None
        try:
            cert = certify_swap_displacement(args.n, a, curve, slots=slots, samples=args.samples)
        except ChartMismatch as exc:
            rep.results["chart_mismatch"] = {"message": str(exc), "witness": exc.witness}
            rep.check("displaced", False)
            return
        rep.results["certificate"] = cert.to_dict()
        rep.check("displaced", cert.verdict, separation=cert.separation)
    else:
        spec = _family_spec(args)
        coord = args.coordinate if args.coordinate is not None else spec.dim - 1
        try:
            cert, energy = certify_translation_displacement(spec, coord, args.margin, samples=args.samples, step=args.rk_step)
        except DoesNotFit as exc:
            rep.results["does_not_fit"] = {"message": str(exc), "max_feasible_a": exc.max_feasible_a}
            rep.check("displaced", False)
            return
        rep.results["certificate"] = cert.to_dict()
        rep.check("displaced", cert.verdict, separation=cert.separation)
        rep.check("energy_above_floor", energy >= cert.details["optimal_floor"], energy=energy)


def cmd_figures(args, rep):
    out = Path(args.out or "figures")
    info = write_figures(out)
    rep.results["figures"] = sorted(info)
    rep.results["info"] = info
    rep.check("written", all((out / name).exists() for name in info))


def cmd_classify(args, rep):
    res = lattice.classify((args.k, _quantity(args.a)), (args.k2, _quantity(args.a2)))
    rep.results = {"distinct": res.distinct, "certificate": res.certificate}


def build_parser():
    glob = argparse.ArgumentParser(add_help=False)
    glob.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    glob.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="print the full JSON report")
    glob.add_argument("--out", default=argparse.SUPPRESS, help="directory for JSON/CSV/SVG artifacts")
    p = argparse.ArgumentParser(prog="hbar-lab", description="Invariants of explicit Lagrangian tori.", parents=[glob])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name):
        return sub.add_parser(name, parents=[glob])

    def common(sp):
        sp.add_argument("--family", default="upsilon")
        sp.add_argument("--k", type=int, default=2)
        sp.add_argument("--n", type=int, default=2)
        sp.add_argument("--a", default="pi/3")
        sp.add_argument("--areas", default="1,2")
        sp.add_argument("--margin", type=float, default=0.05)
        sp.add_argument("--samples", type=int, default=None)

    v = add("verify")
    v.add_argument("target", choices=["lagrangian", "reduction", "chart", "disks"])
    common(v)

    t = add("table")
    t.add_argument("which", choices=["classes", "invariants", "fooo", "classcount"])
    common(t)
    t.add_argument("--k-range", default="2..6")
    t.add_argument("--grid", type=int, default=41)
    t.add_argument("--x", default="0,0.75")

    d = add("displace")
    common(d)
    d.add_argument("--method", choices=["swap", "translate"], default="swap")
    d.add_argument("--rk-step", type=float, default=1e-3)
    d.add_argument("--coordinate", type=int, default=None)
    d.add_argument("--slots", default=None)

    add("figures")

    c = add("classify")
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--a", required=True)
    c.add_argument("--k2", type=int, required=True)
    c.add_argument("--a2", required=True)
    return p


DEFAULT_SAMPLES = {"verify": {"lagrangian": 12, "reduction": 200, "chart": 200}, "displace": 10_000}

COMMANDS = {"verify": cmd_verify, "table": cmd_table, "displace": cmd_displace, "figures": cmd_figures, "classify": cmd_classify}


def run(argv=None):
    """Parse and execute; returns (exit code, RunReport or None, args)."""
    args = build_parser().parse_args(argv)
    for name, value in (("seed", 0), ("json", False), ("out", None)):
        if not hasattr(args, name):
            setattr(args, name, value)
    if getattr(args, "samples", 0) is None:
        dflt = DEFAULT_SAMPLES.get(args.command)
        args.samples = dflt.get(args.target, 12) if isinstance(dflt, dict) else dflt
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("json", "out")}
    rep = RunReport(args.command, params)
    start = time.perf_counter()
    try:
        COMMANDS[args.command](args, rep)
    except (DomainError, Infeasible, ValueError) as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return 2, None, args
    except HbarLabError as exc:
        rep.check("computation", False, error=f"{type(exc).__name__}: {exc}")
    rep.wall_time = time.perf_counter() - start
    if args.out and args.command != "figures":
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        stem = args.command + (f"_{args.target}" if args.command == "verify" else f"_{args.which}" if args.command == "table" else "")
        text = json.dumps(_jsonable(rep.to_dict(with_time=False)), indent=2, sort_keys=True) + "\n"
        (out / f"{stem}.json").write_text(text)
        for name, content in rep.artifacts.items():
            (out / name).write_text(content)
    return (0 if rep.checks_failed == 0 else 1), rep, args


def main(argv=None):
    code, rep, args = run(argv)
    if rep is None:
        return code
    if args.json:
        print(json.dumps(_jsonable(rep.to_dict()), indent=2, sort_keys=True))
    else:
        status = "ok" if code == 0 else "FAILED"
        print(f"{rep.command}: {status} ({rep.checks_passed} passed, {rep.checks_failed} failed, {rep.wall_time:.2f} s)")
        for c in rep.results.get("checks", []):
            extra = {k: v for k, v in c.items() if k not in ("name", "ok")}
            print(f"  [{'pass' if c['ok'] else 'FAIL'}] {c['name']} {json.dumps(_jsonable(extra), sort_keys=True) if extra else ''}".rstrip())
        if not args.out:
            for name, content in rep.artifacts.items():
                print(f"--- {name}")
                print(content, end="")
        if rep.command == "classify":
            print(f"  distinct={rep.results['distinct']}: {rep.results['certificate']}")
    return code


if __name__ == "__main__":
    sys.exit(main())

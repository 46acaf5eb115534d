import csv
import io
import json
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hbarlab.errors import OutOfPolytope, ParameterOutOfRange
from hbarlab.lattice import (
    PI,
    InvariantReport,
    PiQ,
    RelClass,
    area_equivalent_product,
    brute_force_maslov2,
    check_property_CS,
    classify,
    compare,
    enumerate_maslov2,
    fooo_fiber,
    fooo_scan,
    generators,
    hbar_upsilon,
    invariants_chekanov_cpn,
    invariants_product,
    invariants_property_cs,
    invariants_upsilon,
    min_area_search,
    monotone_condition,
    parse_quantity,
    reports_csv,
)

ints = st.integers(-30, 30)


def test_pi_parsing_and_printing():
    assert parse_quantity("pi/3") == PiQ(Fraction(1, 3))
    assert parse_quantity("2pi/7") == PiQ(Fraction(2, 7))
    assert parse_quantity("2*pi/7") == PiQ(Fraction(2, 7))
    assert parse_quantity("pi") == PI
    assert parse_quantity("-pi/2") == PiQ(Fraction(-1, 2))
    assert parse_quantity("1.2") == 1.2
    assert str(PiQ(Fraction(2, 7))) == "2pi/7"
    assert str(PI - PiQ(Fraction(2, 3))) == "pi/3"


def test_generator_table():
    g = generators(3, PiQ(Fraction(1, 4)))
    assert (g["alpha"].area(), g["alpha"].maslov) == (PiQ(Fraction(1, 4)), 2)
    assert (g["beta1"].area(), g["beta1"].maslov) == (PI, 8)
    assert (g["beta2"].area(), g["beta2"].maslov) == (PiQ(0), 0)
    assert g["alpha"].intersections == (0, 0, 1)
    assert g["beta1"].intersections == (0, 3, 3)
    assert g["beta2"].intersections == (1, -1, 0)


@settings(max_examples=200)
@given(c1=st.tuples(ints, ints, ints), c2=st.tuples(ints, ints, ints), n=ints, k=st.integers(2, 8),
       num=st.integers(1, 50), den=st.integers(1, 50))
def test_functionals_linear(c1, c2, n, k, num, den):
    a = PiQ(Fraction(num, den))
    x, y = RelClass(*c1, k, a), RelClass(*c2, k, a)
    s = x + y
    for f in ("maslov", "plane13", "plane12", "sigmaF"):
        assert getattr(s, f) == getattr(x, f) + getattr(y, f)
        assert getattr(n * x, f) == n * getattr(x, f)
    assert s.area() == x.area() + y.area()
    assert (n * x).area() == n * x.area()


def test_class_names():
    assert RelClass(-2, 1, 1, 2).name() == "beta1-2alpha+beta2"
    assert RelClass(1, 0, 0, 2).name() == "alpha"
    assert RelClass(0, 0, 0, 2).name() == "0"


def test_maslov2_k2_listing():
    got = {c.name() for c in enumerate_maslov2(2)}
    assert got == {"alpha", "beta1-2alpha", "beta1-2alpha+beta2", "beta1-2alpha+2beta2"}


@pytest.mark.parametrize("k", range(2, 9))
def test_maslov2_count_matches_brute_force(k):
    got = enumerate_maslov2(k)
    assert len(got) == k + 2
    assert got == brute_force_maslov2(k, 50)
    assert got == sorted(got)


def test_maslov2_rejects_small_k():
    with pytest.raises(ParameterOutOfRange):
        enumerate_maslov2(1)


def test_hbar_examples():
    assert hbar_upsilon(2, "pi/3") == PiQ(Fraction(1, 3))
    assert hbar_upsilon(2, 1.2) == pytest.approx(math.pi - 2.4, abs=1e-12)
    with pytest.raises(ParameterOutOfRange):
        hbar_upsilon(2, 0.5)
    with pytest.raises(ParameterOutOfRange):
        hbar_upsilon(2, "pi/2")


def test_search_minimizers_above_monotone():
    res = min_area_search(2, 1.2)
    names = {c.name() for c in res.minimizers}
    assert names == {"beta1-2alpha", "beta1-2alpha+beta2", "beta1-2alpha+2beta2"}
    assert "box" in res.note


def test_hbar_matches_search_random():
    rng = random.Random(0)
    for _ in range(100):
        k = rng.randint(2, 6)
        if rng.random() < 0.5:
            # exact rational multiple of pi inside [1/(k+1), 1/k)
            den = rng.randint(1, 40)
            lo, hi = Fraction(1, k + 1), Fraction(1, k)
            c = lo + (hi - lo) * Fraction(rng.randint(0, den - 1), den)
            a = PiQ(c)
            assert min_area_search(k, a).area == hbar_upsilon(k, a)
        else:
            a = rng.uniform(math.pi / (k + 1), math.pi / k * (1 - 1e-9))
            assert abs(float(min_area_search(k, a).area) - hbar_upsilon(k, a)) < 1e-12


@pytest.mark.parametrize("k", range(2, 9))
def test_monotone_collapse(k):
    a = PiQ(Fraction(1, k + 1))
    rep = invariants_upsilon(k, a)
    assert rep.hbar == rep.e_lower == rep.e_upper == a
    assert rep.monotone
    assert monotone_condition(k, a)
    assert not monotone_condition(k, a + PiQ(Fraction(1, 1000 * k * k)))


def test_upsilon_examples():
    rep = invariants_upsilon(3, "pi/4")
    assert rep.hbar == rep.e_upper == PiQ(Fraction(1, 4))
    rep = invariants_upsilon(2, 1.3)
    assert rep.hbar == pytest.approx(math.pi - 2.6)
    assert (rep.e_lower, rep.e_upper) == (pytest.approx(math.pi - 2.6), 1.3)
    assert not rep.monotone and rep.consistent()


def test_product_examples():
    assert invariants_product([1, 2, 3]).hbar == 1
    rep = invariants_product([5])
    assert rep.hbar == rep.e_upper == rep.e_lower == 5 and rep.monotone
    assert invariants_product(["pi/3", "pi/3"]).monotone
    with pytest.raises(ParameterOutOfRange):
        invariants_product([1, 0])


@settings(max_examples=50)
@given(st.lists(st.floats(0.01, 10), min_size=1, max_size=5), st.randoms())
def test_product_permutation_invariant(areas, rnd):
    shuffled = list(areas)
    rnd.shuffle(shuffled)
    assert invariants_product(shuffled).hbar == invariants_product(areas).hbar == min(areas)


def test_product_limit_matches_upsilon():
    rng = random.Random(1)
    for _ in range(20):
        k = rng.randint(2, 6)
        a = rng.uniform(math.pi / (k + 1), math.pi / k * 0.999)
        h = hbar_upsilon(k, a)
        vals = [invariants_product([math.pi - k * a, a + t, a]).hbar for t in (1e-1, 1e-3, 1e-6, 0.0 + 1e-12)]
        assert abs(vals[-1] - h) < 1e-12
        assert all(v == pytest.approx(min(math.pi - k * a, a)) for v in vals)
    assert area_equivalent_product(2, "pi/3") == (PiQ(Fraction(1, 3)),) + (PiQ(Fraction(1, 3)),) * 2


def test_chekanov_cpn_reports():
    rep = invariants_chekanov_cpn(2, 0.9)
    assert rep.hbar == rep.e_upper == rep.e_lower == 0.9
    assert any("= a" in c for c in rep.certificates)
    mono = invariants_chekanov_cpn(2, "pi/3")
    assert math.isinf(mono.e_upper) and mono.hbar is None
    assert mono.to_dict()["hbar"] == "not computed"
    assert mono.spheres_min == PI
    with pytest.raises(ParameterOutOfRange):
        invariants_chekanov_cpn(2, "pi/2")


def test_property_cs():
    assert check_property_CS([1, 1], 4)
    assert not check_property_CS([1, 1], 3)
    assert not check_property_CS([1, 1], 4, lambda_S=1.0)
    rep = invariants_property_cs([1, 2], 5)
    assert rep.hbar == rep.e_upper == rep.e_lower == 1
    with pytest.raises(ParameterOutOfRange):
        invariants_property_cs([1, 1], 3)


def test_fooo_examples():
    rep = fooo_fiber(1, (0, 0.75))
    assert (rep.hbar, rep.e_upper) == (1, 1.25)
    assert math.isinf(fooo_fiber(1, (0, 0)).e_upper)
    rep = fooo_fiber(1, (0.3, 0))
    assert rep.hbar == rep.e_upper == pytest.approx(0.7)
    assert any("heuristic" in n for n in rep.notes)
    assert rep.spheres_min == 2
    with pytest.raises(OutOfPolytope):
        fooo_fiber(1, (1.5, 0))


def test_fooo_scan_segment():
    scan = fooo_scan(1.0, 41)
    assert scan.mismatches_off_axis == 0
    seg = sorted((0.0, y) for y in scan.x2 if abs(y) <= 1 + 1e-12)
    assert sorted(scan.closure) == seg
    # the jump itself vanishes at the two endpoints
    assert sorted(scan.discontinuities) == [p for p in seg if abs(p[1]) < 1 - 1e-9]


def test_fooo_scan_other_sizes():
    scan = fooo_scan(2.0, 21)
    assert sorted(scan.closure) == sorted((0.0, y) for y in scan.x2 if abs(y) <= 2 + 1e-12)


def test_every_report_is_consistent():
    reports = [
        invariants_product([1, 2]),
        invariants_upsilon(2, 1.2),
        invariants_upsilon(4, "pi/5"),
        invariants_chekanov_cpn(3, 0.5),
        invariants_chekanov_cpn(3, 0.7),
        invariants_property_cs([1, 1], 4),
        fooo_fiber(1, (0, 0.5)),
        fooo_fiber(1, (0, 0)),
        fooo_fiber(1, (-0.2, 1.7)),
    ]
    assert all(r.consistent() for r in reports)
    text = reports_csv(reports)
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == len(reports)
    assert set(rows[0]) == set(InvariantReport.CSV_FIELDS)
    json.dumps([r.to_dict() for r in reports])


def test_inconsistent_report_detected():
    bad = InvariantReport("x", {}, e_upper=1.0, e_lower=2.0, hbar=0.5, monotone=False)
    assert not bad.consistent()


def test_classify_examples():
    c = classify((2, 1.1), (2, 1.2))
    assert c.distinct and "hbar differs" in c.certificate
    c = classify((2, 1.1), (3, 0.9))
    assert c.distinct and "Theorem A" in c.certificate
    assert not classify((2, 1.1), (2, 1.1)).distinct


def test_classify_symmetric_and_reflexive():
    rng = random.Random(2)
    for _ in range(50):
        pairs = []
        for _ in range(2):
            k = rng.randint(2, 4)
            pairs.append((k, rng.choice([PiQ(Fraction(1, k + 1)), rng.uniform(math.pi / (k + 1), math.pi / k * 0.99)])))
        x, y = pairs
        assert classify(x, y).distinct == classify(y, x).distinct
        assert not classify(x, x).distinct


def test_compare_exactness():
    assert compare(PiQ(Fraction(1, 3)), PiQ(Fraction(1, 3))) == 0
    assert compare(PiQ(Fraction(1, 3)), PiQ(Fraction(1, 3) + Fraction(1, 10**30))) == -1
    assert compare(math.inf, 1.0) == 1

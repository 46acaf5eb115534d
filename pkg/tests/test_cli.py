import csv
import io
import json
import math

import pytest

from hbarlab.cli import main, run
from hbarlab.figures import FIGURES, brendel_segment_svg, keyhole_svg, path_points, swap_polytope_svg, write_figures
from hbarlab.numeric import winding_number


def test_verify_disks_table():
    code, rep, _ = run(["verify", "disks", "--k", "2", "--a", "pi/3"])
    assert code == 0 and rep.checks_failed == 0
    rows = {r["class"]: r for r in rep.results["table"]}
    assert rows["beta1"]["numeric"]["maslov"] == 6
    assert rows["alpha"]["numeric"]["area"] == pytest.approx(math.pi / 3, abs=1e-6)


def test_verify_reduction_and_lagrangian():
    code, rep, _ = run(["verify", "reduction", "--k", "4"])
    assert code == 0
    defect = next(c for c in rep.results["checks"] if c["name"] == "reduced_form_defect")
    assert defect["value"] < 1e-6
    code, rep, _ = run(["verify", "lagrangian", "--family", "product", "--areas", "1,2"])
    assert code == 0 and rep.results["checks"][0]["value"] < 1e-10


def test_table_classcount():
    code, rep, _ = run(["table", "classcount", "--k-range", "2..6"])
    assert code == 0
    assert list(rep.results["counts"].values()) == [4, 5, 6, 7, 8]
    rows = list(csv.DictReader(io.StringIO(rep.artifacts["classcount.csv"])))
    assert rows[0]["provenance"] == "lattice"


def test_table_invariants_upsilon():
    code, rep, _ = run(["table", "invariants", "--family", "upsilon", "--k", "2", "--a", "1.2"])
    assert code == 0
    r = rep.results["reports"][0]
    assert r["hbar"] == pytest.approx(math.pi - 2.4)
    assert (r["e_lower"], r["e_upper"]) == (pytest.approx(math.pi - 2.4), 1.2)


def test_table_fooo_segment():
    code, rep, _ = run(["table", "fooo", "--a", "1", "--grid", "41"])
    assert code == 0
    seg = rep.results["discontinuities"]
    assert all(x == 0 for x, _ in seg) and len(seg) == 21
    assert max(abs(y) for _, y in seg) == pytest.approx(1.0)


def test_table_classes_double_sourced():
    code, rep, _ = run(["table", "classes", "--k", "3", "--a", "pi/4"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(rep.artifacts["classes.csv"])))
    assert [r["class"] for r in rows] == ["alpha", "beta1", "beta2"]
    assert all(r["match"] == "True" for r in rows)
    assert rows[1]["plane12_numeric"] == rows[1]["plane12_lattice"] == "3"


def test_displace_swap_and_mismatch():
    code, rep, _ = run(["displace", "--method", "swap", "--n", "2", "--a", "0.9", "--samples", "2000"])
    assert code == 0 and rep.results["certificate"]["verdict"] is True
    code, rep, _ = run(["displace", "--method", "swap", "--n", "2", "--a", "0.9", "--slots", "0,2", "--samples", "2000"])
    assert code == 1
    assert rep.results["chart_mismatch"]["witness"]["distance_to_torus"] < 1e-9


def test_displace_translate_cpn_does_not_fit():
    code, rep, _ = run(["displace", "--method", "translate", "--family", "chekanov_cpn", "--n", "2", "--a", "0.9"])
    assert code == 1
    assert 0 < rep.results["does_not_fit"]["max_feasible_a"] < 0.9


def test_classify(capsys):
    assert main(["classify", "--k", "2", "--a", "1.1", "--k2", "2", "--a2", "1.2"]) == 0
    assert "distinct=True" in capsys.readouterr().out


def test_parameter_errors_exit_2():
    assert run(["table", "invariants", "--family", "upsilon", "--k", "2", "--a", "0.5"])[0] == 2
    assert run(["verify", "lagrangian", "--family", "nonsense"])[0] == 2


def test_global_flags_either_side(tmp_path, capsys):
    assert main(["--json", "table", "classcount", "--k-range", "2..3"]) == 0
    first = json.loads(capsys.readouterr().out)
    assert main(["table", "classcount", "--k-range", "2..3", "--json"]) == 0
    second = json.loads(capsys.readouterr().out)
    assert first["schema"] == "hbar-lab/1"
    assert first["results"] == second["results"]


def test_artifacts_written(tmp_path):
    run(["table", "classcount", "--k-range", "2..4", "--out", str(tmp_path)])
    doc = json.loads((tmp_path / "table_classcount.json").read_text())
    assert doc["wall_time"] is None
    assert (tmp_path / "classcount.csv").read_text().startswith("k,count")


# --- figures ------------------------------------------------------------------------


def test_brendel_segment_endpoints():
    _, meta = brendel_segment_svg(2)
    ends = meta["endpoints"]
    assert ends[0] == pytest.approx((math.pi, 0, 0))
    assert ends[1] == pytest.approx((0, math.pi / 2, math.pi / 2))


def test_keyhole_path_is_contractible():
    svg, meta = keyhole_svg()
    cx, cy = meta["center_px"]
    pts = path_points(svg)
    assert winding_number([p - complex(cx, cy) for p in pts]) == 0


def test_swap_polytope_vertices():
    _, meta = swap_polytope_svg()
    assert (math.pi, 0.0) in meta["vertices"]
    # the image segment is the reflection of (s, s), drawn as (s, pi - 2 s)
    torus = sorted(s for s, _ in meta["torus"])
    image = sorted(meta["image"])
    for s, (x, y) in zip(torus, image):
        assert (x, y) == (pytest.approx(s), pytest.approx(math.pi - 2 * s))


def test_figures_are_svg(tmp_path):
    info = write_figures(tmp_path)
    assert set(info) == set(FIGURES)
    for name in info:
        text = (tmp_path / name).read_text()
        assert text.startswith("<?xml") or text.startswith("<svg")
        assert 'version="1.1"' in text


SUITE = [
    ["verify", "disks", "--k", "2", "--a", "pi/3"],
    ["verify", "reduction", "--k", "2"],
    ["table", "classcount", "--k-range", "2..5"],
    ["table", "invariants", "--family", "upsilon", "--k", "2", "--a", "1.2"],
    ["table", "fooo", "--a", "1", "--grid", "21"],
    ["displace", "--method", "swap", "--n", "2", "--a", "0.9", "--samples", "1000"],
    ["figures"],
]


def run_suite(out):
    for argv in SUITE:
        run(argv + ["--seed", "0", "--out", str(out)])
    return {p.relative_to(out).as_posix(): p.read_bytes() for p in sorted(out.rglob("*")) if p.is_file()}


def test_deterministic_artifacts(tmp_path):
    first = run_suite(tmp_path / "a")
    second = run_suite(tmp_path / "b")
    assert first.keys() == second.keys() and len(first) > 10
    assert first == second

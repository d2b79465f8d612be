import json
import math
import re
import subprocess
import sys
from importlib import resources

import pytest

from quadiff.cli import dispatch
from quadiff.svg import GENERATOR, PlotSpec, count_paths, empty_svg, render_svg

DATA = resources.files("quadiff").joinpath("data")


def bench(name):
    return str(DATA.joinpath(f"{name}.json"))


def write(tmp_path, name, rec):
    p = tmp_path / name
    p.write_text(json.dumps(rec))
    return str(p)


def run(args, capsys):
    code = dispatch(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_benchmark(capsys):
    code, out, _ = run(["analyze", bench("benchmark4")], capsys)
    rec = json.loads(out)
    assert code == 0
    assert rec["polar_type"] == [2, 2, 2, 2] and rec["N"] == 6
    assert len(rec["divisor"]) == 8


def test_analyze_not_gmn(tmp_path, capsys):
    path = write(tmp_path, "sq.json", {"numerator": [0, 0, 1]})
    code, _, err = run(["analyze", path], capsys)
    assert code == 2 and "non-simple zero" in err


def test_malformed_input(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["analyze", str(bad)], capsys)[0] == 1
    assert run(["analyze", str(tmp_path / "missing.json")], capsys)[0] == 1
    path = write(tmp_path, "odd.json", {"numerator": ["x"]})
    assert run(["analyze", path], capsys)[0] == 1
    assert run(["frobnicate"], capsys)[0] == 1


def test_periods_to_file(tmp_path, capsys):
    out = tmp_path / "per.json"
    code, _, _ = run(["periods", bench("benchmark4"), "--out", str(out)], capsys)
    rec = json.loads(out.read_text())
    assert code == 0 and len(rec) == 6 and all(r["im"] > 0 for r in rec)


def test_strips_saddle_exit(tmp_path, capsys):
    path = write(tmp_path, "s.json", {"numerator": [1, 0, -1], "denominator": [1, 0, 2, 0, 1]})
    code, _, err = run(["strips", path], capsys)
    assert code == 3 and "saddle" in json.loads(err)


def test_strips_need_double_poles(tmp_path, capsys):
    path = write(tmp_path, "p.json", {"numerator": [1, 0, -1]})
    assert run(["strips", path], capsys)[0] == 2


def test_numerical_failure_exit(tmp_path, capsys):
    # a seed on a zero is an input problem; an absurd tolerance makes shooting fail
    path = write(tmp_path, "z.json", {"numerator": [0, 1]})
    assert run(["trace", path, "--seed", "0,0"], capsys)[0] == 1


def test_triangulate_and_scan(capsys):
    code, out, _ = run(["triangulate", bench("benchmark3")], capsys)
    tri = json.loads(out)
    assert code == 0 and len(tri["arcs"]) == 3 and tri["euler_characteristic"] == 2
    code, out, _ = run(["scan-saddles", bench("benchmark3"), "--grid", "8"], capsys)
    assert code == 0 and isinstance(json.loads(out), list)


def test_separatrices_and_trace(capsys):
    code, out, _ = run(["separatrices", bench("benchmark3")], capsys)
    assert code == 0 and len(json.loads(out)) == 6
    code, out, _ = run(["trace", bench("benchmark3"), "--seed", "0.3,0.2", "--phase", "0.25"],
                       capsys)
    rec = json.loads(out)
    assert code == 0 and rec["theta"] == 0.25 and rec["vertices"]


def test_glue_roundtrip(tmp_path, capsys):
    out = tmp_path / "scheme.json"
    assert run(["glue", bench("benchmark3"), "--out", str(out)], capsys)[0] == 0
    rec = json.loads(out.read_text())
    assert rec["invariants"]["genus"] == 0
    code, again, _ = run(["glue", str(out)], capsys)
    assert code == 0 and json.loads(again) == rec
    rec["periods"][0] = [1.0, -0.5]
    bad = write(tmp_path, "bad_scheme.json", rec)
    assert run(["glue", bad], capsys)[0] == 1


@pytest.mark.parametrize("cmd", ["analyze", "strips", "periods", "glue", "triangulate"])
def test_json_deterministic(cmd, capsys):
    first = run([cmd, bench("benchmark3")], capsys)
    second = run([cmd, bench("benchmark3")], capsys)
    assert first[0] == 0 and first[1] and first[1] == second[1]


def test_svg_deterministic(capsys):
    args = ["plot", bench("benchmark3"), "--density", "3"]
    a = run(args, capsys)[1]
    b = run(args, capsys)[1]
    strip = lambda s: re.sub(r"<!-- generator: .* -->", "", s)
    assert a.startswith("<?xml") and strip(a) == strip(b)
    assert f"generator: {GENERATOR}" in a


def test_empty_svg():
    svg = empty_svg(PlotSpec())
    assert '<g class="axes"' in svg and 'class="frame"' in svg
    assert count_paths(svg, "separatrix") == 0 and svg.rstrip().endswith("</svg>")


def test_bad_region_is_input_error(capsys):
    assert run(["plot", bench("benchmark3"), "--region", "1", "0", "0", "1"], capsys)[0] == 1
    with pytest.raises(ValueError):
        PlotSpec(region=(0, 0, 0, 1))


def _curves(svg, cls, spec):
    start = svg.find(f'<g class="{cls}"')
    end = svg.find("</g>", start)
    x0, x1, y0, y1 = spec.region
    out = []
    for d in re.findall(r'<path d="([^"]*)"', svg[start:end]):
        pts = [(float(a), float(b)) for a, b in re.findall(r"[ML](-?[\d.]+),(-?[\d.]+)", d)]
        out.append([complex(x0 + px / spec.width * (x1 - x0), y1 - py / spec.height * (y1 - y0))
                    for px, py in pts])
    return out


def test_zdz2_plot_separatrix_angles(tmp_path, capsys):
    path = write(tmp_path, "z.json", {"numerator": [0, 1]})
    out = tmp_path / "z.svg"
    assert run(["plot", path, "--out", str(out)], capsys)[0] == 0
    svg = out.read_text()
    curves = _curves(svg, "separatrix", PlotSpec())
    assert len(curves) == 3
    angles = sorted(math.atan2(c[-1].imag, c[-1].real) % (2 * math.pi) for c in curves)
    for a, b in zip(angles, [0, 2 * math.pi / 3, 4 * math.pi / 3]):
        assert abs(a - b) < 0.02


def test_benchmark_overlay(tmp_path, capsys):
    out = tmp_path / "b.svg"
    code = run(["plot", bench("benchmark4"), "--arcs", "--density", "2", "--out", str(out)],
               capsys)[0]
    svg = out.read_text()
    assert code == 0
    assert count_paths(svg, "arc") == 6
    assert svg.count('class="pole"') == 4 and svg.count('class="zero"') == 4
    assert count_paths(svg, "separatrix") == 12


def test_equidistant_mode(capsys):
    code, svg, _ = run(["plot", bench("benchmark3"), "--spacing", "0.3", "--density", "2"],
                       capsys)
    assert code == 0 and count_paths(svg, "generic") > 0


def test_render_markers_outside_region_skipped():
    svg = render_svg({"generic": [[0, 1 + 1j]]}, PlotSpec(), [("pole", 10 + 0j), ("zero", 0j)])
    assert svg.count('class="pole"') == 0 and svg.count('class="zero"') == 1


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "quadiff", "--version"], capture_output=True,
                         text=True)
    assert res.returncode == 0 and res.stdout.startswith("quadiff ")

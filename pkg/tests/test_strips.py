import math

import numpy as np
import pytest

from quadiff.differential import QuadraticDifferential, hat_rank
from quadiff.errors import InvalidConfiguration, SaddlePresent
from quadiff.flow import HitPole
from quadiff.geometry import polyline_intersections
from quadiff.strips import decompose, wkb_triangulation

DECS = ["dec4", "dec3", "dec_folded"]


@pytest.fixture(params=DECS)
def dec(request):
    return request.getfixturevalue(request.param)


def test_strip_counts(dec4, dec3):
    assert dec4.N == 6
    assert dec3.N == 3


def test_every_sector_in_exactly_one_strip(dec):
    used = []
    for s in dec.strips:
        used += [s.bottom_sector.key, s.top_sector.key]
    assert sorted(used) == sorted(dec.sectors)
    assert 3 * len(dec.phi.zeros) == 2 * dec.N


def test_strip_count_matches_hat_rank(dec):
    assert dec.N == hat_rank(0, dec.phi.polar_type)


def test_every_separatrix_side_used_once(dec):
    sides = [v for s in dec.strips for v in s.sides.values()]
    assert len(sides) == len(set(sides)) == 4 * dec.N
    assert set(sides) == {(z, j, lr) for (z, j) in dec.separatrices for lr in "LR"}


def test_witness_runs_pole_to_pole(dec):
    for s in dec.strips:
        w = s.generic_witness
        assert isinstance(w.terminal, HitPole) and w.terminal.pole_id == s.pole_right
        assert isinstance(w.left_terminal, HitPole) and w.left_terminal.pole_id == s.pole_left
        assert w.conservation_error() / w.metric_length <= 1e-6


def test_witness_is_interior(dec):
    # a generic leaf of the strip meets no separatrix and no other witness
    for s in dec.strips:
        pts = s.generic_witness.points
        for sep in dec.separatrices.values():
            assert not polyline_intersections(pts, sep.sample.points)
        for t in dec.strips:
            if t.id != s.id:
                assert not polyline_intersections(pts, t.generic_witness.points)


def test_heights_positive(dec):
    assert all(s.height > 0 for s in dec.strips)


def test_folded_strip_detected(dec_folded, dec4, dec3):
    assert sum(s.folded for s in dec_folded.strips) == 1
    assert not any(s.folded for s in dec4.strips + dec3.strips)


def test_triangulation_benchmark4(dec4):
    tri = wkb_triangulation(dec4)
    assert (len(tri.vertices), len(tri.arcs), len(tri.faces)) == (4, 6, 4)
    assert tri.euler_characteristic == 2
    assert all(len(f) == 3 and len(set(f)) == 3 for f in tri.faces)


def test_triangulation_benchmark3(dec3):
    tri = wkb_triangulation(dec3)
    assert (len(tri.vertices), len(tri.arcs), len(tri.faces)) == (3, 3, 2)
    assert all(len(f) == 3 for f in tri.faces)


def test_triangulation_arc_count(dec):
    tri = wkb_triangulation(dec)
    p = len(tri.vertices)
    assert len(tri.arcs) == 3 * p - 6
    assert tri.euler_characteristic == 2


def test_folded_arc_is_a_loop(dec_folded):
    tri = wkb_triangulation(dec_folded)
    folded = [s.id for s in dec_folded.strips if s.folded]
    loops = [sid for sid, a, b in tri.arcs if a == b]
    assert folded and loops
    assert len(tri.arcs) == 6


def test_saddle_present():
    # f > 0 on the real segment between the zeros makes it a horizontal saddle trajectory
    phi = QuadraticDifferential.from_coefficients((1, 0, -1), (1, 0, 2, 0, 1))
    with pytest.raises(SaddlePresent) as info:
        decompose(phi)
    assert set(info.value.event.zero_pair) == {0, 1}


def test_rejects_other_pole_orders():
    with pytest.raises(InvalidConfiguration):
        decompose(QuadraticDifferential.from_coefficients((1, 0, -1)))
    with pytest.raises(InvalidConfiguration):
        decompose(QuadraticDifferential.from_coefficients((0, 0, 1)))


def test_decomposition_is_deterministic(bench3, dec3):
    again = decompose(bench3)
    assert again.to_json() == dec3.to_json()
    for a, b in zip(again.strips, dec3.strips):
        assert np.array_equal(a.generic_witness.points, b.generic_witness.points)


def test_rotated_benchmark_has_same_count(bench4):
    # a small generic rotation changes the picture but not the strip count
    dec = decompose(bench4.scaled(complex(math.cos(0.2), math.sin(0.2))))
    assert dec.N == 6

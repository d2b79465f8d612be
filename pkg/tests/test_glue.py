import json

import pytest
from hypothesis import given, settings, strategies as st

from quadiff.errors import InvalidPeriods, InvalidScheme
from quadiff.glue import (GluingScheme, StandardStrip, build_surface, dumps, extract_scheme,
                          loads, period_error, read_periods, roundtrip_periods)
from quadiff.periods import period_vector

DECS = ["dec4", "dec3", "dec_folded"]


@pytest.fixture(params=DECS)
def dec(request):
    return request.getfixturevalue(request.param)


@pytest.fixture(scope="module")
def scheme4(dec4):
    return extract_scheme(dec4)


upper = st.builds(complex, st.floats(-10, 10), st.floats(1e-6, 10))


def test_standard_strip_period():
    s = StandardStrip(0, 2 + 1j)
    lo, hi = s.marked_points
    assert hi - lo == 2 + 1j
    with pytest.raises(InvalidPeriods):
        StandardStrip(1, 3 + 0j)


def test_benchmark4_invariants(scheme4):
    scheme, V = scheme4
    surf = build_surface(scheme, V)
    assert surf.invariants["genus"] == 0
    assert (surf.invariants["zeros"], surf.invariants["poles"], surf.invariants["N"]) == (4, 4, 6)
    assert all(len(orb) == 3 for orb in scheme.marked_orbits)


def test_benchmark3_invariants(dec3):
    scheme, V = extract_scheme(dec3)
    inv = build_surface(scheme, V).invariants
    assert (inv["genus"], inv["zeros"], inv["poles"], inv["N"]) == (0, 2, 3, 3)


def test_folded_orbit(dec_folded):
    scheme, V = extract_scheme(dec_folded)
    folded = [s.id for s in dec_folded.strips if s.folded]
    assert any({(sid, "B"), (sid, "T")} <= set(orb)
               for sid in folded for orb in scheme.marked_orbits)
    assert build_surface(scheme, V).invariants["genus"] == 0


def test_pole_cycles_match_poles(dec):
    scheme, _ = extract_scheme(dec)
    assert len(scheme.pole_cycles()) == len(dec.phi.poles)


def test_all_imaginary_unit_periods(scheme4):
    scheme, _ = scheme4
    surf = build_surface(scheme, [1j] * scheme.n_strips)
    assert surf.invariants["genus"] == 0 and read_periods(surf) == [1j] * 6


def test_real_period_rejected(scheme4):
    scheme, V = scheme4
    bad = list(V)
    bad[0] = 1 + 0j
    with pytest.raises(InvalidPeriods):
        build_surface(scheme, bad)


def test_wrong_length_rejected(scheme4):
    scheme, V = scheme4
    with pytest.raises(InvalidPeriods):
        build_surface(scheme, V[:-1])


def test_roundtrip_exact(dec):
    assert roundtrip_periods(dec) == 0.0


def test_perturbed_roundtrip(dec4, scheme4):
    V = [v + 0.01j * (k + 1) for k, v in enumerate(scheme4[1])]
    assert roundtrip_periods(dec4, V) == 0.0


def test_swapped_slots_detected(scheme4):
    scheme, V = scheme4
    swapped = list(V)
    i, j = next((i, j) for i in range(6) for j in range(i + 1, 6) if V[i] != V[j])
    swapped[i], swapped[j] = swapped[j], swapped[i]
    assert period_error(build_surface(scheme, swapped), V) > 0


def test_serialization_roundtrip(scheme4):
    scheme, V = scheme4
    text = dumps(scheme, V)
    again, W = loads(text)
    assert again == scheme and W == V
    assert dumps(again, W) == text


def test_scheme_is_canonical(scheme4):
    scheme, _ = scheme4
    rec = scheme.to_json()
    shuffled = dict(rec, ray_pairing=[[b, a] for a, b in reversed(rec["ray_pairing"])])
    assert GluingScheme.from_json(shuffled) == scheme


def test_invalid_schemes(scheme4):
    scheme, V = scheme4
    rec = scheme.to_json()
    missing = dict(rec, ray_pairing=rec["ray_pairing"][1:])
    with pytest.raises(InvalidScheme):
        build_surface(GluingScheme.from_json(missing), V)
    orbits = [list(o) for o in rec["marked_orbits"]]
    orbits[0], orbits[1] = orbits[0][:2], orbits[1] + orbits[0][2:]
    with pytest.raises(InvalidScheme):
        build_surface(GluingScheme.from_json(dict(rec, marked_orbits=orbits)), V)
    # reversing one orbit breaks the consecutive-ray condition
    orbits = [list(o) for o in rec["marked_orbits"]]
    orbits[0] = orbits[0][::-1]
    with pytest.raises(InvalidScheme):
        build_surface(GluingScheme.from_json(dict(rec, marked_orbits=orbits)), V)
    with pytest.raises(InvalidScheme):
        GluingScheme.from_json({"strips": [0]})


@settings(max_examples=50, deadline=None)
@given(st.lists(upper, min_size=6, max_size=6))
def test_build_then_read_is_identity(scheme4, V):
    scheme, _ = scheme4
    surf = build_surface(scheme, V)
    assert read_periods(surf) == [complex(v) for v in V]
    inv = surf.invariants
    assert inv["zeros"] + inv["poles"] - inv["N"] == 2 - 2 * inv["genus"]


def test_marked_point_count(dec):
    scheme, _ = extract_scheme(dec)
    Z = len(scheme.marked_orbits)
    N = scheme.n_strips
    P = len(scheme.pole_cycles())
    assert 3 * Z == 2 * N and N % 3 == 0
    assert N == 3 * P - 6 and Z == 2 * P - 4


def test_json_is_plain(scheme4, dec4):
    scheme, V = scheme4
    json.dumps(scheme.to_json())
    assert V == period_vector(dec4)

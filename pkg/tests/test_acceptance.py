"""End-to-end acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line with the measured numbers
and then asserts the criterion at its stated tolerance.
"""
import cmath
import math
import time

import numpy as np

from quadiff.differential import QuadraticDifferential, hat_rank
from quadiff.errors import InvalidPeriods
from quadiff.flow import Closed, HitPole, HitZero, primitive_along, trace
from quadiff.glue import build_surface, extract_scheme, read_periods, roundtrip_periods
from quadiff.local_models import critical_directions, model_primitive
from quadiff.periods import cover_numerology, pairing_matrix, strip_period
from quadiff.separatrix import scan_saddle_phases, separatrices
from quadiff.strips import decompose, wkb_triangulation

TWO_PI = 2 * math.pi


def report(capsys, number, name, ok, detail):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {name}: {detail}")
    assert ok, detail


def model(n, c=1.0):
    if n >= 0:
        return QuadraticDifferential.from_coefficients((0,) * n + (c,))
    return QuadraticDifferential.from_coefficients((c,), (0,) * (-n) + (1,))


def cyclic_gap(a, b):
    d = (a - b) % 1.0
    return min(d, 1.0 - d)


def test_conservation_law(capsys, bench4):
    t0 = time.perf_counter()
    suite = {f"z^{n}": model(n) for n in (-6, -5, -4, -3, -1, 0, 1, 2)}
    suite.update({"radial": model(-2, 1.0), "circular": model(-2, -1.0),
                  "spiral": model(-2, (1 + 1j) ** 2), "benchmark4": bench4})
    rng = np.random.default_rng(11)
    worst, count = 0.0, 0
    for name, phi in suite.items():
        seeds = 0.3 + 1.2 * rng.random(4)
        seeds = seeds * np.exp(1j * TWO_PI * rng.random(4))
        for seed in seeds:
            if any(abs(seed - c.point.value) < 0.05 for c in phi.critical_points
                   if not c.point.is_infinity):
                continue
            theta = float(rng.random())
            for d in (1, -1):
                s = trace(phi, complex(seed), d, theta)
                worst = max(worst, s.conservation_error() / max(s.metric_length, 1e-300))
                count += 1
    for s in separatrices(bench4, 0.0):
        worst = max(worst, s.sample.conservation_error() / s.sample.metric_length)
        count += 1
    elapsed = time.perf_counter() - t0
    ok = len(suite) >= 10 and worst <= 1e-6 and elapsed < 30
    report(capsys, 1, "conservation", ok,
           f"{len(suite)} differentials, {count} trajectories, worst drift {worst:.2e} "
           f"per unit length, {elapsed:.1f}s")


def test_local_model_oracles(capsys):
    t0 = time.perf_counter()
    phi = model(1)
    seps = separatrices(phi, 0.0)
    want = [0.0, TWO_PI / 3, 2 * TWO_PI / 3]
    dir_err = max(abs(s.launch_angle - w) for s, w in zip(sorted(seps, key=lambda s: s.ray_index),
                                                          want))
    dir_err = max(dir_err, max(abs(a - w) for a, w in zip(critical_directions(1, 1.0), want)))

    # level-zero leaves of z dz^2: the separatrices, and inward traces along each ray
    samples = [s.sample for s in seps]
    for a in want:
        for d in (1, -1):
            s = trace(phi, 0.5 * cmath.exp(1j * a), d)
            if isinstance(s.terminal, HitZero):
                samples.append(s)
    lvl = 0.0
    for s in samples:
        for z in s.points:
            if z != 0:
                lvl = max(lvl, abs(model_primitive(1, z, side=1).imag))

    radial = trace(model(-2, 1.0), 0.8 + 0.3j, 1)
    radial_back = trace(model(-2, 1.0), 0.8 + 0.3j, -1)
    arg0 = cmath.phase(0.8 + 0.3j)
    radial_ok = (isinstance(radial.terminal, HitPole) and isinstance(radial_back.terminal, HitPole)
                 and np.max(np.abs(np.angle(radial.points) - arg0)) < 1e-8)
    z0 = 0.8 + 0.3j
    circ = trace(model(-2, -1.0), z0, 1)
    circ_err = float(np.max(np.abs(np.abs(circ.points) - abs(z0))))
    circ_ok = isinstance(circ.terminal, Closed) and circ_err <= 1e-6
    b = 1 + 1j
    spiral = trace(model(-2, b * b), z0, 1)
    # along a spiral leaf Im(b log z) is constant while the argument winds
    logs = np.log(np.abs(spiral.points)) + 1j * np.unwrap(np.angle(spiral.points))
    spiral_level = float(np.max(np.abs((b * logs).imag - (b * logs[0]).imag)))
    winding = float(np.ptp(np.unwrap(np.angle(spiral.points))))
    spiral_ok = isinstance(spiral.terminal, HitPole) and spiral_level < 1e-6 and winding > 1.0
    elapsed = time.perf_counter() - t0
    ok = (dir_err <= 1e-9 and lvl <= 1e-8 and radial_ok and circ_ok and spiral_ok
          and len(samples) >= 6 and elapsed < 10)
    report(capsys, 2, "local models", ok,
           f"direction error {dir_err:.1e}, max |Im((2/3)z^(3/2))| {lvl:.1e} over "
           f"{len(samples)} leaves, radial {radial_ok}, circular drift {circ_err:.1e}, "
           f"spiral winding {winding:.1f} rad, {elapsed:.1f}s")


def _random_loop(rng, centre):
    n = int(rng.integers(12, 80))
    t = np.sort(rng.random(n)) * TWO_PI
    t = np.concatenate([t, [t[0] + TWO_PI]])
    r = 0.3 + 1.5 * rng.random(n)
    r = np.concatenate([r, [r[0]]])
    return list(centre + r * np.exp(1j * t))


def test_quadrature_oracle(capsys):
    phi = QuadraticDifferential.from_coefficients((1, 0, -1))
    W, _ = primitive_along(phi, [-1, 1], refine_endpoints=True)
    err = abs(W - math.pi / 2)
    rng = np.random.default_rng(3)
    flips = 0
    for _ in range(100):
        a = complex(*rng.normal(size=2))
        psi = QuadraticDifferential.from_coefficients((-a, 1))  # simple zero at a
        branch = int(rng.choice([1, -1]))
        _, final = primitive_along(psi, _random_loop(rng, a), initial_branch=branch)
        flips += final == -branch
    ok = err <= 1e-8 and flips == 100
    report(capsys, 3, "quadrature", ok,
           f"|W - pi/2| = {err:.1e}, sheet flipped in {flips}/100 loops")


def test_strip_count_and_triangulation(capsys, bench4, bench3):
    t0 = time.perf_counter()
    dec4 = decompose(bench4)
    tri4 = wkb_triangulation(dec4)
    t4 = time.perf_counter() - t0
    t0 = time.perf_counter()
    dec3 = decompose(bench3)
    tri3 = wkb_triangulation(dec3)
    t3 = time.perf_counter() - t0
    v4 = (dec4.N, len(tri4.vertices), len(tri4.arcs), len(tri4.faces), tri4.euler_characteristic)
    v3 = (dec3.N, len(tri3.vertices), len(tri3.arcs), len(tri3.faces))
    triangles = all(len(f) == 3 for f in tri4.faces + tri3.faces)
    ok = (v4 == (6, 4, 6, 4, 2) and dec4.N == hat_rank(0, bench4.polar_type)
          and v3 == (3, 3, 3, 2) and triangles and t4 < 60 and t3 < 60)
    report(capsys, 4, "strips and triangulation", ok,
           f"4-pole (N,V,E,F,chi) = {v4} in {t4:.1f}s; 3-pole (N,V,E,F) = {v3} in {t3:.1f}s; "
           f"all faces triangles {triangles}")


def test_rank_consistency(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    checked = mismatches = 0
    while checked < 100:
        g = int(rng.integers(0, 4))
        pt = [int(m) for m in rng.integers(1, 7, size=int(rng.integers(1, 7)))]
        zeros = 4 * g - 4 + sum(pt)
        if zeros < 0 or 6 * g - 6 + sum(pt) + len(pt) <= 0:
            continue
        checked += 1
        mismatches += cover_numerology(g, pt, pt.count(1), zeros).N != hat_rank(g, pt)
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < 1
    report(capsys, 5, "rank consistency", ok,
           f"{checked} configurations, {mismatches} mismatches, {elapsed * 1000:.0f}ms")


def test_crossing_pairing(capsys, dec4, dec3):
    m4, m3 = pairing_matrix(dec4), pairing_matrix(dec3)
    ok = np.array_equal(m4, np.eye(6, dtype=int)) and np.array_equal(m3, np.eye(3, dtype=int))
    report(capsys, 6, "crossing pairing", ok,
           f"identity 6x6 {np.array_equal(m4, np.eye(6))}, 3x3 {np.array_equal(m3, np.eye(3))}")


def test_period_map_roundtrip(capsys, dec4):
    scheme, V = extract_scheme(dec4)
    surface = build_surface(scheme, V)
    err = max(roundtrip_periods(dec4),
              max(abs(a - b) for a, b in zip(read_periods(surface), V)))
    base = surface.invariants
    keys = ("genus", "zeros", "poles")
    rng = np.random.default_rng(17)
    built = rejected = 0
    for _ in range(100):
        U = list(rng.normal(scale=3, size=6) + 1j * rng.exponential(2, size=6) + 1e-12j)
        s = build_surface(scheme, U)
        built += (read_periods(s) == U and all(s.invariants[k] == base[k] for k in keys))
        bad = list(U)
        k = int(rng.integers(0, 6))
        bad[k] = complex(bad[k].real, -abs(rng.normal()) * rng.integers(0, 2))
        try:
            build_surface(scheme, bad)
        except InvalidPeriods:
            rejected += 1
    ok = err == 0 and built == 100 and rejected == 100
    report(capsys, 7, "period map round trip", ok,
           f"round-trip error {err}, {built}/100 random H+ vectors rebuilt with "
           f"(genus, Z, P) = {tuple(base[k] for k in keys)}, {rejected}/100 invalid rejected")


def test_saddle_detection(capsys):
    f = QuadraticDifferential.from_coefficients((1, 0, -1))
    coords = [round(c.point.value.real) for c in f.zeros]
    ev = scan_saddle_phases(f, grid=24)
    pairs = {tuple(coords[i] for i in e.zero_pair) for e in ev}
    err0 = max(cyclic_gap(e.theta, 0.0) for e in ev)
    ok0 = (-1, 1) in pairs and err0 <= 1e-10
    g = QuadraticDifferential.from_coefficients((-1, 0, 1))
    ev = scan_saddle_phases(g, grid=24)
    err_half = max(cyclic_gap(e.theta, 0.5) for e in ev) if ev else math.inf
    shift = 0.0
    for beta in (0.1, 0.37, 0.5, 0.83):
        ev = scan_saddle_phases(f.scaled(cmath.exp(2j * math.pi * beta)), grid=24)
        gaps = [cyclic_gap(e.theta, beta) for e in ev] or [math.inf]
        shift = max(shift, *gaps)
    ok = ok0 and err_half <= 1e-10 and shift <= 1e-10
    report(capsys, 8, "saddle detection", ok,
           f"1-z^2: pairs {sorted(pairs)} theta error {err0:.1e}; z^2-1: theta=1/2 error "
           f"{err_half:.1e}; rotated copies max shift error {shift:.1e}")


def test_two_path_agreement(capsys, dec4):
    diffs = [abs(strip_period(dec4, s.id, "crossing").period
                 - strip_period(dec4, s.id, "alternate").period) for s in dec4.strips]
    ok = len(diffs) == 6 and max(diffs) <= 1e-8
    report(capsys, 9, "two-path periods", ok,
           f"max disagreement over {len(diffs)} strips {max(diffs):.1e}")

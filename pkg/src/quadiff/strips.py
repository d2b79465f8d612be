"""Horizontal strip decomposition and the WKB ideal triangulation.

Works at phase 0 for GMN differentials whose poles are all double and
which have no saddle trajectories. Every sector at a zero faces exactly one
horizontal strip. The strip is found by shooting the vertical leaf along
the sector bisector until it meets a horizontal separatrix; the sector on
the far side of that separatrix is the partner.

Inside a strip we fix the normal coordinate ``W`` that vanishes at the
bottom zero and has ``Im W`` increasing towards the top zero. Its boundary
separatrices are labelled by the standard-strip rays:

* bottom sector ``(a, k)``: ray ``k`` runs to the right (BR) and ray
  ``k + 1`` to the left (BL);
* top sector ``(b, k')``: ray ``k'`` runs to the left (TL) and ray
  ``k' + 1`` to the right (TR).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .differential import QuadraticDifferential, validate_gmn
from .errors import (InvalidConfiguration, PairingFailure, RingDomainSuspected,
                     SaddlePresent)
from .flow import (Closed, HitPole, HitZero, ToleranceSet, TrajectorySample,
                   trace)
from .geometry import cross, polyline_intersections
from .separatrix import (SaddleEvent, launch, near_saddle_warnings,
                         refine_connection, separatrices)

# sectors and separatrices are both keyed by (zero id, index)
Key = tuple


@dataclass(frozen=True)
class Sector:
    zero_id: int
    index: int
    right_ray: int  # separatrix at the clockwise edge
    left_ray: int  # separatrix at the counter-clockwise edge
    bisector: float

    @property
    def key(self) -> Key:
        return (self.zero_id, self.index)


@dataclass
class VerticalShot:
    """The vertical leaf along a sector bisector, up to its first separatrix crossing."""

    sector: Key
    sample: TrajectorySample
    hit_index: int  # segment of the sample containing the crossing
    hit_point: complex
    hit_separatrix: Key
    hit_side: str  # "L" or "R" of the separatrix, seen outward from its zero
    height: float  # |W| at the crossing

    @property
    def partner(self) -> Key:
        z, j = self.hit_separatrix
        return (z, j) if self.hit_side == "L" else (z, (j - 1) % 3)


@dataclass
class Strip:
    id: int
    bottom_sector: Sector
    top_sector: Sector
    sides: dict  # ray label -> (zero id, ray index, "L"/"R")
    pole_left: int
    pole_right: int
    generic_witness: TrajectorySample
    crossing_path: list  # saddle connection from bottom zero to top zero
    alt_path: list  # vertical / horizontal / vertical route, homotopic in the strip
    height: float
    saddle_theta: float
    saddle_period: complex  # from the connection refinement, Im > 0

    @property
    def folded(self) -> bool:
        return self.bottom_sector.zero_id == self.top_sector.zero_id

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "bottom_sector": list(self.bottom_sector.key),
            "top_sector": list(self.top_sector.key),
            "sides": {k: list(v) for k, v in sorted(self.sides.items())},
            "pole_left": self.pole_left,
            "pole_right": self.pole_right,
            "height": self.height,
            "folded": self.folded,
            "saddle_theta": self.saddle_theta,
        }


@dataclass
class StripDecomposition:
    phi: QuadraticDifferential
    controls: ToleranceSet
    separatrices: dict  # (zero, ray) -> Separatrix
    sectors: dict  # (zero, index) -> Sector
    strips: list
    verticals: dict  # sector key -> VerticalShot
    warnings: list = field(default_factory=list)

    @property
    def N(self) -> int:
        return len(self.strips)

    def strip_of_sector(self, key: Key) -> tuple[Strip, str]:
        for s in self.strips:
            if s.bottom_sector.key == key:
                return s, "bottom"
            if s.top_sector.key == key:
                return s, "top"
        raise KeyError(key)

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "strips": [s.to_json() for s in self.strips],
            "warnings": list(self.warnings),
        }


@dataclass
class Triangulation:
    vertices: list  # pole ids
    arcs: list  # (strip id, pole_left, pole_right)
    faces: list  # per zero: the strip ids of its three sectors, in ccw order
    coordinates: dict = field(default_factory=dict)  # pole id -> SpherePoint json

    @property
    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.arcs) + len(self.faces)

    def to_json(self) -> dict:
        return {
            "vertices": [{"pole": p, "at": self.coordinates.get(p)} for p in self.vertices],
            "arcs": [{"strip": s, "ends": [a, b]} for s, a, b in self.arcs],
            "faces": [list(f) for f in self.faces],
            "euler_characteristic": self.euler_characteristic,
        }


def _strip_controls(controls: ToleranceSet | None) -> ToleranceSet:
    # small pole basins keep the separatrices long enough to be hit by shots
    base = controls or ToleranceSet()
    return base if controls is not None else ToleranceSet(pole_basin=1e-3)


def decompose(phi: QuadraticDifferential, controls: ToleranceSet | None = None
              ) -> StripDecomposition:
    """Horizontal strip decomposition of ``phi`` at phase 0."""
    report = validate_gmn(phi)
    if not report.is_gmn:
        raise InvalidConfiguration("not a GMN differential: " + "; ".join(report.failures))
    if not report.has_only_double_poles:
        raise InvalidConfiguration("strip decomposition needs only double poles")
    tol = _strip_controls(controls).resolved(phi)
    warns = list(report.warnings)

    seps = {s.key: s for s in separatrices(phi, 0.0, tol)}
    for s in seps.values():
        t = s.terminal
        if isinstance(t, HitZero):
            raise SaddlePresent(SaddleEvent(0.0, (s.zero_id, t.zero_id), t.distance))
        if isinstance(t, Closed):
            raise RingDomainSuspected(f"separatrix {s.key} closes up")
        if not isinstance(t, HitPole):
            raise PairingFailure(f"separatrix {s.key} did not reach a pole ({t})")
    warns += near_saddle_warnings(phi, list(seps.values()), tol)

    sectors = {}
    for (z, k), s in seps.items():
        sectors[(z, k)] = Sector(z, k, k, (k + 1) % 3, s.launch_angle + math.pi / 3)

    shots = {key: _shoot(phi, sec, seps, tol) for key, sec in sorted(sectors.items())}
    pairs = {}
    for key, shot in shots.items():
        partner = shot.partner
        if partner == key or partner not in shots or shots[partner].partner != key:
            raise PairingFailure(f"sector {key} shoots into {partner}, which does not shoot back")
        pairs[key] = partner

    strips = []
    for key in sorted(pairs):
        other = pairs[key]
        if other < key:
            continue
        strips.append(_build_strip(phi, len(strips), sectors[key], sectors[other], seps,
                                   shots, tol))
    return StripDecomposition(phi, tol, seps, sectors, strips, shots, warns)


def _shoot(phi, sector: Sector, seps: dict, tol: ToleranceSet) -> VerticalShot:
    zero = phi.zeros[sector.zero_id]
    sample = launch(phi, zero, sector.bisector, 0.5, tol)
    pts = sample.points
    origin = pts[0]
    best = None
    for key, sep in sorted(seps.items()):
        q = sep.sample.points
        for i, j, si, tj in polyline_intersections(pts, q):
            x = pts[i] + si * (pts[i + 1] - pts[i])
            if key[0] == sector.zero_id and abs(x - origin) < 5 * tol.delta_launch:
                continue
            pos = (i, si)
            if best is None or pos < best[0]:
                best = (pos, key, j, x)
            break  # later crossings with this separatrix are further along
    if best is None:
        raise PairingFailure(f"vertical shot from sector {sector.key} met no separatrix "
                             f"(terminal {sample.terminal})")
    (i, si), key, j, x = best
    q = seps[key].sample.points
    tangent = q[j + 1] - q[j]
    before = pts[i]
    side = "L" if cross(tangent, before - q[j]) > 0 else "R"
    W = sample.W
    height = abs(W[i] + si * (W[i + 1] - W[i]))
    term = sample.terminal
    if isinstance(term, HitZero) and i >= len(pts) - 2:
        raise SaddlePresent(SaddleEvent(0.5, (sector.zero_id, term.zero_id), term.distance))
    return VerticalShot(sector.key, sample, i, x, key, side, height)


def _sheet(phi, z: complex, s: complex) -> int:
    p = cmath.sqrt(phi.f(z))
    return 1 if (s.real * p.real + s.imag * p.imag) >= 0 else -1


def _build_strip(phi, sid: int, bottom: Sector, top: Sector, seps: dict, shots: dict,
                 tol: ToleranceSet) -> Strip:
    a, k = bottom.key
    b, kt = top.key
    sides = {
        "BR": (a, k, "L"),
        "BL": (a, (k + 1) % 3, "R"),
        "TL": (b, kt, "L"),
        "TR": (b, (kt + 1) % 3, "R"),
    }
    pole_right = seps[(a, k)].terminal.pole_id
    pole_left = seps[(a, (k + 1) % 3)].terminal.pole_id
    if (seps[(b, (kt + 1) % 3)].terminal.pole_id != pole_right
            or seps[(b, kt)].terminal.pole_id != pole_left):
        raise PairingFailure(f"strip {bottom.key}/{top.key}: boundary poles disagree")

    up = shots[bottom.key]
    down = shots[top.key]
    h = 0.5 * (up.height + down.height)

    # witness: generic horizontal leaf at mid height, oriented left to right
    vs = up.sample
    i_mid = next(i for i, w in enumerate(vs.W) if abs(w) >= 0.5 * h)
    mid = vs.vertices[i_mid]
    w_mid = vs.W[i_mid]
    sigma = 1 if w_mid.imag > 0 else -1
    s_mid = sigma * vs.branch[i_mid] * cmath.sqrt(phi.f(mid))
    branch = _sheet(phi, mid, s_mid)
    right = trace(phi, mid, 1, 0.0, tol, branch=branch, w0=sigma * w_mid)
    left = trace(phi, mid, -1, 0.0, tol, branch=branch, w0=sigma * w_mid)
    for t, want in ((right.terminal, pole_right), (left.terminal, pole_left)):
        if not isinstance(t, HitPole):
            if isinstance(t, Closed):
                raise RingDomainSuspected(f"witness of strip {sid} closes up")
            raise PairingFailure(f"witness of strip {sid} ended with {t}")
        if t.pole_id != want:
            raise PairingFailure(f"witness of strip {sid} reached pole {t.pole_id}, "
                                 f"expected {want}")
    witness = _join(left, right)

    # alternative route: up the bottom shot, along the witness, down the top shot
    z_a = phi.zeros[a].point.value
    z_b = phi.zeros[b].point.value
    ds = down.sample
    wp = witness.points
    hits = polyline_intersections(ds.points[: down.hit_index + 2], wp)
    if not hits:
        raise PairingFailure(f"top shot of strip {sid} does not cross its witness")
    jd, jw, sd, _ = hits[0]
    x_b = ds.vertices[jd] + sd * (ds.vertices[jd + 1] - ds.vertices[jd])
    i_w0 = len(left.vertices) - 1  # index of the seed in the joined witness
    if jw >= i_w0:
        route = list(wp[i_w0: jw + 1])
    else:
        route = list(wp[jw + 1: i_w0 + 1][::-1])
    alt = ([z_a] + list(vs.vertices[: i_mid]) + route + [x_b]
           + list(ds.vertices[jd::-1]) + [z_b])

    # the saddle connection itself, at the phase of the strip period
    est = _path_period(phi, alt, tol)
    theta0 = (math.atan2(est.imag, est.real) / math.pi) % 1.0
    zero_a = phi.zeros[a]
    angle = bottom.bisector - math.pi / 3 + 2 * math.pi * theta0 / 3
    got = refine_connection(phi, zero_a, angle, theta0, phi.zeros[b], tol)
    if got is None:
        raise PairingFailure(f"no saddle connection found across strip {sid}")
    event, conn, _ = got
    crossing = [z_a] + _cut_near(conn.vertices, z_b, phi, tol) + [z_b]
    period = event.period if event.period.imag > 0 else -event.period
    return Strip(sid, bottom, top, sides, pole_left, pole_right, witness, crossing, alt, h,
                 event.theta, period)


def _path_period(phi, path, tol) -> complex:
    from .flow import primitive_along
    w, _ = primitive_along(phi, path, refine_endpoints=True, delta_path=tol.delta_zero)
    return w if w.imag > 0 else -w


def _cut_near(vertices: list, c: complex, phi, tol: ToleranceSet) -> list:
    """Drop the tail of a polyline that creeps up to the critical point ``c``."""
    others = [abs(q.point.value - c) for q in phi.critical_points
              if not q.point.is_infinity and q.point.value != c]
    r = 0.01 * min(others, default=tol.r_switch)
    out = []
    left = False
    for v in vertices:
        near = abs(v - c) < r
        if near and left:
            break
        left = left or not near
        out.append(v)
    return out


def _join(left: TrajectorySample, right: TrajectorySample) -> TrajectorySample:
    """Glue two halves traced from the same seed into one left-to-right sample."""
    out = TrajectorySample(theta=right.theta, direction=1, terminal=right.terminal)
    n = len(left.vertices)
    L = left.metric_length
    for i in range(n - 1, 0, -1):
        out.vertices.append(left.vertices[i])
        out.chart.append(left.chart[i])
        out.branch.append(left.branch[i])
        out.W.append(left.W[i])
        out.metric.append(L - left.metric[i])
    for i in range(len(right.vertices)):
        out.vertices.append(right.vertices[i])
        out.chart.append(right.chart[i])
        out.branch.append(right.branch[i])
        out.W.append(right.W[i])
        out.metric.append(L + right.metric[i])
    out.left_terminal = left.terminal
    return out


def wkb_triangulation(dec: StripDecomposition) -> Triangulation:
    """Ideal triangulation with the double poles as vertices and one arc per strip."""
    phi = dec.phi
    vertices = [p.index for p in phi.poles]
    arcs = [(s.id, s.pole_left, s.pole_right) for s in dec.strips]
    faces = []
    for zero in phi.zeros:
        faces.append(tuple(dec.strip_of_sector((zero.index, k))[0].id for k in range(3)))
    coords = {p.index: p.point.to_json() for p in phi.poles}
    tri = Triangulation(vertices, arcs, faces, coords)
    # each arc bounds two face sides; no face is a bigon
    sides = sorted(s for f in faces for s in f)
    expected = sorted(s.id for s in dec.strips for _ in range(2))
    if sides != expected or any(len(f) != 3 for f in faces):
        raise PairingFailure("strip / face incidences are inconsistent")
    return tri

"""Numerical integration of phase-theta trajectories.

A trajectory is integrated as the ODE ``du/ds = rot * |r| / r`` with
``r = sqrt(f(u))`` continued analytically along the path and ``rot`` the
unit complex number ``direction * exp(i pi theta)``; this is unit Euclidean
speed in the current chart, with ``sqrt(f) du`` always a positive multiple
of ``rot``. The sign of ``r`` is the sheet of the spectral cover the
trajectory lives on.

The primitive ``W`` is *not* read off from the ODE: each accepted step adds
the Gauss-Kronrod integral of ``sqrt(f)`` along the chord between vertices.
Since ``sqrt(f) du`` is closed, the result depends only on the vertices, so
the constancy of ``Im(exp(-i pi theta) W)`` is a genuine accuracy check on
the integrated positions.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from typing import Sequence, Union

import numpy as np

from .differential import QuadraticDifferential
from .errors import PathTooClose, SeedTooCritical, StepCollapse
from .local_models import normalized_sqrt
from .quad import Chart, integrate_from_critical, integrate_segment, sqrt_near
from .rational import SpherePoint

# Dormand-Prince 5(4)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)


@dataclass(frozen=True)
class ToleranceSet:
    """Numerical controls; ``None`` entries are filled in from the differential."""

    delta_zero: float | None = None
    delta_launch: float | None = None
    eps_saddle: float | None = None
    l_max: float | None = None
    r_switch: float | None = None
    hysteresis: float = 1.25
    pole_basin: float = 0.1
    rtol: float = 1e-9
    atol: float = 1e-14
    max_steps: int = 200_000

    def resolved(self, phi: QuadraticDifferential) -> "ToleranceSet":
        r = self.r_switch if self.r_switch is not None else phi.r_switch
        dz = self.delta_zero if self.delta_zero is not None else 1e-6 * r
        return replace(
            self,
            r_switch=r,
            delta_zero=dz,
            delta_launch=self.delta_launch if self.delta_launch is not None else 10 * dz,
            eps_saddle=self.eps_saddle if self.eps_saddle is not None else 1e-7 * r,
            l_max=self.l_max if self.l_max is not None else 100 * r,
        )


# -- terminal kinds ---------------------------------------------------------


@dataclass(frozen=True)
class HitZero:
    zero_id: int
    distance: float


@dataclass(frozen=True)
class HitPole:
    pole_id: int


@dataclass(frozen=True)
class ChartEscape:
    pass


@dataclass(frozen=True)
class LengthCapped:
    cap: float


@dataclass(frozen=True)
class Closed:
    period: complex = 0j


TerminalKind = Union[HitZero, HitPole, ChartEscape, LengthCapped, Closed]


def terminal_to_json(t: TerminalKind) -> dict:
    if isinstance(t, HitZero):
        return {"kind": "HitZero", "zero": t.zero_id, "distance": t.distance}
    if isinstance(t, HitPole):
        return {"kind": "HitPole", "pole": t.pole_id}
    if isinstance(t, LengthCapped):
        return {"kind": "LengthCapped", "cap": t.cap}
    if isinstance(t, Closed):
        return {"kind": "Closed", "period": [t.period.real, t.period.imag]}
    return {"kind": "ChartEscape"}


@dataclass
class TrajectorySample:
    theta: float
    direction: int
    vertices: list = field(default_factory=list)  # complex z values
    chart: list = field(default_factory=list)  # "z" or "w"
    branch: list = field(default_factory=list)  # +1 / -1 against principal sqrt(f)
    W: list = field(default_factory=list)
    metric: list = field(default_factory=list)  # cumulative metric length
    terminal: TerminalKind | None = None
    left_terminal: TerminalKind | None = None  # set on two-sided samples

    @property
    def metric_length(self) -> float:
        return self.metric[-1] if self.metric else 0.0

    @property
    def points(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=complex)

    def level(self) -> np.ndarray:
        """``Im(exp(-i pi theta) W)`` at every vertex."""
        return (np.exp(-1j * math.pi * self.theta) * np.asarray(self.W)).imag

    def conservation_error(self) -> float:
        lv = self.level()
        return float(np.max(np.abs(lv - lv[0]))) if len(lv) else 0.0

    def to_json(self) -> dict:
        return {
            "theta": self.theta,
            "direction": self.direction,
            "vertices": [[z.real, z.imag] for z in self.vertices],
            "W": [[w.real, w.imag] for w in self.W],
            "branch": list(self.branch),
            "metric_length": self.metric_length,
            "terminal": terminal_to_json(self.terminal),
        }


# -- charts -----------------------------------------------------------------


class _Charts:
    """z-chart and w=1/z chart of a differential, with pole basins."""

    def __init__(self, phi: QuadraticDifferential, tol: ToleranceSet):
        self.phi = phi
        self.tol = tol
        finite = [(c.point.value, c.order) for c in phi.critical_points
                  if not c.point.is_infinity]
        self.z = Chart(phi.f, finite, "z")
        wcrits = [(1 / p, n) for p, n in finite if p != 0]
        inf_order = phi.order_of(SpherePoint(None))
        if inf_order:
            wcrits.append((0j, inf_order))
        self.w = Chart(phi.w_chart, wcrits, "w")
        R = tol.r_switch
        self.zeros = []  # (id, chart name, coordinate, threshold)
        self.simple_poles = []
        self.poles = []  # (id, chart, coordinate, basin radius, order, b or None)
        for c in phi.critical_points:
            if c.point.is_infinity:
                where, u = "w", 0j
                thresh = tol.delta_zero / R ** 2
            else:
                where, u = "z", c.point.value
                thresh = tol.delta_zero
            if c.order > 0:
                self.zeros.append((c.index, where, u, thresh))
            elif c.order == -1:
                self.simple_poles.append((c.index, where, u, thresh))
            else:
                basin = self._basin(c, finite)
                b = normalized_sqrt(c.leading_coeff) if c.order == -2 else None
                if basin is not None:
                    self.poles.append((c.index, where, u, basin, c.order, b))

    def _basin(self, c, finite):
        R = self.tol.r_switch
        if c.point.is_infinity:
            ds = [abs(1 / p) for p, _ in finite if p != 0]
            if not ds:
                if not finite:
                    # no scale at all (constant f): leave infinity basin-free
                    return None
                ds = [2.0 / R]
            return self.tol.pole_basin * min(ds)
        p = c.point.value
        ds = [abs(q - p) for q, _ in finite if q != p]
        ds.append(R - abs(p))
        return self.tol.pole_basin * min(ds)

    def chart(self, name: str) -> Chart:
        return self.z if name == "z" else self.w


def _to_z(name: str, u: complex) -> complex:
    return u if name == "z" else 1 / u


def _switch(name: str, u: complex, s: complex) -> tuple[str, complex, complex]:
    # sqrt(f_w) = -sqrt(f_z) / w**2 and symmetrically
    if name == "z":
        w = 1 / u
        return "w", w, -s * u * u
    z = 1 / u
    return "z", z, -s * u * u


def _branch_sign(charts: _Charts, name: str, u: complex, s: complex) -> int:
    if name == "w":
        _, z, sz = _switch("w", u, s)
    else:
        z, sz = u, s
    p = cmath.sqrt(charts.z(z))
    return 1 if (sz.real * p.real + sz.imag * p.imag) >= 0 else -1


def _sqrt_z_to_chart(name: str, u: complex, s_z: complex) -> complex:
    if name == "z":
        return s_z
    z = 1 / u
    return -s_z * z * z


# -- trace ------------------------------------------------------------------


def trace(phi: QuadraticDifferential, seed, direction_sign: int = 1, theta: float = 0.0,
          controls: ToleranceSet | None = None, branch: int = 1, w0: complex = 0j,
          detect_closed: bool = True) -> TrajectorySample:
    """Integrate the phase-``theta`` trajectory of ``phi`` through ``seed``.

    ``branch`` picks the sheet at the seed against the principal square root
    of ``f``; ``direction_sign`` picks the orientation along the leaf.
    ``w0`` is the value assigned to the primitive at the seed.
    """
    tol = (controls or ToleranceSet()).resolved(phi)
    charts = _Charts(phi, tol)
    z0 = seed.value if isinstance(seed, SpherePoint) else complex(seed)
    if z0 is None:
        raise SeedTooCritical("cannot seed a trajectory at infinity")
    for c in phi.critical_points:
        if c.point.is_infinity:
            if abs(z0) > 0 and abs(1 / z0) <= tol.delta_zero / tol.r_switch ** 2:
                raise SeedTooCritical("seed too close to infinity")
        elif abs(z0 - c.point.value) <= tol.delta_zero:
            raise SeedTooCritical(f"seed {z0} within delta_zero of {c.label}")
    fz0 = phi.f(z0)
    if fz0 == 0 or not cmath.isfinite(fz0):
        raise SeedTooCritical(f"f vanishes or blows up at {z0}")

    R = tol.r_switch
    hyst = tol.hysteresis
    rot = direction_sign * cmath.exp(1j * math.pi * theta)
    name = "z" if abs(z0) <= hyst * R else "w"
    u = z0 if name == "z" else 1 / z0
    s = _sqrt_z_to_chart(name, u, branch * cmath.sqrt(fz0))
    chart = charts.chart(name)

    out = TrajectorySample(theta=theta, direction=direction_sign)
    W = complex(w0)
    L = 0.0
    out.vertices.append(z0)
    out.chart.append(name)
    out.branch.append(branch)
    out.W.append(W)
    out.metric.append(0.0)

    # closed-orbit detection uses a local normal coordinate around the seed
    s_seed = branch * cmath.sqrt(fz0)
    d_seed = charts.z.nearest(z0)
    left_seed = False
    prev_xi = None
    closed_tol = tol.delta_zero * abs(s_seed)

    h = None
    steps = 0
    while True:
        steps += 1
        if steps > tol.max_steps:
            out.terminal = LengthCapped(L)
            return out
        safe = chart.safe_length(u)
        hmax = 0.1 * R if name == "z" else 0.1 / R
        safe = min(safe, hmax)
        if name == "w":
            # never step across w = 0 when infinity is regular
            safe = min(safe, 0.5 * abs(u)) if abs(u) > 0 else safe
        if h is None:
            h = 0.05 * safe
        h = min(h, safe)
        hmin = 1e-13 * max(abs(u), chart.nearest(u) if chart.crits else 1.0, 1e-300)
        while True:
            if h < hmin:
                raise StepCollapse(f"step size underflow near {_to_z(name, u)}")
            res = _dopri_step(chart, u, s, rot, h)
            if res is None:
                h *= 0.25
                continue
            u_new, err = res
            scale = abs(s)
            err_m = scale * err
            allowed = tol.atol * (1 if name == "z" else 1) + tol.rtol * scale * h
            if err_m <= allowed:
                break
            h *= max(0.2, 0.9 * (allowed / err_m) ** 0.2)
        dW, s_new = integrate_segment(chart, u, u_new, s)
        u_prev = u
        u, s = u_new, s_new
        W += dW
        L += abs(dW)
        z = _to_z(name, u)
        out.vertices.append(z)
        out.chart.append(name)
        out.branch.append(_branch_sign(charts, name, u, s))
        out.W.append(W)
        out.metric.append(L)
        if err_m > 0:
            h *= min(5.0, 0.9 * (allowed / err_m) ** 0.2)
        else:
            h *= 5.0

        term = _check_terminal(charts, name, u, u_prev, s, rot)
        if term is not None:
            out.terminal = term
            return out

        if detect_closed and name == "z" and d_seed < math.inf:
            dist = abs(z - z0)
            if not left_seed:
                left_seed = dist > 0.25 * d_seed
            elif dist < 0.25 * d_seed:
                back, s_at_seed = integrate_segment(charts.z, z, z0, s)
                xi = -back
                along = (xi / rot).real
                if prev_xi is not None and prev_xi < 0 <= along:
                    same_sheet = (s_at_seed.real * s_seed.real
                                  + s_at_seed.imag * s_seed.imag) > 0
                    if same_sheet and abs((xi / rot).imag) < closed_tol:
                        out.terminal = Closed(W - xi - w0)
                        return out
                prev_xi = along
            else:
                prev_xi = None

        if L >= tol.l_max:
            out.terminal = LengthCapped(tol.l_max)
            return out

        if name == "z" and abs(u) > hyst * R:
            name, u, s = _switch(name, u, s)
            chart = charts.w
            h = None
        elif name == "w" and abs(u) > 1 / R:
            name, u, s = _switch(name, u, s)
            chart = charts.z
            h = None


def _velocity(chart: Chart, u: complex, sref: complex, rot: complex):
    fv = chart(u)
    if fv == 0 or not cmath.isfinite(fv):
        return None, sref
    r = sqrt_near(fv, sref)
    return rot * r.conjugate() / abs(r), r


def _dopri_step(chart, u, s, rot, h):
    ks = []
    for i in range(7):
        ui = u
        for a, k in zip(_A[i], ks):
            ui += h * a * k
        if i == 6:
            u_new = ui
        v, _ = _velocity(chart, ui, s, rot)
        if v is None:
            return None
        ks.append(v)
    err = abs(h * sum(e * k for e, k in zip(_E, ks)))
    return u_new, err


def _check_terminal(charts: _Charts, name, u, u_prev, s, rot):
    z = _to_z(name, u)
    for zid, where, c, thresh in charts.zeros:
        if where == "z":
            if name == "z" or abs(z) < 1e150:
                d = abs(z - c)
                if d < thresh:
                    return HitZero(zid, d)
        else:
            w = u if name == "w" else (1 / z if z != 0 else math.inf)
            if abs(w) < thresh:
                return HitZero(zid, abs(w))
    for pid, where, c, thresh in charts.simple_poles:
        if where == "z":
            cur = z
        else:
            cur = u if name == "w" else (1 / z if z != 0 else math.inf)
        if abs(cur - c) < thresh:
            return HitPole(pid)
    for pid, where, c, basin, order, b in charts.poles:
        if where == "z":
            if name == "w" and abs(u) < 1e-150:
                continue
            loc = z - c
            prev = _to_z(name, u_prev) - c
            s_loc = s if name == "z" else _switch("w", u, s)[2]
        else:
            if name == "z":
                if z == 0:
                    continue
                loc = 1 / z
                prev = 1 / u_prev if u_prev != 0 else math.inf
                s_loc = _switch("z", u, s)[2]
            else:
                loc, prev, s_loc = u, u_prev, s
        if abs(loc) >= basin:
            continue
        if order == -2:
            sigma = 1 if (s_loc * loc / b).real >= 0 else -1
            rate = (rot / (sigma * b)).real
            if rate < -1e-9:
                return HitPole(pid)
        elif abs(loc) < abs(prev):
            return HitPole(pid)
    return None


# -- primitive along a path -------------------------------------------------


def primitive_along(phi: QuadraticDifferential, path: Sequence[complex], initial_branch: int = 1,
                    refine_endpoints: bool = False, delta_path: float | None = None
                    ) -> tuple[complex, int]:
    """``int sqrt(f) dz`` along a polyline, continuing the chosen branch.

    The branch is fixed at the first vertex (at the midpoint of the first
    segment when that vertex is critical), where ``initial_branch=+1``
    means the principal square root. With
    ``refine_endpoints`` an endpoint lying on (or within ``delta_path`` of)
    a critical point of order >= -1 is snapped to it and the adjacent
    segment integrated with a singularity-removing substitution.

    Returns the integral and the sheet at the end, measured at the final
    vertex (at the last regular vertex when the final one is critical).
    """
    pts = [complex(p) for p in path]
    if len(pts) < 2:
        return 0j, initial_branch
    if delta_path is None:
        delta_path = 1e-6 * phi.r_switch
    finite = [(c.point.value, c.order) for c in phi.critical_points if not c.point.is_infinity]
    chart = Chart(phi.f, finite, "z")

    def snap(p):
        for c, n in finite:
            if abs(p - c) <= delta_path and n >= -1:
                return c, n
        return None

    start = snap(pts[0]) if refine_endpoints else None
    end = snap(pts[-1]) if refine_endpoints else None
    if start:
        pts[0] = start[0]
    if end:
        pts[-1] = end[0]

    for i in range(len(pts) - 1):
        a, b = pts[i], pts[i + 1]
        for c, n in finite:
            if start and i == 0 and c == start[0]:
                continue
            if end and i == len(pts) - 2 and c == end[0]:
                continue
            if _segment_distance(a, b, c) <= delta_path:
                raise PathTooClose(f"segment {a}->{b} passes within {delta_path} of {c}")

    total = 0j
    if start:
        # anchor the branch at the midpoint of the first segment
        anchor = 0.5 * (pts[0] + pts[1])
        s = initial_branch * cmath.sqrt(phi.f(anchor))
        total += _critical_leg(chart, start, anchor, s)
        rest = [anchor] + pts[1:]
    else:
        s = initial_branch * cmath.sqrt(phi.f(pts[0]))
        rest = pts
    for i in range(len(rest) - 1):
        a, b = rest[i], rest[i + 1]
        if end and i == len(rest) - 2:
            total += _critical_leg_to(chart, end, a, s)
            return total, _sheet_sign(s, phi.f(a))
        v, s = integrate_segment(chart, a, b, s)
        total += v
    return total, _sheet_sign(s, phi.f(rest[-1]))


def _sheet_sign(s: complex, fval: complex) -> int:
    p = cmath.sqrt(fval)
    return 1 if (s.real * p.real + s.imag * p.imag) >= 0 else -1


def _critical_leg(chart: Chart, crit, b: complex, s_b: complex) -> complex:
    """Integral from critical point ``crit`` to regular point ``b`` (branch ``s_b`` at b)."""
    c, n = crit
    dist = abs(b - c)
    radius = min(dist, 0.5 * chart.safe_length(c, exclude=c))
    if radius >= dist:
        return integrate_from_critical(chart, c, n, b, s_b)
    # regular part from b back to the safe disc, then the singular leg
    mid = c + (b - c) * (radius / dist)
    v, s_mid = integrate_segment(chart, b, mid, s_b)
    return integrate_from_critical(chart, c, n, mid, s_mid) - v


def _critical_leg_to(chart: Chart, crit, a: complex, s_a: complex) -> complex:
    """Integral from regular ``a`` (branch ``s_a``) to the critical point ``crit``."""
    c, n = crit
    dist = abs(a - c)
    radius = min(dist, 0.5 * chart.safe_length(c, exclude=c))
    if radius >= dist:
        return -integrate_from_critical(chart, c, n, a, s_a)
    mid = c + (a - c) * (radius / dist)
    v, s_mid = integrate_segment(chart, a, mid, s_a)
    return v - integrate_from_critical(chart, c, n, mid, s_mid)


def _segment_distance(a: complex, b: complex, c: complex) -> float:
    d = b - a
    if d == 0:
        return abs(c - a)
    t = ((c - a) * d.conjugate()).real / abs(d) ** 2
    t = min(1.0, max(0.0, t))
    return abs(a + t * d - c)


def _chart_for(phi: QuadraticDifferential, at_infinity: bool) -> Chart:
    finite = [(c.point.value, c.order) for c in phi.critical_points if not c.point.is_infinity]
    if not at_infinity:
        return Chart(phi.f, finite, "z")
    wcrits = [(1 / p, n) for p, n in finite if p != 0]
    inf_order = phi.order_of(SpherePoint(None))
    if inf_order:
        wcrits.append((0j, inf_order))
    return Chart(phi.w_chart, wcrits, "w")


def integral_to_critical(phi: QuadraticDifferential, z: complex, s: complex, crit) -> complex:
    """``int sqrt(f) dz`` from the regular point ``z`` (branch value ``s``) to ``crit``.

    ``crit`` is a :class:`~quadiff.differential.CriticalPoint` of order >= -1;
    the straight segment (in the chart centred at ``crit``) is used.
    """
    if crit.point.is_infinity:
        chart = _chart_for(phi, True)
        _, w, s_w = _switch("z", z, s)
        return _critical_leg_to(chart, (0j, crit.order), w, s_w)
    chart = _chart_for(phi, False)
    return _critical_leg_to(chart, (crit.point.value, crit.order), z, s)


def integral_from_critical(phi: QuadraticDifferential, crit, z: complex, s: complex) -> complex:
    """``int sqrt(f) dz`` from ``crit`` to the regular point ``z`` with branch ``s`` there."""
    return -integral_to_critical(phi, z, s, crit)

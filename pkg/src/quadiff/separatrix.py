"""Critical trajectories leaving the zeros, and saddle-connection search."""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .differential import CriticalPoint, QuadraticDifferential
from .errors import QuadiffError
from .flow import (HitZero, ToleranceSet, TrajectorySample, _chart_for, integral_to_critical,
                   trace)
from .local_models import critical_directions
from .quad import integrate_from_critical


@dataclass
class Separatrix:
    zero_id: int
    ray_index: int
    launch_angle: float  # in the chart centred at the zero (w = 1/z at infinity)
    sample: TrajectorySample

    @property
    def terminal(self):
        return self.sample.terminal

    @property
    def key(self) -> tuple[int, int]:
        return (self.zero_id, self.ray_index)

    def to_json(self) -> dict:
        out = {"zero": self.zero_id, "ray": self.ray_index, "launch_angle": self.launch_angle}
        out.update(self.sample.to_json())
        return out


@dataclass(frozen=True)
class SaddleEvent:
    theta: float
    zero_pair: tuple[int, int]
    miss_distance: float
    period: complex = 0j  # integral of sqrt(f) along the connection, first zero to second

    def to_json(self) -> dict:
        return {"theta": self.theta, "zero_pair": list(self.zero_pair),
                "miss_distance": self.miss_distance,
                "period": [self.period.real, self.period.imag]}


def _zero(phi: QuadraticDifferential, zero_id: int) -> CriticalPoint:
    return phi.zeros[zero_id]


def launch(phi: QuadraticDifferential, zero: CriticalPoint, angle: float, theta: float,
           controls: ToleranceSet | None = None) -> TrajectorySample:
    """Trace the phase-``theta`` leaf leaving ``zero`` along ``angle``.

    The returned sample carries ``W`` measured from the zero itself.
    """
    tol = (controls or ToleranceSet()).resolved(phi)
    R = tol.r_switch
    e = cmath.exp(1j * angle)
    at_inf = zero.point.is_infinity
    chart = _chart_for(phi, at_inf)
    if at_inf:
        u = tol.delta_launch / R ** 2 * e
        c = 0j
        z = 1 / u
    else:
        c = zero.point.value
        u = c + tol.delta_launch * e
        z = u
    s = cmath.sqrt(chart(u))
    v = cmath.exp(1j * math.pi * theta) * abs(s) / s
    direction = 1 if (v * e.conjugate()).real > 0 else -1
    w0 = integrate_from_critical(chart, c, zero.order, u, s)
    if at_inf:
        s_z = -s * u * u
        p = cmath.sqrt(phi.f(z))
        branch = 1 if (s_z.real * p.real + s_z.imag * p.imag) >= 0 else -1
    else:
        branch = 1
    return trace(phi, z, direction, theta, tol, branch=branch, w0=w0)


def separatrices(phi: QuadraticDifferential, theta: float = 0.0,
                 controls: ToleranceSet | None = None) -> list[Separatrix]:
    """All critical trajectories of phase ``theta`` leaving the zeros of ``phi``."""
    tol = (controls or ToleranceSet()).resolved(phi)
    out = []
    for zero in phi.zeros:
        for k, a in enumerate(critical_directions(zero.order, zero.leading_coeff, theta)):
            out.append(Separatrix(zero.index, k, a, launch(phi, zero, a, theta, tol)))
    return out


# -- distances ----------------------------------------------------------------


def _polyline_distance(points: np.ndarray, c: complex) -> tuple[float, int]:
    """Distance from ``c`` to a polyline, and the index of the nearest vertex."""
    if len(points) == 0:
        return math.inf, -1
    vd = np.abs(points - c)
    k = int(np.argmin(vd))
    if len(points) < 2:
        return float(vd[k]), k
    a, b = points[:-1], points[1:]
    d = b - a
    den = np.abs(d) ** 2
    den[den == 0] = 1.0
    t = np.clip(((c - a) * np.conj(d)).real / den, 0.0, 1.0)
    seg = np.abs(a + t * d - c)
    return float(min(seg.min(), vd[k])), k


def _local_points(sample: TrajectorySample, target: CriticalPoint, R: float) -> np.ndarray:
    pts = sample.points
    if target.point.is_infinity:
        with np.errstate(divide="ignore"):
            return R * R / pts
    return pts


def _own_exit_index(phi, zero: CriticalPoint, pts: np.ndarray, R: float) -> int:
    """First vertex that is well away from the launching zero."""
    if zero.point.is_infinity:
        with np.errstate(divide="ignore"):
            loc = R * R / pts
        c = 0j
        others = [R * R / q.point.value for q in phi.critical_points
                  if q is not zero and not q.point.is_infinity and q.point.value != 0]
    else:
        loc, c = pts, zero.point.value
        others = [q.point.value for q in phi.critical_points
                  if q is not zero and not q.point.is_infinity]
    rad = 0.25 * min((abs(o - c) for o in others), default=R)
    far = np.nonzero(np.abs(loc - c) > rad)[0]
    return int(far[0]) if len(far) else len(pts)


def _target_distance(phi, sep_zero, sample, target, R):
    pts = _local_points(sample, target, R)
    c = 0j if target.point.is_infinity else target.point.value
    start = _own_exit_index(phi, sep_zero, sample.points, R) if target is sep_zero else 0
    if start >= len(pts):
        return math.inf, -1
    d, k = _polyline_distance(pts[start:], c)
    return d, k + start


def _crit_scale(phi, target: CriticalPoint, R: float) -> float:
    """Distance from ``target`` to the nearest other critical point, in its local scale."""
    if target.point.is_infinity:
        ds = [R * R / abs(q.point.value) for q in phi.critical_points
              if not q.point.is_infinity and q.point.value != 0]
    else:
        ds = [abs(q.point.value - target.point.value) for q in phi.critical_points
              if q is not target and not q.point.is_infinity]
        if any(q.point.is_infinity for q in phi.critical_points):
            ds.append(R - abs(target.point.value))
    return min(ds, default=R)


# -- saddle scan --------------------------------------------------------------


def _connection_period(phi, sample: TrajectorySample, k: int, target: CriticalPoint) -> complex:
    z = sample.vertices[k]
    s = sample.branch[k] * cmath.sqrt(phi.f(z))
    return sample.W[k] + integral_to_critical(phi, z, s, target)


def _cyclic_gap(a: float, b: float) -> float:
    d = (a - b) % 1.0
    return min(d, 1.0 - d)


def _normalize_theta(t: float) -> float:
    t = t % 1.0
    return 0.0 if 1.0 - t < 1e-13 else t


def refine_saddle(phi: QuadraticDifferential, zero: CriticalPoint, angle: float, theta: float,
                  target: CriticalPoint, controls: ToleranceSet | None = None,
                  max_iter: int = 12) -> SaddleEvent | None:
    """Refine a near-connection from ``zero`` to ``target`` to an exact phase.

    At each step the period of the would-be connection is computed by closing
    the separatrix at its nearest approach to ``target`` with a straight
    segment; the phase of that period is the next estimate. The event is
    accepted only if the leaf at the final phase ends on ``target``.
    """
    got = refine_connection(phi, zero, angle, theta, target, controls, max_iter)
    return None if got is None else got[0]


def refine_connection(phi: QuadraticDifferential, zero: CriticalPoint, angle: float,
                      theta: float, target: CriticalPoint, controls: ToleranceSet | None = None,
                      max_iter: int = 12) -> tuple[SaddleEvent, TrajectorySample, float] | None:
    """Like :func:`refine_saddle`, also returning the connecting sample and its launch angle."""
    tol = (controls or ToleranceSet()).resolved(phi)
    R = tol.r_switch
    n = zero.order
    for _ in range(max_iter):
        try:
            sample = launch(phi, zero, angle, theta, tol)
            d, k = _target_distance(phi, zero, sample, target, R)
            if k < 0:
                return None
            P = _connection_period(phi, sample, k, target)
        except QuadiffError:
            return None
        new = _normalize_theta(math.atan2(P.imag, P.real) / math.pi)
        step = (new - theta + 0.5) % 1.0 - 0.5
        angle += 2 * math.pi * step / (n + 2)
        theta = new
        if abs(step) < 1e-14:
            break
    else:
        return None
    try:
        sample = launch(phi, zero, angle, theta, tol)
    except QuadiffError:
        return None
    term = sample.terminal
    if not (isinstance(term, HitZero) and term.zero_id == target.index):
        return None
    _, k = _target_distance(phi, zero, sample, target, R)
    P = _connection_period(phi, sample, k, target)
    # closest approach of the leaf to the target, from the local model
    eta = abs((cmath.exp(-1j * math.pi * theta) * P).imag)
    miss = (1.5 * eta / math.sqrt(abs(target.leading_coeff))) ** (2 / 3)
    if target.point.is_infinity:
        miss *= R * R
    if miss >= tol.eps_saddle:
        return None
    return SaddleEvent(theta, (zero.index, target.index), miss, P), sample, angle


def scan_saddle_phases(phi: QuadraticDifferential, grid: int = 720,
                       controls: ToleranceSet | None = None) -> list[SaddleEvent]:
    """Phases in [0, 1) at which a separatrix of ``phi`` runs into a zero."""
    tol = (controls or ToleranceSet()).resolved(phi)
    R = tol.r_switch
    zeros = phi.zeros
    thetas = [j / grid for j in range(grid)]
    # miss[(zero_id, ray, target_id)][j]; rays are tracked by launch angle
    miss: dict = {}
    angles: dict = {}
    for j, th in enumerate(thetas):
        for zero in zeros:
            # label rays continuously in theta: ray k starts at k * 2pi/(n+2)
            lc = zero.leading_coeff
            base = (2 * math.pi * th - math.atan2(lc.imag, lc.real)) / (zero.order + 2)
            for k in range(zero.order + 2):
                a = base + 2 * math.pi * k / (zero.order + 2)
                try:
                    sample = launch(phi, zero, a, th, tol)
                except QuadiffError:
                    continue
                angles[(zero.index, k, j)] = a
                for target in zeros:
                    d, _ = _target_distance(phi, zero, sample, target, R)
                    miss.setdefault((zero.index, k, target.index), [math.inf] * grid)[j] = d
    events: list[SaddleEvent] = []
    for (zid, k, tid), m in sorted(miss.items()):
        target = zeros[tid]
        coarse = 0.5 * _crit_scale(phi, target, R)
        for j in range(grid):
            here = m[j]
            if not here < coarse:
                continue
            if here > m[j - 1] or here > m[(j + 1) % grid]:
                continue
            if (zid, k, j) not in angles:
                continue
            ev = refine_saddle(phi, zeros[zid], angles[(zid, k, j)], thetas[j], target, tol)
            if ev is not None:
                _add_event(events, ev)
    # a connection is a separatrix of both of its endpoints
    for ev in list(events):
        rev = _reverse(phi, ev, tol)
        if rev is not None:
            _add_event(events, rev)
    events.sort(key=lambda e: (e.theta, e.zero_pair))
    return events


def _add_event(events: list, ev: SaddleEvent, dtheta: float = 1e-9) -> None:
    for old in events:
        if old.zero_pair == ev.zero_pair and _cyclic_gap(old.theta, ev.theta) < dtheta:
            return
    events.append(ev)


def _reverse(phi, ev: SaddleEvent, tol: ToleranceSet) -> SaddleEvent | None:
    a, b = ev.zero_pair
    zb, za = phi.zeros[b], phi.zeros[a]
    for ang in critical_directions(zb.order, zb.leading_coeff, ev.theta):
        got = refine_saddle(phi, zb, ang, ev.theta, za, tol, max_iter=4)
        if got is not None and _cyclic_gap(got.theta, ev.theta) < 1e-9:
            return got
    return None


def near_saddle_warnings(phi: QuadraticDifferential, seps: list[Separatrix],
                         controls: ToleranceSet | None = None) -> list[str]:
    """Separatrices passing within 100 eps_saddle of a zero without hitting it."""
    tol = (controls or ToleranceSet()).resolved(phi)
    R = tol.r_switch
    out = []
    for sep in seps:
        if isinstance(sep.terminal, HitZero):
            continue
        zero = phi.zeros[sep.zero_id]
        for target in phi.zeros:
            d, _ = _target_distance(phi, zero, sep.sample, target, R)
            if d < 100 * tol.eps_saddle:
                msg = (f"separatrix {sep.key} passes within {d:.3g} of zero {target.index}; "
                       "close to a saddle phase")
                warnings.warn(msg, RuntimeWarning, stacklevel=2)
                out.append(msg)
    return out

"""Branch-safe integration of a square root ``sqrt(f) du`` along segments.

A *chart* bundles the coefficient function of the differential in one
coordinate together with its critical points. Because ``f'/f`` is the sum
``n_i / (u - c_i)`` over critical points, a segment of length ``L`` starting
at distance ``d_i`` from each of them changes ``arg f`` by at most
``sum |n_i| L / (d_i - L)``. Pieces are cut so that this bound stays below
pi/4, which makes the square root branch unambiguous when it is chosen by
proximity to the value at the start of the piece.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .rational import RationalMap

# Gauss-Kronrod 7/15 nodes on [-1, 1] (positive half, center last)
_XGK = (0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.0)
_WGK = (0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714)
_WG = (0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
       0.381830050505118944950369775488975, 0.417959183673469387755102040816327)

# nodes ordered from -1 to 1 so that branch continuation can walk along them
_NODES = tuple([-x for x in _XGK[:-1]] + [0.0] + list(reversed(_XGK[:-1])))
_KW = tuple(list(_WGK[:-1]) + [_WGK[-1]] + list(reversed(_WGK[:-1])))
_GW = [0.0] * 15
for _j, _w in zip((1, 3, 5, 7), _WG):
    _GW[_j] = _w
    _GW[14 - _j] = _w
_GW = tuple(_GW)

ARG_BUDGET = math.pi / 8


def sqrt_near(value: complex, ref: complex) -> complex:
    """The square root of ``value`` closest in direction to ``ref``."""
    r = cmath.sqrt(value)
    if r.real * ref.real + r.imag * ref.imag < 0:
        return -r
    return r


@dataclass
class Chart:
    """Coefficient function and critical points in one coordinate."""

    f: RationalMap
    crits: Sequence[tuple[complex, int]]
    name: str = "z"

    def __post_init__(self):
        num, den = self.f.num.coeffs, self.f.den.coeffs
        self._num = tuple(reversed(num))
        self._den = tuple(reversed(den))
        self._c = tuple(c for c, _ in self.crits)
        self._n = tuple(abs(n) for _, n in self.crits)

    def __call__(self, u: complex) -> complex:
        a = 0j
        for c in self._num:
            a = a * u + c
        b = 0j
        for c in self._den:
            b = b * u + c
        return a / b

    def nearest(self, u: complex, exclude: complex | None = None) -> float:
        d = math.inf
        for c in self._c:
            if exclude is not None and c == exclude:
                continue
            d = min(d, abs(u - c))
        return d

    def safe_length(self, u: complex, exclude: complex | None = None) -> float:
        """Longest segment from ``u`` over which ``arg f`` moves < pi/4."""
        s = 0.0
        dmin = math.inf
        for c, n in zip(self._c, self._n):
            if exclude is not None and c == exclude:
                continue
            d = abs(u - c)
            if d == 0:
                return 0.0
            s += n / d
            dmin = min(dmin, d)
        if s == 0:
            return math.inf
        return min(0.5 * dmin, ARG_BUDGET / s)


def _gk15(g: Callable[[complex], complex], a: complex, b: complex):
    """Kronrod and Gauss estimates of the integral of g over the segment a->b.

    ``g`` is evaluated at the nodes in order from ``a`` to ``b``.
    """
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    k = 0j
    gsum = 0j
    for x, kw, gw in zip(_NODES, _KW, _GW):
        v = g(mid + half * x)
        k += kw * v
        gsum += gw * v
    return k * half, gsum * half


def integrate_piece(chart: Chart, a: complex, b: complex, s_ref: complex,
                    abstol: float = 1e-13, depth: int = 0) -> tuple[complex, complex]:
    """Integral of sqrt(f) over one safe piece; returns (value, sqrt at b)."""
    state = [s_ref]

    def g(u):
        v = sqrt_near(chart(u), state[0])
        state[0] = v
        return v

    k, gauss = _gk15(g, a, b)
    if abs(k - gauss) > abstol and depth < 30 and abs(b - a) > 1e-15 * (1 + abs(a)):
        m = 0.5 * (a + b)
        v1, sm = integrate_piece(chart, a, m, s_ref, abstol / 2, depth + 1)
        v2, sb = integrate_piece(chart, m, b, sm, abstol / 2, depth + 1)
        return v1 + v2, sb
    return k, sqrt_near(chart(b), state[0])


def integrate_segment(chart: Chart, a: complex, b: complex, s_ref: complex,
                      abstol: float = 1e-13) -> tuple[complex, complex]:
    """Integral of sqrt(f) along the straight segment a->b.

    ``s_ref`` is the branch value at ``a``. The segment is cut into safe
    pieces; it must not pass through a critical point.
    """
    total = 0j
    s = s_ref
    u = a
    length = abs(b - a)
    if length == 0:
        return 0j, s
    direction = (b - a) / length
    travelled = 0.0
    while travelled < length:
        step = chart.safe_length(u)
        if step <= 0:
            raise ZeroDivisionError("segment hits a critical point")
        step = min(step, length - travelled)
        nxt = b if travelled + step >= length else u + direction * step
        val, s = integrate_piece(chart, u, nxt, s, abstol)
        total += val
        travelled += step
        u = nxt
    return total, s


def integrate_from_critical(chart: Chart, c: complex, order: int, b: complex,
                            s_b: complex, abstol: float = 1e-13) -> complex:
    """Integral of sqrt(f) from the critical point ``c`` to ``b``.

    Uses ``u = c + t**2 (b - c)``, which turns ``sqrt(f) du`` into an analytic
    integrand in ``t`` for every critical order >= -1. ``s_b`` fixes the
    branch at ``b``. The segment must lie in the safe disc of ``c``.
    """
    d = b - c
    n = order

    # R(t) = sqrt(f(u) / t**(2n)) is analytic and nonvanishing on [0, 1];
    # it equals sqrt(f(b)) at t = 1, where the branch is anchored.
    def integrand(t, ref):
        u = c + t * t * d
        if t == 0:
            val = chart.f.leading_at(c, n) * d ** n
        else:
            val = chart(u) / t ** (2 * n)
        r = sqrt_near(val, ref)
        return 2 * d * t ** (n + 1) * r, r

    # walk the nodes from t=1 down to t=0 so the branch follows continuously
    def run(lo, hi, ref, tol, depth=0):
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        vals = [None] * 15
        r = ref
        for i in range(14, -1, -1):
            v, r = integrand(mid + half * _NODES[i], r)
            vals[i] = v
        k = sum(w * v for w, v in zip(_KW, vals)) * half
        g = sum(w * v for w, v in zip(_GW, vals)) * half
        if abs(k - g) > tol and depth < 30:
            upper, r_mid = run(mid, hi, ref, tol / 2, depth + 1)
            lower, r_lo = run(lo, mid, r_mid, tol / 2, depth + 1)
            return upper + lower, r_lo
        return k, r

    val, _ = run(0.0, 1.0, s_b, abstol)
    return val


def polyline_length(points: Sequence[complex]) -> float:
    p = np.asarray(points)
    return float(np.abs(np.diff(p)).sum()) if len(p) > 1 else 0.0

"""Closed-form local normal forms ``C z**n dz**2`` and ``b**2 z**-2 dz**2``.

These serve two purposes: classification at runtime (launch directions at
zeros, regimes at double poles) and independent oracles for the numerical
flow in :mod:`quadiff.flow`.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import BranchCut, WrongOrder
from .rational import SpherePoint

TWO_PI = 2 * math.pi
REGIME_TOL = 1e-9


@dataclass(frozen=True)
class LocalModel:
    center: SpherePoint
    order: int
    leading_coeff: complex


@dataclass(frozen=True)
class DoublePoleData:
    pole: SpherePoint
    b: complex
    regime: str  # "radial", "circular" or "spiral"


def critical_directions(n: int, C: complex, theta: float = 0.0) -> list[float]:
    """Angles of the phase-``theta`` rays of ``C z**n dz**2`` leaving the origin.

    For ``n >= -1`` there are ``n + 2`` rays; for poles of order three or more
    (``n <= -3``) the same formula gives the ``|n + 2|`` asymptotic directions.
    """
    if n == -2:
        raise ValueError("double poles have no distinguished directions")
    if C == 0:
        raise ValueError("leading coefficient must be nonzero")
    k = n + 2
    base = (TWO_PI * theta - math.atan2(C.imag, C.real)) / k
    step = TWO_PI / abs(k)
    out = sorted((base + j * step) % TWO_PI for j in range(abs(k)))
    # values like 2pi - 1e-17 should read as 0
    return sorted(0.0 if TWO_PI - a < 1e-14 else a for a in out)


def model_primitive(n: int, z: complex, side: int | None = None) -> complex:
    """``(2/(n+2)) z**((n+2)/2)`` with the cut on the negative real axis.

    ``side=+1`` (``-1``) evaluates a point on the cut as the limit from the
    upper (lower) half-plane.
    """
    if n == -2:
        raise ValueError("n = -2 has a logarithmic primitive")
    z = complex(z)
    if z == 0:
        if n >= -1:
            return 0j
        raise ZeroDivisionError("primitive has a pole at the origin")
    arg = math.atan2(z.imag, z.real)
    if z.imag == 0 and z.real < 0:
        if side is None:
            raise BranchCut(f"{z} lies on the branch cut; pass side=+1 or -1")
        arg = math.pi if side > 0 else -math.pi
    a = (n + 2) / 2
    return (2 / (n + 2)) * cmath.exp(a * (math.log(abs(z)) + 1j * arg))


def normalized_sqrt(c: complex) -> complex:
    """Square root with Re > 0, ties broken by Im > 0."""
    b = cmath.sqrt(c)
    if b.real < 0 or (b.real == 0 and b.imag < 0):
        b = -b
    return b


def classify_regime(b: complex, tol: float = REGIME_TOL) -> str:
    if abs(b.real) <= tol * abs(b):
        return "circular"
    if abs(b.imag) <= tol * abs(b):
        return "radial"
    return "spiral"


def double_pole_residue(phi, pole: SpherePoint, tol: float = REGIME_TOL) -> DoublePoleData:
    """``b`` with ``b**2`` the coefficient of ``(z-p)**-2`` at a double pole of ``phi``."""
    order = phi.order_of(pole)
    if order != -2:
        raise WrongOrder(f"{pole} has order {order}, expected -2")
    b2 = phi.leading_coeff(pole)
    b = normalized_sqrt(b2)
    return DoublePoleData(pole, b, classify_regime(b, tol))

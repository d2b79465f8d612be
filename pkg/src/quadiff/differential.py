"""Quadratic differentials ``f(z) dz**2`` on the Riemann sphere.

The point at infinity is handled through the chart ``w = 1/z``, in which the
differential reads ``f(1/w) w**-4 dw**2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .errors import InvalidConfiguration
from .local_models import classify_regime, normalized_sqrt
from .rational import (DEFAULT_ROOT_TOL, INFINITY, ComplexPoly, RationalMap,
                       SpherePoint)

RESIDUE_TOL = 1e-9


def divisor_of(f: RationalMap) -> list[tuple[SpherePoint, int]]:
    """Zeros and poles of ``f dz**2`` including infinity; orders sum to -4."""
    if f.is_zero:
        raise ValueError("the zero differential has no divisor")
    div = [(SpherePoint(complex(r)), m) for r, m in f.num_roots]
    div += [(SpherePoint(complex(r)), -m) for r, m in f.den_roots]
    div.sort(key=lambda t: t[0].sort_key())
    at_inf = -4 - f.degree_difference
    if at_inf:
        div.append((INFINITY, at_inf))
    return div


def infinity_chart(f: RationalMap) -> RationalMap:
    """Coefficient function of the differential in the coordinate ``w = 1/z``."""
    n, d = f.num.degree, f.den.degree
    num = f.num.reversed(n)
    den = f.den.reversed(d)
    k = d - n - 4
    if k >= 0:
        num = ComplexPoly((0j,) * k + num.coeffs)
    else:
        den = ComplexPoly((0j,) * (-k) + den.coeffs)
    lead = den.leading
    return RationalMap(num * (1 / lead), den * (1 / lead), f.tol)


@dataclass(frozen=True)
class CriticalPoint:
    point: SpherePoint
    order: int
    leading_coeff: complex
    index: int  # position among zeros (order > 0) or among poles (order < 0)

    @property
    def is_zero(self) -> bool:
        return self.order > 0

    @property
    def label(self) -> str:
        return f"{'z' if self.is_zero else 'p'}{self.index}"


@dataclass(frozen=True)
class GmnReport:
    is_gmn: bool
    has_only_double_poles: bool
    failures: tuple[str, ...]
    purely_imaginary_residue_poles: tuple[int, ...]
    warnings: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "is_gmn": self.is_gmn,
            "has_only_double_poles": self.has_only_double_poles,
            "failures": list(self.failures),
            "purely_imaginary_residue_poles": list(self.purely_imaginary_residue_poles),
            "warnings": list(self.warnings),
        }


@dataclass(frozen=True)
class QuadraticDifferential:
    f: RationalMap
    divisor: tuple = field(default=())
    leading_coeffs: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_rational(cls, f: RationalMap) -> "QuadraticDifferential":
        div = tuple(divisor_of(f))
        lead = {}
        for p, n in div:
            if p.is_infinity:
                lead[p] = f.num.leading / f.den.leading
            else:
                lead[p] = f.leading_at(p.value, n)
        return cls(f, div, lead)

    @classmethod
    def from_coefficients(cls, num: Sequence, den: Sequence = (1,),
                          tol: float = DEFAULT_ROOT_TOL) -> "QuadraticDifferential":
        return cls.from_rational(RationalMap.create(num, den, tol))

    @property
    def polar_type(self) -> tuple[int, ...]:
        return tuple(sorted(-n for _, n in self.divisor if n < 0))

    @cached_property
    def critical_points(self) -> tuple[CriticalPoint, ...]:
        out = []
        zi = pi = 0
        for p, n in self.divisor:
            if n > 0:
                out.append(CriticalPoint(p, n, self.leading_coeffs[p], zi))
                zi += 1
            else:
                out.append(CriticalPoint(p, n, self.leading_coeffs[p], pi))
                pi += 1
        return tuple(out)

    @property
    def zeros(self) -> list[CriticalPoint]:
        return [c for c in self.critical_points if c.order > 0]

    @property
    def poles(self) -> list[CriticalPoint]:
        return [c for c in self.critical_points if c.order < 0]

    def order_of(self, p: SpherePoint, tol: float | None = None) -> int:
        tol = self.f.tol if tol is None else tol
        for q, n in self.divisor:
            if q.close_to(p, math.sqrt(tol) * (1 + (0 if p.is_infinity else abs(p.value)))):
                return n
        return 0

    def leading_coeff(self, p: SpherePoint) -> complex:
        for q, n in self.divisor:
            if q.close_to(p, math.sqrt(self.f.tol) * (1 + (0 if p.is_infinity else abs(p.value)))):
                return self.leading_coeffs[q]
        if p.is_infinity:
            return complex(infinity_chart(self.f)(0))
        return complex(self.f(p.value))

    @cached_property
    def w_chart(self) -> RationalMap:
        return infinity_chart(self.f)

    @cached_property
    def r_switch(self) -> float:
        finite = [abs(c.point.value) for c in self.critical_points if not c.point.is_infinity]
        return 2.0 * (1.0 + max(finite, default=0.0))

    def scaled(self, c: complex) -> "QuadraticDifferential":
        """The differential ``c * phi``."""
        return QuadraticDifferential.from_rational(self.f.scaled(c))

    def to_json(self) -> dict:
        return {
            "numerator": [[a.real, a.imag] for a in self.f.num.coeffs],
            "denominator": [[a.real, a.imag] for a in self.f.den.coeffs],
            "divisor": [{"at": p.to_json(), "order": n} for p, n in self.divisor],
            "polar_type": list(self.polar_type),
        }


def validate_gmn(phi: QuadraticDifferential, residue_tol: float = RESIDUE_TOL) -> GmnReport:
    failures = []
    for c in phi.zeros:
        if c.order != 1:
            failures.append(f"non-simple zero at {c.point.to_json()} (order {c.order})")
    if not phi.poles:
        failures.append("no pole")
    finite_crit = [c for c in phi.critical_points if c.order > 0 or c.order == -1]
    if not finite_crit:
        failures.append("no finite critical point")
    pt = phi.polar_type
    only_double = bool(pt) and all(m == 2 for m in pt)
    imaginary = []
    warnings = []
    for c in phi.poles:
        if c.order == -2:
            b = normalized_sqrt(c.leading_coeff)
            if classify_regime(b, residue_tol) == "circular":
                imaginary.append(c.index)
                warnings.append(
                    f"double pole {c.label} at {c.point.to_json()} has purely imaginary "
                    "residue; a ring domain forces saddle trajectories")
    return GmnReport(not failures, only_double, tuple(failures), tuple(imaginary),
                     tuple(warnings))


def hat_rank(g: int, polar_type: Sequence[int]) -> int:
    """Rank of the hat homology group: ``6g - 6 + sum(m_i) + m``."""
    if not polar_type:
        raise InvalidConfiguration("polar type must be nonempty")
    n = 6 * g - 6 + sum(polar_type) + len(polar_type)
    if n <= 0:
        raise InvalidConfiguration(
            f"polar type {sorted(polar_type)} in genus {g} admits no GMN differential")
    return n


def holomorphic_quadratic_dimension(g: int) -> int:
    if g < 0:
        raise ValueError("genus must be nonnegative")
    if g == 0:
        return 0
    if g == 1:
        return 1
    return 3 * g - 3


# --------------------------------------------------------------------------
# input records


def _parse_complex(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, str):
        return complex(v.replace(" ", "").replace("i", "j"))
    if isinstance(v, dict):
        return complex(v.get("re", 0.0), v.get("im", 0.0))
    re, im = v
    return complex(re, im)


def differential_from_record(rec: dict, tol: float = DEFAULT_ROOT_TOL) -> QuadraticDifferential:
    """Build a differential from a JSON-style record.

    Two forms are accepted::

        {"numerator": [c0, c1, ...], "denominator": [...]}
        {"zeros": [z or {"at": z, "order": n}, ...],
         "poles": [{"at": p, "order": m}, ...], "scale": c}

    Complex numbers are ``[re, im]`` pairs, plain numbers, ``{"re":, "im":}``
    or strings such as ``"1+2i"``. A pole listed ``"at": "inf"`` must match
    the order implied by the degrees.
    """
    if "numerator" in rec:
        num = [_parse_complex(a) for a in rec["numerator"]]
        den = [_parse_complex(a) for a in rec.get("denominator", [1])]
        return QuadraticDifferential.from_coefficients(num, den, tol)
    if "zeros" not in rec and "poles" not in rec:
        raise ValueError("record needs 'numerator' or 'zeros'/'poles'")
    zeros, poles, declared_inf = [], [], None
    for item in rec.get("zeros", []):
        at, n = (item.get("at"), item.get("order", 1)) if isinstance(item, dict) else (item, 1)
        if at == "inf":
            declared_inf = int(n) if declared_inf is None else declared_inf + int(n)
            continue
        zeros.append((_parse_complex(at), int(n)))
    for item in rec.get("poles", []):
        at, m = (item.get("at"), item.get("order", 1)) if isinstance(item, dict) else (item, 1)
        if at == "inf":
            declared_inf = -int(m) if declared_inf is None else declared_inf - int(m)
            continue
        poles.append((_parse_complex(at), int(m)))
    scale = _parse_complex(rec.get("scale", 1.0))
    f = RationalMap.from_divisor(scale, zeros, poles)
    phi = QuadraticDifferential.from_rational(f)
    if declared_inf is not None and phi.order_of(INFINITY) != declared_inf:
        raise ValueError(
            f"declared order {declared_inf} at infinity, degrees imply {phi.order_of(INFINITY)}")
    return phi


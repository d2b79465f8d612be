"""Complex polynomials and rational functions on the Riemann sphere.

Polynomials keep their coefficients in ascending degree order as plain
Python complex numbers; evaluation is Horner's scheme in pure Python, which
is faster than numpy for the small degrees used here.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import NonConvergence

DEFAULT_ROOT_TOL = 1e-8


@dataclass(frozen=True)
class SpherePoint:
    """A point of the Riemann sphere: a finite complex value or infinity."""

    value: complex | None = None

    @classmethod
    def finite(cls, z) -> "SpherePoint":
        return cls(complex(z))

    @property
    def is_infinity(self) -> bool:
        return self.value is None

    def close_to(self, other: "SpherePoint", tol: float) -> bool:
        if self.is_infinity or other.is_infinity:
            return self.is_infinity and other.is_infinity
        return abs(self.value - other.value) <= tol

    def sort_key(self):
        if self.is_infinity:
            return (1, 0.0, 0.0)
        return (0, self.value.real, self.value.imag)

    def to_json(self):
        if self.is_infinity:
            return "inf"
        return [self.value.real, self.value.imag]

    def __repr__(self):
        return "SpherePoint(inf)" if self.is_infinity else f"SpherePoint({self.value!r})"


INFINITY = SpherePoint(None)


def _trim(coeffs: Iterable) -> tuple:
    c = [complex(a) for a in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class ComplexPoly:
    """Polynomial with complex coefficients, ascending degree."""

    coeffs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @classmethod
    def from_roots(cls, roots: Sequence[complex], lead: complex = 1.0) -> "ComplexPoly":
        c = [complex(lead)]
        for r in roots:
            nxt = [0j] * (len(c) + 1)
            for k, a in enumerate(c):
                nxt[k + 1] += a
                nxt[k] -= r * a
            c = nxt
        return cls(tuple(c))

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self):
        """Index of the last nonzero coefficient; ``-inf`` for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else -math.inf

    @property
    def leading(self) -> complex:
        return self.coeffs[-1] if self.coeffs else 0j

    @property
    def scale(self) -> float:
        return max((abs(a) for a in self.coeffs), default=0.0)

    def __call__(self, z: complex) -> complex:
        acc = 0j
        for a in reversed(self.coeffs):
            acc = acc * z + a
        return acc

    def derivative(self) -> "ComplexPoly":
        return ComplexPoly(tuple(k * a for k, a in enumerate(self.coeffs) if k))

    def __add__(self, other: "ComplexPoly") -> "ComplexPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0j,) * (n - len(self.coeffs))
        b = other.coeffs + (0j,) * (n - len(other.coeffs))
        return ComplexPoly(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> "ComplexPoly":
        return ComplexPoly(tuple(-a for a in self.coeffs))

    def __sub__(self, other: "ComplexPoly") -> "ComplexPoly":
        return self + (-other)

    def __mul__(self, other) -> "ComplexPoly":
        if not isinstance(other, ComplexPoly):
            return ComplexPoly(tuple(complex(other) * a for a in self.coeffs))
        if self.is_zero or other.is_zero:
            return ComplexPoly(())
        out = [0j] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return ComplexPoly(tuple(out))

    __rmul__ = __mul__

    def deflate(self, root: complex) -> "ComplexPoly":
        """Quotient of synthetic division by ``(z - root)``; the remainder is dropped."""
        n = len(self.coeffs) - 1
        if n < 1:
            return ComplexPoly(())
        q = [0j] * n
        acc = 0j
        for k in range(n, 0, -1):
            acc = acc * root + self.coeffs[k]
            q[k - 1] = acc
        return ComplexPoly(tuple(q))

    def reversed(self, degree: int | None = None) -> "ComplexPoly":
        """Coefficients of ``z**degree * p(1/z)``."""
        d = self.degree if degree is None else degree
        c = list(self.coeffs) + [0j] * (d + 1 - len(self.coeffs))
        return ComplexPoly(tuple(reversed(c)))

    def monic(self) -> "ComplexPoly":
        return self * (1 / self.leading)


# --------------------------------------------------------------------------
# root finding


def _aberth(coeffs: np.ndarray, maxiter: int = 500) -> tuple[np.ndarray, bool]:
    """Aberth-Ehrlich simultaneous iteration; coeffs ascending, leading != 0."""
    n = len(coeffs) - 1
    dcoeffs = coeffs[1:] * np.arange(1, n + 1)
    a = np.abs(coeffs)
    # initial circle: geometric mean of root moduli, off-axis start angle
    radius = (a[0] / a[-1]) ** (1.0 / n) if a[0] > 0 else 1.0
    radius = max(radius, 1e-3)
    z = radius * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))
    pe = np.polynomial.polynomial.polyval
    converged = False
    for _ in range(maxiter):
        p = pe(z, coeffs)
        dp = pe(z, dcoeffs)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            corr = ratio / (1.0 - ratio * inv.sum(axis=1))
        corr = np.where(np.isfinite(corr), corr, 0.0)
        z = z - corr
        if np.all(np.abs(corr) <= 4e-16 * np.maximum(1.0, np.abs(z))):
            converged = True
            break
    return z, converged


def _cluster(z: np.ndarray, tol: float) -> list[list[int]]:
    """Single-linkage groups of approximate roots.

    An m-fold root comes back from floating point iteration spread over a
    disc of radius ~eps**(1/m), so the merge radius is sqrt(tol) rather than
    tol itself.
    """
    radius = math.sqrt(tol)
    n = len(z)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(z[i] - z[j]) <= radius * max(1.0, abs(z[i]), abs(z[j])):
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def roots(p: ComplexPoly, tol: float = DEFAULT_ROOT_TOL) -> list[tuple[complex, int]]:
    """Roots of ``p`` with multiplicities.

    Returns ``(root, multiplicity)`` pairs sorted by (Re, Im). Exact zero
    roots (vanishing low coefficients) are split off before iterating.
    Raises NonConvergence if the residual at some root is not below
    ``tol`` relative to the coefficient scale.
    """
    if p.is_zero:
        raise ValueError("zero polynomial has no finite root set")
    coeffs = list(p.coeffs)
    out: list[tuple[complex, int]] = []
    k0 = 0
    while coeffs[k0] == 0:
        k0 += 1
    if k0:
        out.append((0j, k0))
    c = np.array(coeffs[k0:], dtype=complex)
    if len(c) > 1:
        z, ok = _aberth(c)
        q = ComplexPoly(tuple(c))
        for group in _cluster(z, tol):
            m = len(group)
            r = complex(np.mean(z[group]))
            r = _polish(q, r, m)
            out.append((r, m))
        for r, m in out:
            if r == 0 and k0:
                continue
            if not _residual_ok(q, r, m, tol):
                raise NonConvergence(
                    f"root finder residual too large at {r} (multiplicity {m})"
                    + ("" if ok else "; iteration cap reached")
                )
    return sorted(out, key=lambda t: (t[0].real, t[0].imag))


def _polish(p: ComplexPoly, r: complex, m: int, steps: int = 4) -> complex:
    """Newton on the (m-1)-th derivative, where an m-fold root is simple."""
    d = p
    for _ in range(m - 1):
        d = d.derivative()
    dd = d.derivative()
    for _ in range(steps):
        den = dd(r)
        if den == 0:
            break
        step = d(r) / den
        if not cmath.isfinite(step) or abs(step) > 1e-3 * max(1.0, abs(r)):
            break
        new = r - step
        if abs(d(new)) > abs(d(r)):
            break
        r = new
    return r


def _residual_ok(p: ComplexPoly, r: complex, m: int, tol: float) -> bool:
    mag = sum(abs(a) * abs(r) ** k for k, a in enumerate(p.coeffs))
    # floor for roots at the rounding level of the coefficient vector
    floor = 1e-15 * sum(abs(a) for a in p.coeffs) * max(1.0, abs(r)) ** p.degree
    return abs(p(r)) <= tol * max(mag, floor)


# --------------------------------------------------------------------------
# rational maps


@dataclass(frozen=True)
class RationalMap:
    """Quotient ``num/den`` with coprime factors and monic denominator.

    Use :meth:`create` to build one from arbitrary polynomials: it cancels
    approximate common roots and normalizes the denominator.
    """

    num: ComplexPoly
    den: ComplexPoly
    tol: float = field(default=DEFAULT_ROOT_TOL, compare=False)

    @classmethod
    def create(cls, num, den=(1,), tol: float = DEFAULT_ROOT_TOL) -> "RationalMap":
        num = num if isinstance(num, ComplexPoly) else ComplexPoly(tuple(num))
        den = den if isinstance(den, ComplexPoly) else ComplexPoly(tuple(den))
        if den.is_zero:
            raise ValueError("denominator is the zero polynomial")
        if not num.is_zero and num.degree > 0 and den.degree > 0:
            num, den = _cancel_common(num, den, tol)
        lead = den.leading
        return cls(num * (1 / lead), den * (1 / lead), tol)

    @classmethod
    def from_divisor(cls, scale: complex, zeros: Sequence[tuple[complex, int]],
                     poles: Sequence[tuple[complex, int]]) -> "RationalMap":
        num = ComplexPoly.from_roots([z for z, m in zeros for _ in range(m)], scale)
        den = ComplexPoly.from_roots([p for p, m in poles for _ in range(m)])
        return cls(num, den)

    def __call__(self, z: complex) -> complex:
        return self.num(z) / self.den(z)

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @cached_property
    def num_roots(self) -> list[tuple[complex, int]]:
        return roots(self.num, self.tol) if self.num.degree > 0 else []

    @cached_property
    def den_roots(self) -> list[tuple[complex, int]]:
        return roots(self.den, self.tol) if self.den.degree > 0 else []

    @property
    def degree_difference(self) -> int:
        """``deg num - deg den``."""
        return self.num.degree - self.den.degree

    def scaled(self, c: complex) -> "RationalMap":
        return RationalMap(self.num * complex(c), self.den, self.tol)

    def leading_at(self, p: complex, order: int) -> complex:
        """Coefficient of ``(z-p)**order`` in the Laurent expansion at finite ``p``."""
        num, den = self.num, self.den
        if order > 0:
            for _ in range(order):
                num = num.deflate(p)
        elif order < 0:
            for _ in range(-order):
                den = den.deflate(p)
        return num(p) / den(p)


def _cancel_common(num: ComplexPoly, den: ComplexPoly, tol: float):
    nr = roots(num, tol)
    dr = roots(den, tol)
    for r, m in nr:
        for s, k in dr:
            if abs(r - s) <= math.sqrt(tol) * max(1.0, abs(r)):
                c = min(m, k)
                for _ in range(c):
                    num = num.deflate(r)
                    den = den.deflate(s)
    return num, den


def order_at(f: RationalMap, p: SpherePoint, tol: float = DEFAULT_ROOT_TOL) -> int:
    """Vanishing order of ``f`` at ``p`` (negative at poles)."""
    if f.is_zero:
        raise ValueError("order of the zero function is undefined")
    if p.is_infinity:
        return -f.degree_difference
    z = p.value
    radius = math.sqrt(tol) * max(1.0, abs(z))
    n = sum(m for r, m in f.num_roots if abs(r - z) <= radius)
    d = sum(m for r, m in f.den_roots if abs(r - z) <= radius)
    return n - d

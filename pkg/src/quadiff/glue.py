"""Flat surfaces glued from standard strips.

A standard strip of period ``w`` (``Im w > 0``) is the band
``0 <= Im z <= Im w`` with marked points at ``-w/2`` (bottom) and ``w/2``
(top) after centring. Each marked point splits its boundary line into two
rays: BL/BR on the bottom, TL/TR on the top. A gluing scheme pairs the 4N
rays and groups the 2N marked points into cone points; all of it is
combinatorial, so any period vector in the upper half-plane can be put in
the slots.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

from .errors import InvalidPeriods, InvalidScheme
from .periods import period_vector
from .strips import StripDecomposition

RAYS = ("BL", "BR", "TL", "TR")
# rays leaving a marked point counter-clockwise first / last, per side
_FIRST = {"B": "BR", "T": "TL"}
_LAST = {"B": "BL", "T": "TR"}


@dataclass(frozen=True)
class StandardStrip:
    id: int
    w: complex

    def __post_init__(self):
        if not self.w.imag > 0:
            raise InvalidPeriods(f"strip {self.id}: period {self.w} is not in the upper half-plane")

    @property
    def marked_points(self) -> tuple[complex, complex]:
        return (-self.w / 2, self.w / 2)


@dataclass(frozen=True)
class GluingScheme:
    n_strips: int
    ray_pairing: tuple  # ((strip, ray), (strip, ray)) unordered pairs, canonical order
    marked_orbits: tuple  # triples of (strip, "B" | "T") in counter-clockwise order

    @classmethod
    def create(cls, n_strips: int, pairs, orbits) -> "GluingScheme":
        canon = sorted(tuple(sorted((tuple(a), tuple(b)))) for a, b in pairs)
        orbs = []
        for orb in orbits:
            orb = [tuple(x) for x in orb]
            i = orb.index(min(orb))  # rotate, keeping the cyclic order
            orbs.append(tuple(orb[i:] + orb[:i]))
        return cls(n_strips, tuple(canon), tuple(sorted(orbs)))

    def to_json(self) -> dict:
        return {
            "strips": list(range(self.n_strips)),
            "ray_pairing": [[list(a), list(b)] for a, b in self.ray_pairing],
            "marked_orbits": [[list(x) for x in orb] for orb in self.marked_orbits],
        }

    @classmethod
    def from_json(cls, rec: dict) -> "GluingScheme":
        try:
            n = len(rec["strips"])
            pairs = [(tuple(a), tuple(b)) for a, b in rec["ray_pairing"]]
            orbits = [[tuple(x) for x in orb] for orb in rec["marked_orbits"]]
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidScheme(f"malformed gluing scheme: {e}") from e
        return cls.create(n, pairs, orbits)

    def partner(self) -> dict:
        out = {}
        for a, b in self.ray_pairing:
            out[a] = b
            out[b] = a
        return out

    def pole_cycles(self) -> list[list[tuple]]:
        """Classes of rays that run into the same pole.

        Paired rays go to the same pole, and so do the two rays at the same
        end (left or right) of a strip.
        """
        parent = {}

        def find(x):
            parent.setdefault(x, x)
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(x, y):
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[max(rx, ry)] = min(rx, ry)

        for s in range(self.n_strips):
            for r in RAYS:
                find((s, r))
            union((s, "BL"), (s, "TL"))
            union((s, "BR"), (s, "TR"))
        for a, b in self.ray_pairing:
            union(a, b)
        groups: dict = {}
        for x in sorted(parent):
            groups.setdefault(find(x), []).append(x)
        return [groups[k] for k in sorted(groups)]

    def validate(self) -> None:
        n = self.n_strips
        if n <= 0:
            raise InvalidScheme("a scheme needs at least one strip")
        rays = sorted((s, r) for s in range(n) for r in RAYS)
        used = sorted(x for pair in self.ray_pairing for x in pair)
        if used != rays:
            raise InvalidScheme("every ray must be paired exactly once")
        if any(a == b for a, b in self.ray_pairing):
            raise InvalidScheme("a ray cannot be glued to itself")
        marks = sorted((s, side) for s in range(n) for side in "BT")
        seen = sorted(x for orb in self.marked_orbits for x in orb)
        if seen != marks:
            raise InvalidScheme("marked orbits must partition the 2N marked points")
        if any(len(orb) != 3 for orb in self.marked_orbits):
            raise InvalidScheme("every marked orbit must have size 3 (a simple zero)")
        partner = self.partner()
        for orb in self.marked_orbits:
            for i in range(3):
                (s0, e0), (s1, e1) = orb[i], orb[(i + 1) % 3]
                if partner[(s0, _LAST[e0])] != (s1, _FIRST[e1]):
                    raise InvalidScheme(
                        f"rays around the cone point {orb} are not glued consecutively")
        if not self.pole_cycles():
            raise InvalidScheme("no pole cycles")


@dataclass
class GluedSurface:
    scheme: GluingScheme
    strips: list
    invariants: dict = field(default_factory=dict)

    @property
    def V(self) -> list[complex]:
        return [s.w for s in self.strips]


def _euler(scheme: GluingScheme) -> dict:
    Z = len(scheme.marked_orbits)
    P = len(scheme.pole_cycles())
    N = scheme.n_strips
    chi = Z + P - N
    if chi % 2 or chi > 2:
        raise InvalidScheme(f"Euler characteristic {chi} is not that of a closed surface")
    return {"genus": (2 - chi) // 2, "zeros": Z, "poles": P, "N": N,
            "euler_characteristic": chi}


def build_surface(scheme: GluingScheme, V: Sequence[complex]) -> GluedSurface:
    """Put the periods ``V`` into the strip slots of ``scheme``."""
    scheme.validate()
    V = [complex(v) for v in V]
    if len(V) != scheme.n_strips:
        raise InvalidPeriods(f"{len(V)} periods for {scheme.n_strips} strips")
    bad = [i for i, v in enumerate(V) if not v.imag > 0]
    if bad:
        raise InvalidPeriods(f"periods {bad} are not in the upper half-plane")
    strips = [StandardStrip(i, v) for i, v in enumerate(V)]
    return GluedSurface(scheme, strips, _euler(scheme))


def extract_scheme(dec: StripDecomposition, periods: Sequence[complex] | None = None
                   ) -> tuple[GluingScheme, list[complex]]:
    """Gluing scheme and period vector of an analytic strip decomposition."""
    label = {}
    for strip in dec.strips:
        for ray, side in strip.sides.items():
            label[side] = (strip.id, ray)
    pairs = []
    for (z, j) in sorted(dec.separatrices):
        pairs.append((label[(z, j, "L")], label[(z, j, "R")]))
    orbits = []
    for zero in dec.phi.zeros:
        orb = []
        for k in range(3):
            strip, where = dec.strip_of_sector((zero.index, k))
            orb.append((strip.id, "B" if where == "bottom" else "T"))
        orbits.append(orb)
    V = list(period_vector(dec) if periods is None else periods)
    return GluingScheme.create(dec.N, pairs, orbits), V


def read_periods(surface: GluedSurface) -> list[complex]:
    return list(surface.V)


def period_error(surface: GluedSurface, V: Sequence[complex]) -> float:
    return max((abs(a - complex(b)) for a, b in zip(read_periods(surface), V)), default=0.0)


def roundtrip_periods(dec: StripDecomposition, V: Sequence[complex] | None = None) -> float:
    """Extract, rebuild and re-read; returns the largest period discrepancy."""
    scheme, V0 = extract_scheme(dec, V)
    surface = build_surface(scheme, V0)
    return period_error(surface, V0)


# -- serialization ----------------------------------------------------------


def scheme_record(scheme: GluingScheme, V: Sequence[complex]) -> dict:
    rec = scheme.to_json()
    rec["periods"] = [[complex(v).real, complex(v).imag] for v in V]
    return rec


def dumps(scheme: GluingScheme, V: Sequence[complex]) -> str:
    return json.dumps(scheme_record(scheme, V), indent=1, sort_keys=True)


def loads(text: str) -> tuple[GluingScheme, list[complex]]:
    rec = json.loads(text)
    scheme = GluingScheme.from_json(rec)
    try:
        V = [complex(re, im) for re, im in rec.get("periods", [])]
    except (TypeError, ValueError) as e:
        raise InvalidScheme(f"malformed period list: {e}") from e
    return scheme, V

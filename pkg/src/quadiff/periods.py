"""Hat-homology numerology, strip periods and the crossing pairing."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .differential import hat_rank
from .errors import DegeneratePeriod, InconsistentDivisor
from .flow import primitive_along
from .geometry import polyline_intersections
from .strips import StripDecomposition


@dataclass(frozen=True)
class CoverNumerology:
    g: int
    branch_count: int
    cover_genus: int
    crit_inf_count: int
    rank_h1_punctured_cover: int
    rank_h1_punctured_base: int
    N: int

    def to_json(self) -> dict:
        return dict(self.__dict__)


def cover_numerology(g: int, polar_type: Sequence[int], simple_pole_count: int,
                     zero_count: int) -> CoverNumerology:
    """Genus and homology ranks of the double cover branched at odd critical points.

    All zeros are taken to be simple. Note the punctured ranks use the
    "k punctures add k - 1" rule literally, so with no infinite critical
    points each is one short; their difference is unaffected.
    """
    pt = list(polar_type)
    m = len(pt)
    s = simple_pole_count
    if g < 0 or zero_count < 0 or any(p < 1 for p in pt):
        raise InconsistentDivisor("genus, zero count and pole orders must be nonnegative")
    if s != pt.count(1):
        raise InconsistentDivisor(f"{s} simple poles declared, polar type has {pt.count(1)}")
    if zero_count - sum(pt) != 4 * g - 4:
        raise InconsistentDivisor(
            f"{zero_count} simple zeros and poles {sorted(pt)} do not have degree 4g-4 = {4 * g - 4}")
    odd_poles = sum(1 for p in pt if p % 2)
    even_poles = m - odd_poles
    branch = zero_count + odd_poles
    cover_genus = (2 * (2 * g - 2) + branch + 2) // 2
    crit_inf = m + even_poles - s
    rank_cover = 2 * cover_genus + (crit_inf - 1)
    rank_base = 2 * g + m - s - 1
    return CoverNumerology(g, branch, cover_genus, crit_inf, rank_cover, rank_base,
                           rank_cover - rank_base)


def numerology_of(dec_or_phi, g: int = 0) -> CoverNumerology:
    phi = getattr(dec_or_phi, "phi", dec_or_phi)
    pt = phi.polar_type
    return cover_numerology(g, pt, list(pt).count(1), len(phi.zeros))


@dataclass(frozen=True)
class SaddleClass:
    strip_id: int
    period: complex

    def to_json(self) -> dict:
        return {"strip": self.strip_id, "re": self.period.real, "im": self.period.imag}


def strip_period(dec: StripDecomposition, strip_id: int, path: str = "crossing") -> SaddleClass:
    """Period of the standard saddle class of a strip.

    ``path="crossing"`` integrates along the saddle connection,
    ``path="alternate"`` along the vertical / witness / vertical route;
    the two are homotopic inside the strip.
    """
    strip = dec.strips[strip_id]
    poly = strip.crossing_path if path == "crossing" else strip.alt_path
    w, _ = primitive_along(dec.phi, poly, refine_endpoints=True,
                           delta_path=dec.controls.delta_zero)
    if abs(w.imag) < dec.controls.eps_saddle:
        raise DegeneratePeriod(f"strip {strip_id} has period {w} on the real axis")
    if w.imag < 0:
        w = -w
    return SaddleClass(strip_id, w)


def period_vector(dec: StripDecomposition) -> list[complex]:
    return [strip_period(dec, s.id).period for s in dec.strips]


def periods_to_json(dec: StripDecomposition, vector: Sequence[complex] | None = None) -> list:
    vector = period_vector(dec) if vector is None else vector
    return [{"strip": i, "re": w.real, "im": w.imag} for i, w in enumerate(vector)]


def crossing_pairing(dec: StripDecomposition, i: int, j: int) -> int:
    """Number of crossings of strip ``i``'s witness with strip ``j``'s saddle connection."""
    wit = dec.strips[i].generic_witness.points
    path = np.asarray(dec.strips[j].crossing_path)
    return len(polyline_intersections(wit, path))


def pairing_matrix(dec: StripDecomposition) -> np.ndarray:
    n = dec.N
    return np.array([[crossing_pairing(dec, i, j) for j in range(n)] for i in range(n)],
                    dtype=int)


def rank_three_ways(dec: StripDecomposition) -> tuple[int, int, int]:
    """N from the closed formula, from the cover ranks, and from counting strips."""
    phi = dec.phi
    return hat_rank(0, phi.polar_type), numerology_of(phi).N, dec.N

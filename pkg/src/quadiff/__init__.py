"""Meromorphic quadratic differentials on the Riemann sphere.

Trajectory foliations, separatrices, horizontal strip decompositions, WKB
triangulations, periods, and flat surfaces glued from standard strips.
"""
from .differential import (QuadraticDifferential, differential_from_record, divisor_of,
                           hat_rank, holomorphic_quadratic_dimension, validate_gmn)
from .flow import ToleranceSet, TrajectorySample, primitive_along, trace
from .glue import build_surface, extract_scheme, roundtrip_periods
from .local_models import critical_directions, double_pole_residue, model_primitive
from .periods import cover_numerology, crossing_pairing, period_vector, strip_period
from .rational import ComplexPoly, RationalMap, SpherePoint, order_at, roots
from .separatrix import scan_saddle_phases, separatrices
from .strips import decompose, wkb_triangulation

__version__ = "0.1.0"

__all__ = [
    "ComplexPoly", "RationalMap", "SpherePoint", "roots", "order_at",
    "QuadraticDifferential", "differential_from_record", "divisor_of", "validate_gmn",
    "hat_rank", "holomorphic_quadratic_dimension",
    "critical_directions", "model_primitive", "double_pole_residue",
    "ToleranceSet", "TrajectorySample", "trace", "primitive_along",
    "separatrices", "scan_saddle_phases",
    "decompose", "wkb_triangulation",
    "cover_numerology", "strip_period", "period_vector", "crossing_pairing",
    "extract_scheme", "build_surface", "roundtrip_periods",
]

"""Refraction billiards between a harmonic outer field and a Keplerian inner field."""

from .errors import NumericalError, ParameterError
from .model import BoundaryCurve, EllipseBoundary, PerturbedEllipse, PhysParams, homothetic_directions, make_curve
from .outer import outer_arc
from .inner import inner_arc
from .refraction import refract_inward, refract_outward
from .return_map import (
    BoundaryState,
    find_brake_orbits,
    first_return,
    free_fall_delta,
    iterate_orbit,
    map_jacobian,
    refine_periodic_orbit,
)
from .stability import Classification, stability_report, stability_report_elliptic
from .scan import bifurcation_root, delta_sign_grid, phase_portrait

__all__ = [
    "BoundaryCurve", "BoundaryState", "Classification", "EllipseBoundary", "NumericalError",
    "ParameterError", "PerturbedEllipse", "PhysParams", "bifurcation_root", "delta_sign_grid",
    "find_brake_orbits", "first_return", "free_fall_delta", "homothetic_directions", "inner_arc",
    "iterate_orbit", "make_curve", "map_jacobian", "outer_arc", "phase_portrait", "refine_periodic_orbit",
    "refract_inward", "refract_outward", "stability_report", "stability_report_elliptic",
]

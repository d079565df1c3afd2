"""Generalized Snell law at the interface.

Angles leaving ``D`` are measured from the outward normal, angles entering
``D`` from the inward normal.  Both lie in ``[-pi/2, pi/2]`` and are positive
when the velocity has a nonnegative component along the unit tangent.  The
conserved quantity across the interface is ``sqrt(V) * sin(angle)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .model import BoundaryFrame, PhysParams, potential_at


@dataclass(frozen=True)
class TotalReflection:
    """Outcome of an inner velocity that cannot leave ``D``.

    ``sin_ratio`` is ``sqrt(V_I/V_E) * sin(alpha_I)``, whose modulus exceeds one.
    """

    sin_ratio: float
    xi: float
    point: np.ndarray = field(repr=False)


def boundary_potentials(p: PhysParams, frame: BoundaryFrame) -> tuple[float, float]:
    """``(V_I, V_E)`` at the frame position."""
    return potential_at(p, frame.position, "inner"), potential_at(p, frame.position, "outer")


def _check_angle(a: float) -> None:
    if not (abs(a) <= math.pi / 2 + 1e-15):
        raise ParameterError(f"incidence angle must lie in [-pi/2, pi/2], got {a!r}")


def critical_angle(p: PhysParams, frame: BoundaryFrame) -> float:
    """Largest inner incidence angle that still refracts outwards."""
    vi, ve = boundary_potentials(p, frame)
    return math.asin(math.sqrt(ve / vi))


def refract_inward(p: PhysParams, frame: BoundaryFrame, alpha_E: float) -> float:
    _check_angle(alpha_E)
    vi, ve = boundary_potentials(p, frame)
    return math.asin(math.sqrt(ve / vi) * math.sin(alpha_E))


def refract_outward(p: PhysParams, frame: BoundaryFrame, alpha_I: float):
    """Outer angle, or :class:`TotalReflection` beyond the critical angle."""
    _check_angle(alpha_I)
    vi, ve = boundary_potentials(p, frame)
    if ve == 0.0:
        ratio = math.copysign(math.inf, alpha_I) if alpha_I != 0.0 else 0.0
    else:
        ratio = math.sqrt(vi / ve) * math.sin(alpha_I)
    if abs(ratio) > 1.0:
        return TotalReflection(sin_ratio=ratio, xi=frame.xi, point=frame.position.copy())
    return math.asin(ratio)


def tangential_momentum(potential: float, angle: float) -> float:
    """``sqrt(V) * sin(angle)``, the quantity preserved by refraction."""
    return math.sqrt(potential) * math.sin(angle)

"""Harmonic arcs outside the domain.

At zero total energy the outer motion is ``y(s) = y0 cos(ws) + (v0/w) sin(ws)``,
so arcs are evaluated in closed form and the only numerical work is locating
the first return to the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import CrossingNotBracketed, OutsideHill, TangentialLaunch
from .model import BoundaryCurve, PhysParams, boundary_frame, potential_at, wrap_xi

N_GRID = 2048


@dataclass(frozen=True)
class OuterArc:
    """One outer arc from ``start_xi`` to ``end_xi``.

    ``end_angle`` is the arrival angle measured from the inward normal at the
    end point, i.e. the angle handed to :func:`refract_inward`.
    """

    omega: float
    y0: np.ndarray = field(repr=False)
    v0: np.ndarray = field(repr=False)
    start_xi: float
    start_angle: float
    flight_time: float
    end_xi: float
    end_angle: float

    def position(self, s):
        s = np.asarray(s, dtype=float)
        w = self.omega
        return np.multiply.outer(self.y0, np.cos(w * s)) + np.multiply.outer(self.v0 / w, np.sin(w * s))

    def velocity(self, s):
        s = np.asarray(s, dtype=float)
        w = self.omega
        return np.multiply.outer(-w * self.y0, np.sin(w * s)) + np.multiply.outer(self.v0, np.cos(w * s))

    @property
    def end_position(self) -> np.ndarray:
        return self.position(self.flight_time)

    @property
    def end_velocity(self) -> np.ndarray:
        return self.velocity(self.flight_time)


def launch_velocity(speed: float, frame, alpha: float) -> np.ndarray:
    """Velocity at angle ``alpha`` from the outward normal."""
    return speed * (math.cos(alpha) * frame.outward_normal_unit + math.sin(alpha) * frame.tangent_unit)


def first_crossing(g, span: float, n_grid: int, entering_negative: bool, what: str) -> float:
    """Smallest ``s`` in ``(0, span]`` where ``g`` changes sign.

    With ``entering_negative`` the crossing goes from positive to nonpositive,
    otherwise from negative to nonnegative.
    """
    grid = np.linspace(0.0, span, n_grid + 1)
    sign = 1.0 if entering_negative else -1.0
    values = sign * g(grid)

    def f(s):
        return sign * float(g(s))

    for j in range(1, len(grid)):
        if values[j] > 0.0:
            continue
        lo, hi = grid[j - 1], grid[j]
        if values[j] == 0.0:
            return float(hi)
        if j == 1:
            # the start point sits on the curve; look for positive values just after it
            lo = hi
            while f(lo) <= 0.0:
                lo *= 0.5
                if lo < 1e-10:
                    raise CrossingNotBracketed(f"{what}: the arc does not leave the boundary")
        return brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    raise CrossingNotBracketed(f"{what}: no boundary crossing found in (0, {span!r}]")


def outer_arc(p: PhysParams, curve: BoundaryCurve, xi0: float, alpha0: float) -> OuterArc:
    if abs(alpha0) >= math.pi / 2 - 1e-9:
        raise TangentialLaunch(f"outer launch angle {alpha0!r} is tangential")
    frame = boundary_frame(curve, xi0)
    ve = potential_at(p, frame.position, "outer")
    if ve <= 0.0:
        raise OutsideHill("launch point lies on the Hill boundary")
    v0 = launch_velocity(math.sqrt(2.0 * ve), frame, alpha0)
    y0 = frame.position
    w = p.omega
    period = 2.0 * math.pi / w

    def g(s):
        s = np.asarray(s, dtype=float)
        pts = np.multiply.outer(y0, np.cos(w * s)) + np.multiply.outer(v0 / w, np.sin(w * s))
        return curve.level(pts)

    try:
        t_end = first_crossing(g, period, N_GRID, entering_negative=True, what="outer arc")
    except CrossingNotBracketed:
        # exact-period grazing: the arc only comes back at its launch point
        if abs(float(g(period))) < 1e-11:
            t_end = period
        else:
            raise
    y1 = y0 * math.cos(w * t_end) + v0 / w * math.sin(w * t_end)
    v1 = -w * y0 * math.sin(w * t_end) + v0 * math.cos(w * t_end)
    xi1 = wrap_xi(curve.invert(y1))
    f1 = boundary_frame(curve, xi1)
    vhat = v1 / np.linalg.norm(v1)
    end_angle = math.atan2(float(vhat @ f1.tangent_unit), float(-(vhat @ f1.outward_normal_unit)))
    return OuterArc(
        omega=w, y0=y0, v0=v0, start_xi=float(xi0), start_angle=float(alpha0),
        flight_time=float(t_end), end_xi=xi1, end_angle=end_angle,
    )


def outer_homothetic(p: PhysParams, rho: float) -> tuple[float, float]:
    """``(half_time, launch_speed)`` of the radial outer arc at radius ``rho``."""
    ve = p.v_outer(rho)
    if rho <= 0.0 or ve < 0.0:
        raise OutsideHill(f"radius {rho!r} is not inside the Hill region")
    x = min(1.0, p.omega * rho / math.sqrt(2.0 * p.energy))
    return math.acos(x) / p.omega, math.sqrt(2.0 * ve)

"""Keplerian arcs inside the domain through Levi-Civita regularization.

With ``z = w**2`` and ``ds/dtau = 2|z|`` the zero-energy inner motion becomes
the inverted oscillator ``w'' = Omega**2 w`` with ``Omega = sqrt(2(E + h))``
and regularized energy ``|w'|**2/2 - Omega**2 |w|**2/2 = mu``.  Arcs through
the attracting centre need no special handling in this picture.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CrossingNotBracketed, CurveInversionFailure, TangentialEntry
from .model import BoundaryCurve, BoundaryFrame, PhysParams, boundary_frame, potential_at, wrap_xi
from .outer import first_crossing

N_GRID = 2048
COLLISION_RADIUS = 1e-8


@dataclass(frozen=True)
class LCParams:
    Omega: float
    lc_energy: float

    @classmethod
    def from_params(cls, p: PhysParams) -> "LCParams":
        return cls(Omega=math.sqrt(2.0 * (p.energy + p.h)), lc_energy=p.mu)


@dataclass(frozen=True)
class LCState:
    """Regularized position ``w`` and its derivative in Levi-Civita time."""

    w: complex
    w_dot: complex

    def energy(self, Omega: float) -> float:
        return 0.5 * abs(self.w_dot) ** 2 - 0.5 * Omega**2 * abs(self.w) ** 2

    def physical(self) -> tuple[complex, complex]:
        """Physical position and velocity (derivative in physical time)."""
        w, wd = self.w, self.w_dot
        return w * w, w * wd / abs(w) ** 2


def propagate(state0: LCState, Omega: float, tau):
    """Closed-form flow of the inverted oscillator; works on arrays of ``tau``."""
    tau = np.asarray(tau, dtype=float)
    ch, sh = np.cosh(Omega * tau), np.sinh(Omega * tau)
    w = state0.w * ch + state0.w_dot / Omega * sh
    wd = state0.w * Omega * sh + state0.w_dot * ch
    return w, wd


def lc_forward(p: PhysParams, frame: BoundaryFrame, alpha_in: float) -> LCState:
    """Regularized initial data for an inner arc entering at ``alpha_in``.

    ``alpha_in`` is measured from the inward normal.  The negative square root
    determination is used for the starting point.
    """
    if abs(alpha_in) >= math.pi / 2 - 1e-9:
        raise TangentialEntry(f"entry angle {alpha_in!r} is tangential")
    rho, theta = frame.radius, frame.polar_angle
    w0 = -math.sqrt(rho) * complex(math.cos(theta / 2), math.sin(theta / 2))
    speed = math.sqrt(2.0 * potential_at(p, frame.position, "inner"))
    v = speed * (-math.cos(alpha_in) * frame.outward_normal_unit + math.sin(alpha_in) * frame.tangent_unit)
    return LCState(w=w0, w_dot=complex(v[0], v[1]) * w0.conjugate())


def lc_span(p: PhysParams, curve: BoundaryCurve) -> float:
    """Levi-Civita time span that contains the exit of every inner arc."""
    lc = LCParams.from_params(p)
    reach = max(2.0 * curve.max_radius, math.sqrt(curve.max_radius))
    return 4.0 * math.asinh(lc.Omega * reach / math.sqrt(2.0 * p.mu)) / lc.Omega


def lc_arc(p: PhysParams, curve: BoundaryCurve, state0: LCState) -> tuple[LCState, float]:
    """Propagate to the first exit through the boundary; returns ``(exit, tau)``."""
    Omega = LCParams.from_params(p).Omega

    def g(tau):
        w, _ = propagate(state0, Omega, tau)
        z = w * w
        return curve.level(np.array([z.real, z.imag]))

    span = lc_span(p, curve)
    for _ in range(6):
        try:
            tau = first_crossing(g, span, N_GRID, entering_negative=False, what="inner arc")
            break
        except CrossingNotBracketed:
            span *= 2.0
    else:
        raise CrossingNotBracketed("inner arc: no exit found")
    w, wd = propagate(state0, Omega, tau)
    return LCState(w=complex(w), w_dot=complex(wd)), float(tau)


def lc_backward(p: PhysParams, curve: BoundaryCurve, exit_state: LCState) -> tuple[float, float]:
    """``(xi1, beta1)``: exit parameter and exit angle from the outward normal."""
    z, zd = exit_state.physical()
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise CurveInversionFailure("non-finite exit point")
    xi1 = wrap_xi(curve.invert((z.real, z.imag)))
    frame = boundary_frame(curve, xi1)
    if abs(math.hypot(z.real, z.imag) - frame.radius) > 1e-8 * max(1.0, frame.radius):
        raise CurveInversionFailure(f"exit point {z!r} is not on the boundary")
    v = np.array([zd.real, zd.imag])
    beta1 = math.atan2(float(v @ frame.tangent_unit), float(v @ frame.outward_normal_unit))
    return xi1, beta1


def _time_coefficients(state0: LCState, Omega: float) -> tuple[float, float, float]:
    """``|w(tau)|**2 = A + B cosh(2 Omega tau) + C sinh(2 Omega tau)``."""
    a2 = abs(state0.w) ** 2
    d2 = abs(state0.w_dot) ** 2 / Omega**2
    cross = (state0.w * state0.w_dot.conjugate()).real / Omega
    return 0.5 * (a2 - d2), 0.5 * (a2 + d2), cross


def physical_time(state0: LCState, Omega: float, tau):
    """Physical time ``s(tau) = 2 * integral of |w|**2``."""
    A, B, C = _time_coefficients(state0, Omega)
    x = 2.0 * Omega * np.asarray(tau, dtype=float)
    return 2.0 * (A * np.asarray(tau) + (B * np.sinh(x) + C * (np.cosh(x) - 1.0)) / (2.0 * Omega))


def min_lc_radius(state0: LCState, Omega: float, tau_end: float) -> float:
    """Minimum of ``|w|`` over ``[0, tau_end]``."""
    _, B, C = _time_coefficients(state0, Omega)
    candidates = [abs(state0.w), float(np.abs(propagate(state0, Omega, tau_end)[0]))]
    if abs(C) < B:
        tau_star = math.atanh(-C / B) / (2.0 * Omega)
        if 0.0 < tau_star < tau_end:
            # evaluating w itself avoids the cancellation in A + sqrt(B^2 - C^2)
            candidates.append(float(np.abs(propagate(state0, Omega, tau_star)[0])))
    return min(candidates)


@dataclass(frozen=True)
class InnerArc:
    """One inner arc.

    ``start_angle`` is measured from the inward normal at entry, ``end_angle``
    from the outward normal at exit (the angle handed to
    :func:`refract_outward`).
    """

    start_xi: float
    start_angle: float
    end_xi: float
    end_angle: float
    lc_flight_time: float
    physical_flight_time: float
    collision_flag: bool
    min_radius: float
    Omega: float
    start_state: LCState
    end_state: LCState

    def lc_states(self, tau):
        return propagate(self.start_state, self.Omega, tau)

    def physical_times(self, tau):
        return physical_time(self.start_state, self.Omega, tau)


def inner_arc(p: PhysParams, curve: BoundaryCurve, xi0: float, alpha_in: float) -> InnerArc:
    frame = boundary_frame(curve, xi0)
    state0 = lc_forward(p, frame, alpha_in)
    exit_state, tau = lc_arc(p, curve, state0)
    xi1, beta1 = lc_backward(p, curve, exit_state)
    Omega = LCParams.from_params(p).Omega
    min_w = min_lc_radius(state0, Omega, tau)
    return InnerArc(
        start_xi=float(xi0),
        start_angle=float(alpha_in),
        end_xi=xi1,
        end_angle=beta1,
        lc_flight_time=tau,
        physical_flight_time=float(physical_time(state0, Omega, tau)),
        collision_flag=min_w < COLLISION_RADIUS,
        min_radius=min_w**2,
        Omega=Omega,
        start_state=state0,
        end_state=exit_state,
    )

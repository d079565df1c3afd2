"""First return map, orbit iteration, free-fall map and brake orbits.

A phase point is a boundary parameter ``xi`` together with the launch angle
``alpha`` of the outgoing velocity, measured from the outward normal.  One
application of the map flies an outer arc, refracts inwards, flies an inner
arc and refracts outwards again.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, least_squares

from .errors import NumericalError, RadialTangency, TangencyError
from .inner import InnerArc, inner_arc
from .model import (
    BoundaryCurve,
    PhysParams,
    boundary_frame,
    homothetic_directions,
    radial_transversality,
    wrap_angle,
    wrap_xi,
)
from .outer import OuterArc, outer_arc
from .refraction import TotalReflection, refract_inward, refract_outward

HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class BoundaryState:
    xi: float
    alpha: float

    def as_array(self) -> np.ndarray:
        return np.array([self.xi, self.alpha])


@dataclass(frozen=True)
class ReturnTrace:
    """Every intermediate quantity of one application of the map."""

    start: BoundaryState
    outer: OuterArc
    alpha_in: float
    inner: InnerArc
    result: object  # BoundaryState or TotalReflection


def first_return_trace(p: PhysParams, curve: BoundaryCurve, state: BoundaryState) -> ReturnTrace:
    outer = outer_arc(p, curve, state.xi, state.alpha)
    alpha_in = refract_inward(p, boundary_frame(curve, outer.end_xi), outer.end_angle)
    inner = inner_arc(p, curve, outer.end_xi, alpha_in)
    out = refract_outward(p, boundary_frame(curve, inner.end_xi), inner.end_angle)
    result = out if isinstance(out, TotalReflection) else BoundaryState(inner.end_xi, out)
    return ReturnTrace(start=state, outer=outer, alpha_in=alpha_in, inner=inner, result=result)


def first_return(p: PhysParams, curve: BoundaryCurve, state: BoundaryState):
    """Next launch state, or :class:`TotalReflection` when the exit is blocked."""
    return first_return_trace(p, curve, state).result


def apply_map(p: PhysParams, curve: BoundaryCurve, x, n: int = 1) -> np.ndarray:
    """``n`` applications of the map to an array ``(xi, alpha)``.

    Leaving the domain of the map (tangency or total reflection) raises
    :class:`NumericalError`, so iterative solvers see a single failure channel.
    """
    state = BoundaryState(float(x[0]), float(x[1]))
    for _ in range(n):
        nxt = first_return(p, curve, state)
        if isinstance(nxt, TotalReflection):
            raise NumericalError(f"total reflection at xi = {nxt.xi!r}")
        state = nxt
    return state.as_array()


@dataclass(frozen=True)
class OrbitRecord:
    """Consecutive states of one orbit and the reason iteration stopped.

    ``termination`` is one of ``completed``, ``total_reflection``,
    ``tangency`` or ``error``.
    """

    states: tuple
    termination: str
    outer_times: tuple = ()
    inner_times: tuple = ()
    detail: str = ""


def iterate_orbit(p: PhysParams, curve: BoundaryCurve, state0: BoundaryState, n_iters: int) -> OrbitRecord:
    states = [state0]
    outer_times, inner_times = [], []
    termination, detail = "completed", ""
    state = state0
    for _ in range(n_iters):
        try:
            trace = first_return_trace(p, curve, state)
        except TangencyError as exc:
            termination, detail = "tangency", str(exc)
            break
        except (NumericalError, ValueError) as exc:
            termination, detail = "error", f"{type(exc).__name__}: {exc}"
            break
        outer_times.append(trace.outer.flight_time)
        inner_times.append(trace.inner.physical_flight_time)
        if isinstance(trace.result, TotalReflection):
            termination = "total_reflection"
            detail = f"sin ratio {trace.result.sin_ratio!r} at xi = {trace.result.xi!r}"
            break
        state = trace.result
        states.append(state)
    return OrbitRecord(
        states=tuple(states), termination=termination,
        outer_times=tuple(outer_times), inner_times=tuple(inner_times), detail=detail,
    )


def map_jacobian(p: PhysParams, curve: BoundaryCurve, state: BoundaryState, step: float = 1e-6, n: int = 1) -> np.ndarray:
    """Central finite-difference Jacobian of ``n`` applications of the map."""
    x = state.as_array()
    jac = np.empty((2, 2))
    for j in range(2):
        dx = np.zeros(2)
        dx[j] = step
        fp = apply_map(p, curve, x + dx, n)
        fm = apply_map(p, curve, x - dx, n)
        diff = fp - fm
        diff[0] = wrap_angle(diff[0])
        jac[:, j] = diff / (2.0 * step)
    return jac


def area_density(p: PhysParams, curve: BoundaryCurve, state: BoundaryState) -> float:
    """Density of the invariant area form ``sqrt(V_E) |gamma'| cos(alpha) dxi dalpha``.

    In the canonical pair (arc length, ``sqrt(V_E) sin(alpha)``) the map has unit
    Jacobian determinant, so in ``(xi, alpha)`` the determinant at ``x`` equals
    ``area_density(x) / area_density(F(x))``.
    """
    f = boundary_frame(curve, state.xi)
    return math.sqrt(p.v_outer(f.radius)) * f.speed * math.cos(state.alpha)


# --- Periodic orbits ---


@dataclass(frozen=True)
class PeriodicOrbit:
    state: BoundaryState
    period: int
    residual: float
    converged: bool
    iterations: int


def _displacement(p, curve, x, period):
    y = apply_map(p, curve, x, period)
    d = y - x
    d[0] = wrap_angle(d[0])
    return d


def refine_periodic_orbit(
    p: PhysParams,
    curve: BoundaryCurve,
    state: BoundaryState,
    period: int,
    tol: float = 1e-11,
    max_iter: int = 40,
    step: float = 1e-7,
) -> PeriodicOrbit:
    """Damped Newton on ``F**period(x) - x`` with a finite-difference Jacobian.

    If Newton stalls, a trust-region least-squares solve takes over.
    """
    x = state.as_array().astype(float)
    try:
        d = _displacement(p, curve, x, period)
    except (NumericalError, ValueError):
        return PeriodicOrbit(state, period, math.inf, False, 0)
    it = 0
    for it in range(1, max_iter + 1):
        res = float(np.max(np.abs(d)))
        if res < tol:
            break
        jac = np.empty((2, 2))
        try:
            for j in range(2):
                dx = np.zeros(2)
                dx[j] = step
                jac[:, j] = (_displacement(p, curve, x + dx, period) - _displacement(p, curve, x - dx, period)) / (2 * step)
            delta = np.linalg.solve(jac, -d)
        except (NumericalError, ValueError, np.linalg.LinAlgError):
            break
        lam = 1.0
        improved = False
        while lam > 1e-4:
            trial = x + lam * delta
            try:
                dt = _displacement(p, curve, trial, period)
            except (NumericalError, ValueError):
                lam *= 0.5
                continue
            if np.max(np.abs(dt)) < res:
                x, d, improved = trial, dt, True
                break
            lam *= 0.5
        if not improved:
            break
    res = float(np.max(np.abs(d)))
    if res >= tol:
        def fun(v):
            try:
                return _displacement(p, curve, v, period)
            except (NumericalError, ValueError):
                return np.full(2, 10.0)

        sol = least_squares(fun, x, xtol=1e-15, ftol=1e-15, gtol=1e-15, diff_step=1e-8)
        if np.max(np.abs(sol.fun)) < res:
            x, res = sol.x, float(np.max(np.abs(sol.fun)))
    final = BoundaryState(wrap_xi(float(x[0])), float(x[1]))
    return PeriodicOrbit(final, period, res, res < max(tol, 1e-9), it)


# --- Free fall ---


@dataclass(frozen=True)
class FreeFallSample:
    theta: float
    delta: float
    clamped: bool


def radial_launch_angle(curve: BoundaryCurve, xi: float) -> float:
    """Launch angle (from the outward normal) of the radially outgoing direction."""
    f = boundary_frame(curve, xi)
    r = f.position / f.radius
    return math.atan2(float(r @ f.tangent_unit), float(r @ f.outward_normal_unit))


def _signed_angle(u: np.ndarray, v: np.ndarray) -> float:
    """Angle turning ``u`` into ``v``, counter-clockwise positive."""
    return math.atan2(u[0] * v[1] - u[1] * v[0], u[0] * v[0] + u[1] * v[1])


def free_fall_delta(p: PhysParams, curve: BoundaryCurve, theta: float) -> FreeFallSample:
    """Deflection from the radial direction after one free fall from angle ``theta``.

    The particle leaves the boundary point on the ``theta`` ray radially,
    comes back along the same ray, crosses ``D`` and is refracted out; ``delta``
    is the angle from the refracted velocity to the outward radius at the exit
    point, counter-clockwise positive.  Total reflection clamps to ``+-pi/2``.
    """
    xi = curve.xi_from_angle(theta)
    if radial_transversality(curve, xi) < 1e-9:
        raise RadialTangency(f"the ray at theta = {theta!r} is tangent to the boundary")
    f0 = boundary_frame(curve, xi)
    r0 = f0.position / f0.radius
    # the radial outer arc returns along -r0
    alpha_arrival = math.atan2(float(-r0 @ f0.tangent_unit), float(r0 @ f0.outward_normal_unit))
    alpha_in = refract_inward(p, f0, alpha_arrival)
    arc = inner_arc(p, curve, xi, alpha_in)
    f1 = boundary_frame(curve, arc.end_xi)
    out = refract_outward(p, f1, arc.end_angle)
    if isinstance(out, TotalReflection):
        # a velocity along +t (counter-clockwise) lies clockwise of the radius
        sign = -math.copysign(1.0, out.sin_ratio)
        return FreeFallSample(float(theta), sign * HALF_PI, True)
    v = math.cos(out) * f1.outward_normal_unit + math.sin(out) * f1.tangent_unit
    delta = _signed_angle(v, f1.position / f1.radius)
    return FreeFallSample(float(theta), delta, abs(delta) >= HALF_PI)


def brake_state(curve: BoundaryCurve, theta: float) -> BoundaryState:
    """Radial launch state on the ``theta`` ray."""
    xi = curve.xi_from_angle(theta)
    return BoundaryState(xi, radial_launch_angle(curve, xi))


@dataclass(frozen=True)
class BrakeOrbit:
    theta: float
    delta: float
    closure: float
    states: tuple = field(default=())


def find_brake_orbits(
    p: PhysParams,
    curve: BoundaryCurve,
    grid_n: int = 200,
    interval: tuple = (0.0, HALF_PI),
    closure_tol: float = 1e-6,
) -> list:
    """Zeros of the free-fall map that close into 2-periodic brake orbits.

    The grid excludes the interval endpoints.  Roots sitting where the exit
    crosses the boundary orthogonally (homothetic points) are discarded, and
    so is an identically vanishing map.
    """
    lo, hi = interval
    thetas = lo + (hi - lo) * np.arange(1, grid_n + 1) / (grid_n + 1)

    def delta(t):
        return free_fall_delta(p, curve, t).delta

    values = np.array([delta(t) for t in thetas])
    if np.max(np.abs(values)) < 1e-9:
        return []
    roots = []
    for j in range(len(thetas)):
        if values[j] == 0.0:
            roots.append(float(thetas[j]))
        elif j + 1 < len(thetas) and values[j] * values[j + 1] < 0.0:
            roots.append(brentq(delta, thetas[j], thetas[j + 1], xtol=1e-12, rtol=1e-15))
    found = []
    homothetic = _homothetic_angles(curve)
    for theta in roots:
        if abs(delta(theta)) > 1e-9:
            continue  # a jump between clamped branches, not a zero
        if any(abs(wrap_angle(theta - h)) < 1e-7 for h in homothetic):
            continue
        s0 = brake_state(curve, theta)
        try:
            s1 = apply_map(p, curve, s0.as_array(), 1)
            s2 = apply_map(p, curve, s1, 1)
        except (NumericalError, ValueError):
            continue
        gap = s2 - s0.as_array()
        gap[0] = wrap_angle(gap[0])
        closure = float(np.max(np.abs(gap)))
        if closure < closure_tol:
            found.append(BrakeOrbit(theta, delta(theta), closure, (s0, BoundaryState(*s1))))
    return found


def _homothetic_angles(curve: BoundaryCurve) -> list:
    hd = homothetic_directions(curve)
    if hd.continuum:
        return []
    return [float(curve.polar_angle(x)) for x in hd.xis]

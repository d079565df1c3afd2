"""Linear stability of homothetic fixed points.

A homothetic point ``(xi_bar, 0)`` is a fixed point of the return map.  The
second derivatives of the outer and inner generating functions there split
into a circular part and a curvature perturbation,

    E0 = E / (2 rho sqrt(V_E)),      eps_E = (rho k - 1) sqrt(V_E) / rho,
    I0 = -mu / (4 rho^2 sqrt(V_I)),  eps_I = -(k - 1/rho) sqrt(V_I),

which feed a closed-form Jacobian ``DF``.  These quantities refer to an
arc-length parametrization; :func:`to_parameter_coordinates` moves ``DF`` to
the curve's own parameter ``xi``, which is what the simulator differentiates.
The discriminant ``Delta = A B C D`` equals ``trace(DF)**2 - 4``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateQuadruple, NotHomothetic
from .model import BoundaryCurve, BoundaryFrame, EllipseBoundary, PhysParams, boundary_frame

AXES = (0, 1)


def _axis(which) -> int:
    if which in (0, "0", "axis0"):
        return 0
    if which in (1, "1", "axis1"):
        return 1
    raise ValueError(f"axis must be 0 or 1, got {which!r}")


@dataclass(frozen=True)
class DerivQuadruple:
    E0: float
    eps_E: float
    I0: float
    eps_I: float

    def scaled(self, c: float) -> "DerivQuadruple":
        return DerivQuadruple(c * self.E0, c * self.eps_E, c * self.I0, c * self.eps_I)


class Classification(str, enum.Enum):
    CENTER = "center"
    SADDLE = "saddle"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class DeltaFactors:
    A: float
    B: float
    C: float
    D: float

    @property
    def value(self) -> float:
        return self.A * self.B * self.C * self.D

    @property
    def tolerance(self) -> float:
        return 1e-10 * max(1.0, abs(self.A), abs(self.B), abs(self.C), abs(self.D))


@dataclass(frozen=True)
class StabilityReport:
    """Everything known about one homothetic fixed point.

    ``DF`` is the arc-length Jacobian of the printed closed form; ``DF_xi`` is
    the same map written in the boundary parameter.
    """

    xi: float
    quadruple: DerivQuadruple
    DF: np.ndarray
    DF_xi: np.ndarray
    trace: float
    det: float
    Delta: float
    factors: DeltaFactors
    classification: Classification


def _sqrt_potentials(p: PhysParams, rho: float) -> tuple[float, float]:
    ve = p.v_outer(rho)
    if ve <= 0.0:
        raise NotHomothetic(f"radius {rho!r} is not inside the Hill region")
    return math.sqrt(ve), math.sqrt(p.v_inner(rho))


def _check_homothetic(frame: BoundaryFrame, tol: float = 1e-8) -> None:
    cos = abs(float(frame.position @ frame.tangent_unit)) / frame.radius
    if cos > tol:
        raise NotHomothetic(f"radius is not orthogonal to the tangent at xi = {frame.xi!r} (cos = {cos:.3e})")


# --- Quadruples ---


def quadruple_from_geometry(p: PhysParams, rho: float, k: float) -> DerivQuadruple:
    sE, sI = _sqrt_potentials(p, rho)
    return DerivQuadruple(
        E0=p.energy / (2.0 * rho * sE),
        eps_E=(rho * k - 1.0) * sE / rho,
        I0=-p.mu / (4.0 * rho**2 * sI),
        eps_I=-(k - 1.0 / rho) * sI,
    )


def quadruple_general(p: PhysParams, frame: BoundaryFrame) -> DerivQuadruple:
    """Arc-length quadruple at a homothetic boundary point."""
    _check_homothetic(frame)
    return quadruple_from_geometry(p, frame.radius, frame.curvature)


def quadruple_elliptic(p: PhysParams, e: float, which) -> DerivQuadruple:
    """Quadruple on the axes of the ellipse ``(cos xi, b sin xi)``.

    These refer to the parameter ``xi`` itself, so on the major axis they are
    the arc-length values times ``|gamma'|**2 = b**2``; on the minor axis
    ``|gamma'| = 1`` and the two agree.
    """
    e2 = e * e
    b = math.sqrt(1.0 - e2)
    if _axis(which) == 0:
        sE, sI = _sqrt_potentials(p, 1.0)
        return DerivQuadruple(
            E0=(1.0 - e2) * p.energy / (2.0 * sE),
            eps_E=e2 * sE,
            I0=-(1.0 - e2) * p.mu / (4.0 * sI),
            eps_I=-e2 * sI,
        )
    sE, sI = _sqrt_potentials(p, b)
    return DerivQuadruple(
        E0=p.energy / (2.0 * b * sE),
        eps_E=-e2 / b * sE,
        I0=-p.mu / (4.0 * (1.0 - e2) * sI),
        eps_I=e2 / b * sI,
    )


def ellipse_axis_frame(e: float, which) -> BoundaryFrame:
    return boundary_frame(EllipseBoundary(e), 0.0 if _axis(which) == 0 else 0.5 * math.pi)


# --- Jacobian ---


def jacobian_DF(q: DerivQuadruple, VE_at_point: float) -> np.ndarray:
    """Closed-form Jacobian of the return map at a homothetic point."""
    E0, eE, I0, eI = q.E0, q.eps_E, q.I0, q.eps_I
    if not (math.isfinite(E0 * I0) and E0 * I0 != 0.0):
        raise DegenerateQuadruple(f"E0 * I0 must be finite and nonzero, got {E0 * I0!r}")
    s = math.sqrt(VE_at_point)
    a11 = 1.0 + (2.0 * eE + eI) / I0 + eE * (eE + eI + I0) / (E0 * I0)
    a12 = s * (1.0 / I0 + 1.0 / E0) + s * (eE + eI) / (E0 * I0)
    a21 = (2.0 * eE * (eI + I0) + eI * (eI + 2.0 * I0)) / (I0 * s) + eE * (
        eE * (eI + I0) + eI * (eI + 2.0 * I0)
    ) / (E0 * I0 * s)
    a22 = 1.0 + eE / E0 + eI * (2.0 * I0 + eI + E0 + eE) / (E0 * I0)
    return np.array([[a11, a12], [a21, a22]])


def to_parameter_coordinates(DF: np.ndarray, speed: float) -> np.ndarray:
    """Rewrite an arc-length Jacobian in a parameter with ``|gamma'| = speed``."""
    return np.array([[DF[0, 0], DF[0, 1] / speed], [DF[1, 0] * speed, DF[1, 1]]])


# --- Discriminants ---


def delta_factors_general(p: PhysParams, rho: float, k: float) -> DeltaFactors:
    sE, sI = _sqrt_potentials(p, rho)
    E, mu = p.energy, p.mu
    kk = rho * k - 1.0
    A = 16.0 / (E**2 * mu**2) * (sI - sE) * kk
    B = E - kk * (sI - sE) * sE
    C = -mu * sE + 2.0 * rho * B * sI
    D = mu + 2.0 * rho * kk * sI * (sI - sE)
    return DeltaFactors(A, B, C, D)


def discriminant_general(p: PhysParams, frame: BoundaryFrame) -> float:
    _check_homothetic(frame)
    return delta_factors_general(p, frame.radius, frame.curvature).value


def delta_factors_elliptic(p: PhysParams, e: float, which) -> DeltaFactors:
    E, mu = p.energy, p.mu
    e2 = e * e
    b = math.sqrt(1.0 - e2)
    if _axis(which) == 0:
        sE, sI = _sqrt_potentials(p, 1.0)
        r = e2 / (1.0 - e2)
        A = -16.0 / (E**2 * mu**2) * r * (sE - sI)
        B = mu + 2.0 * r * sI * (sI - sE)
        C = E + r * sE * (sE - sI)
        D = -mu * sE + 2.0 * sI * C
    else:
        sE, sI = _sqrt_potentials(p, b)
        A = 16.0 * e2 / (E**2 * mu**2) * (sE - sI)
        B = mu - 2.0 * e2 * b * sI * (sI - sE)
        C = E - e2 * sE * (sE - sI)
        D = -mu * sE + 2.0 * b * sI * C
    return DeltaFactors(A, B, C, D)


def discriminant_elliptic(p: PhysParams, e: float, which) -> float:
    """Closed-form discriminant on the major (0) or minor (1) axis of the ellipse."""
    return delta_factors_elliptic(p, e, which).value


def classify(delta: float, factors: DeltaFactors | None = None) -> Classification:
    tol = factors.tolerance if factors is not None else 1e-10
    if abs(delta) < tol:
        return Classification.DEGENERATE
    return Classification.CENTER if delta < 0.0 else Classification.SADDLE


def stability_report(p: PhysParams, curve: BoundaryCurve, xi: float) -> StabilityReport:
    """Closed-form stability of the homothetic point at ``xi``."""
    frame = boundary_frame(curve, xi)
    q = quadruple_general(p, frame)
    ve = p.v_outer(frame.radius)
    DF = jacobian_DF(q, ve)
    factors = delta_factors_general(p, frame.radius, frame.curvature)
    return StabilityReport(
        xi=float(xi),
        quadruple=q,
        DF=DF,
        DF_xi=to_parameter_coordinates(DF, frame.speed),
        trace=float(np.trace(DF)),
        det=float(np.linalg.det(DF)),
        Delta=factors.value,
        factors=factors,
        classification=classify(factors.value, factors),
    )


def stability_report_elliptic(p: PhysParams, e: float, which) -> StabilityReport:
    """Like :func:`stability_report` but with the elliptic closed forms.

    ``quadruple`` holds the parameter-based elliptic values and ``Delta`` the
    elliptic discriminant; ``DF`` is built from the arc-length quadruple.
    """
    axis = _axis(which)
    frame = ellipse_axis_frame(e, axis)
    rep = stability_report(p, EllipseBoundary(e), frame.xi)
    factors = delta_factors_elliptic(p, e, axis)
    return StabilityReport(
        xi=frame.xi,
        quadruple=quadruple_elliptic(p, e, axis),
        DF=rep.DF,
        DF_xi=rep.DF_xi,
        trace=rep.trace,
        det=rep.det,
        Delta=factors.value,
        factors=factors,
        classification=classify(factors.value, factors),
    )


# --- Small eccentricity and asymptotics ---


def _sE_sI_circle(p: PhysParams) -> tuple[float, float]:
    return math.sqrt(p.energy - 0.5 * p.omega**2), math.sqrt(p.energy + p.h + p.mu)


def small_e_coefficients(p: PhysParams) -> tuple[float, float]:
    """``(f2, g2)`` with ``Delta0 = f2 e^2 + O(e^4)`` and ``Delta1 = g2 e^2 + O(e^4)``.

    The expansion of the axis discriminants gives
    ``f2 = -16 (sE - sI)(2 E sI - mu sE) / (mu E)`` with ``sE, sI`` the root
    potentials on the unit circle, and ``g2 = -f2``.
    """
    sE, sI = _sE_sI_circle(p)
    f2 = -16.0 * (sE - sI) * (2.0 * p.energy * sI - p.mu * sE) / (p.mu * p.energy)
    return f2, -f2


def small_e_coefficient(p: PhysParams) -> float:
    return small_e_coefficients(p)[0]


def small_e_coefficient_printed(p: PhysParams) -> float:
    """``f2`` with prefactor -4, a quarter of the true limit of ``Delta0 / e^2``."""
    sE, sI = _sE_sI_circle(p)
    return -4.0 * (sE - sI) * (2.0 * p.energy * sI - p.mu * sE) / (p.mu * p.energy)


def small_e_regime(p: PhysParams) -> str:
    """``"Ia"`` (major axis stable) or ``"Ib"`` (minor axis stable) for small e."""
    lhs = math.sqrt(p.energy + p.h + p.mu) / p.mu
    rhs = math.sqrt(2.0 * p.energy - p.omega**2) / (2.0 * math.sqrt(2.0) * p.energy)
    if lhs == rhs:
        return "boundary"
    return "Ia" if lhs < rhs else "Ib"


def parabola_h(E: float, omega: float, mu):
    """``h = p(mu)``: the curve where ``f2`` vanishes in the ``(mu, h)`` plane."""
    return (2.0 * E - omega**2) / (8.0 * E**2) * np.asarray(mu) ** 2 - np.asarray(mu) - E


def ell0(b: float, h: float, mu: float, omega: float) -> float:
    """Limit of the major-axis discriminant as ``E -> infinity``."""
    w2 = omega**2
    c = b * b - 1.0
    return 4.0 * c * (2 * h + 2 * mu + w2) * (2 * c * h - 2 * mu + c * w2) / (b**4 * mu**2)


def ell1(b: float, h: float, mu: float, omega: float) -> float:
    """Limit of the minor-axis discriminant as ``E -> infinity``."""
    w2 = omega**2
    c = b * b - 1.0
    return 4.0 * b * c * (2 * b * h + 2 * mu + b**3 * w2) * (2 * c * h + b * (2 * mu + b * c * w2)) / mu**2


def mu_doublebar(b: float, h: float, omega: float) -> float:
    """``ell1 > 0`` exactly when ``mu`` is below this value."""
    return (1.0 - b * b) * (2.0 * h + b * b * omega**2) / (2.0 * b)


def mu_bar_brake(E: float, omega: float, e: float) -> float:
    e2 = e * e
    return e2 * (1.0 - e2) ** 1.5 * (2.0 * E - e2 * omega**2) / (2.0 * e2 - 1.0) ** 2


def h_bar_brake(E: float, omega: float, mu: float, e: float) -> float:
    """Threshold on ``h`` for brake orbits near the minor axis.

    The whole expression, radical included, carries the overall factor 1/4;
    this is the grouping under which it coincides with the root of the
    minor-axis discriminant.
    """
    e2 = e * e
    s = math.sqrt(1.0 - e2)
    w2 = omega**2
    linear = -2.0 * E - (4.0 * e2 - 2.0) * mu / (e2 * s) - (1.0 - e2) * w2
    radical = math.sqrt((2.0 * E - (1.0 - e2) * w2) * (4.0 * mu - e2 * s * ((1.0 - e2) * w2 - 2.0 * E)) / (e2 * s))
    return 0.25 * (linear + radical)


def h_bar_brake_literal(E: float, omega: float, mu: float, e: float) -> float:
    """The same threshold with the 1/4 applied to the linear part only."""
    e2 = e * e
    s = math.sqrt(1.0 - e2)
    w2 = omega**2
    linear = -2.0 * E - (4.0 * e2 - 2.0) * mu / (e2 * s) - (1.0 - e2) * w2
    radical = math.sqrt((2.0 * E - (1.0 - e2) * w2) * (4.0 * mu - e2 * s * ((1.0 - e2) * w2 - 2.0 * E)) / (e2 * s))
    return 0.25 * linear + radical


@dataclass(frozen=True)
class RegimeThresholds:
    parabola_h: float | None
    ell0: float | None
    ell1: float | None
    mu_bar_brake: float | None
    h_bar_brake: float | None
    mu_doublebar: float | None


def regime_thresholds(E=None, omega=None, h=None, mu=None, e=None) -> RegimeThresholds:
    """Every threshold computable from the supplied subset of parameters."""
    b = math.sqrt(1.0 - e * e) if e is not None else None
    have = lambda *xs: all(x is not None for x in xs)  # noqa: E731
    return RegimeThresholds(
        parabola_h=float(parabola_h(E, omega, mu)) if have(E, omega, mu) else None,
        ell0=ell0(b, h, mu, omega) if have(b, h, mu, omega) and b > 0 else None,
        ell1=ell1(b, h, mu, omega) if have(b, h, mu, omega) and b > 0 else None,
        mu_bar_brake=mu_bar_brake(E, omega, e) if have(E, omega, e) and 0 < e < 1 and 2 * e * e != 1 else None,
        h_bar_brake=h_bar_brake(E, omega, mu, e) if have(E, omega, mu, e) and 0 < e < 1 else None,
        mu_doublebar=mu_doublebar(b, h, omega) if have(b, h, omega) and b > 0 else None,
    )


# --- Convexity for hyperbolae ---


class ConvexityVerdict(str, enum.Enum):
    CERTIFIED_TRUE = "certified_true"
    CONDITION_TRUE = "condition_true"
    UNKNOWN = "unknown"


def convexity_for_hyperbolae(p: PhysParams, e: float) -> ConvexityVerdict:
    """Whether every inner Keplerian hyperbola meets the ellipse at most twice.

    Certified for ``e < 1/sqrt(2)``; otherwise the curvature bound
    ``2 b^2 ((E + h) b / mu + 1) > 1`` is checked.
    """
    if e < 1.0 / math.sqrt(2.0):
        return ConvexityVerdict.CERTIFIED_TRUE
    b = math.sqrt(1.0 - e * e)
    if 2.0 * b * b * ((p.energy + p.h) * b / p.mu + 1.0) > 1.0:
        return ConvexityVerdict.CONDITION_TRUE
    return ConvexityVerdict.UNKNOWN


def hyperbola_points(p: PhysParams, ell: float, axis_angle: float, n: int = 20001) -> np.ndarray:
    """Sample the attractive branch of a Keplerian hyperbola with inner energy.

    ``ell`` is the angular momentum and ``axis_angle`` the direction of the
    pericentre.  Returns an array of shape ``(2, m)``.
    """
    energy = p.energy + p.h
    if ell == 0.0:
        t = np.linspace(-4.0, 4.0, n)
        u = np.array([math.cos(axis_angle), math.sin(axis_angle)])
        return np.outer(u, t)
    semi_latus = ell**2 / p.mu
    ecc = math.sqrt(1.0 + 2.0 * energy * ell**2 / p.mu**2)
    phi_max = math.acos(-1.0 / ecc)
    phi = np.linspace(-phi_max, phi_max, n + 2)[1:-1]
    r = semi_latus / (1.0 + ecc * np.cos(phi))
    return np.array([r * np.cos(phi + axis_angle), r * np.sin(phi + axis_angle)])


def count_hyperbola_intersections(p: PhysParams, e: float, ell: float, axis_angle: float, n: int = 20001) -> int:
    """Brute-force count of crossings between a hyperbola and the ellipse."""
    pts = hyperbola_points(p, ell, axis_angle, n)
    g = EllipseBoundary(e).level(pts)
    s = np.sign(g)
    s = s[s != 0.0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


# --- Brake-orbit derivatives ---


def _minor_axis_brake_inputs(p: PhysParams, e: float):
    b = math.sqrt(1.0 - e * e)
    q = quadruple_elliptic(p, e, 1)
    return b, math.sqrt(p.v_outer(b)), q.I0, q.eps_I


def delta_prime_half_pi(p: PhysParams, e: float) -> float:
    b, sE, I0, eI = _minor_axis_brake_inputs(p, e)
    return -(sE * b * b + eI * b - sE) * (sE * b * b + (2.0 * I0 + eI) * b - sE) / (b * I0 * sE)


def delta_prime_zero(p: PhysParams, e: float) -> float:
    """Slope of the free-fall map at the major axis.

    ``4 e^2 (sI - sE)(b^2 mu / 2 + e^2 sI (sI - sE)) / (b^4 mu sE)`` with
    ``sE, sI`` the root potentials at ``(1, 0)``.
    """
    e2 = e * e
    b2 = 1.0 - e2
    sE, sI = _sE_sI_circle(p)
    return 4.0 * e2 * (sI - sE) * (0.5 * b2 * p.mu + e2 * sI * (sI - sE)) / (b2 * b2 * p.mu * sE)


def delta_prime_zero_printed(p: PhysParams, e: float) -> float:
    """Alternative slope at the major axis built from the parameter-based quadruple; about 1.6% off."""
    b = math.sqrt(1.0 - e * e)
    q = quadruple_elliptic(p, e, 0)
    sE = math.sqrt(p.v_outer(1.0))
    I0, eI = q.I0, q.eps_I
    return (sE + eI * b - sE * b * b) * (sE * b * b - (2.0 * I0 + eI) * b - sE) / (b * I0 * sE)


def brake_derivatives(p: PhysParams, e: float) -> tuple[float, float]:
    """``(delta'(0), delta'(pi/2))`` of the free-fall map of the ellipse."""
    return delta_prime_zero(p, e), delta_prime_half_pi(p, e)


def brake_det_M(p: PhysParams, e: float) -> float:
    """Determinant of the implicit-function matrix behind ``delta'(pi/2)``."""
    b = math.sqrt(1.0 - e * e)
    return p.mu / (4.0 * b**3 * math.sqrt(p.energy + p.h + p.mu / b)) * math.sqrt(p.energy - 0.5 * p.omega**2 * b * b)

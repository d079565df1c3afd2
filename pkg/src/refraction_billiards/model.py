"""Physical parameters, boundary curves and the two potentials.

The plane is split by a closed star-shaped curve into a bounded domain ``D``
containing the origin (Keplerian attraction) and its complement (harmonic
oscillator).  Everything here is a pure function of immutable inputs.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import brentq

from .errors import (
    DegenerateVelocity,
    HillViolation,
    NonPositiveParameter,
    OriginSingularity,
    OutsideHill,
    ParameterError,
)

TWO_PI = 2.0 * math.pi


def wrap_angle(a):
    """Map an angle (or array of angles) to ``[-pi, pi)``."""
    return (np.asarray(a) + math.pi) % TWO_PI - math.pi if np.ndim(a) else (a + math.pi) % TWO_PI - math.pi


def wrap_xi(xi: float) -> float:
    """Reduce a boundary parameter to ``[0, 2 pi)``."""
    r = xi % TWO_PI
    return 0.0 if r == TWO_PI else r


# --- Physical parameters ---


@dataclass(frozen=True)
class PhysParams:
    """The four physical constants.

    ``energy`` is the reference energy E, ``omega`` the harmonic frequency
    (never its square), ``h`` the inner energy offset and ``mu`` the
    Keplerian mass parameter.  Construction validates the invariants.
    """

    energy: float
    omega: float
    h: float
    mu: float

    def __post_init__(self):
        validate_params(self)

    @property
    def hill_radius(self) -> float:
        return math.sqrt(2.0 * self.energy) / self.omega

    def v_inner(self, r):
        """Inner potential as a function of the radius."""
        return self.energy + self.h + self.mu / r

    def v_outer(self, r):
        """Outer potential as a function of the radius."""
        return self.energy - 0.5 * self.omega**2 * r * r

    def replace(self, **changes) -> "PhysParams":
        values = dict(energy=self.energy, omega=self.omega, h=self.h, mu=self.mu)
        values.update(changes)
        return PhysParams(**values)


def validate_params(p) -> None:
    """Raise unless ``p`` holds admissible parameters.

    All four values must be finite and strictly positive and ``2 E > omega**2``
    so that the unit circle lies inside the Hill region.
    """
    for name in ("energy", "omega", "h", "mu"):
        value = getattr(p, name)
        try:
            value = float(value)
        except (TypeError, ValueError) as exc:
            raise ParameterError(f"{name} must be a real number, got {value!r}") from exc
        if not math.isfinite(value) or value <= 0.0:
            raise NonPositiveParameter(f"{name} must be finite and > 0, got {value!r}")
    if 2.0 * p.energy <= p.omega**2:
        raise HillViolation(
            f"2E = {2.0 * p.energy!r} must exceed omega**2 = {p.omega**2!r}"
        )


def potential_at(p: PhysParams, z, region: str) -> float:
    """Evaluate the inner (``region="inner"``) or outer potential at ``z``."""
    r = math.hypot(float(z[0]), float(z[1]))
    if region == "inner":
        if r == 0.0:
            raise OriginSingularity("inner potential is singular at the origin")
        return p.v_inner(r)
    if region == "outer":
        value = p.v_outer(r)
        if value < 0.0:
            # the Hill boundary itself is admissible up to rounding
            if value > -1e-12 * p.energy:
                return 0.0
            raise OutsideHill(f"|z| = {r!r} exceeds the Hill radius {p.hill_radius!r}")
        return value
    raise ValueError(f"region must be 'inner' or 'outer', got {region!r}")


# --- Boundary curves ---


class BoundaryCurve(ABC):
    """A closed C2 curve, counter-clockwise, star-shaped about the origin.

    Subclasses provide ``point``, ``velocity`` and ``acceleration``; each takes
    a scalar or an array of parameters and returns an array of shape
    ``(2,) + np.shape(xi)``.  Polar inversion and the implicit level function
    have generic implementations (Newton on the polar angle) that subclasses
    may replace with closed forms.
    """

    n_table: int = 4096

    @abstractmethod
    def point(self, xi): ...

    @abstractmethod
    def velocity(self, xi): ...

    @abstractmethod
    def acceleration(self, xi): ...

    @cached_property
    def _polar_table(self):
        xi = np.linspace(0.0, TWO_PI, self.n_table + 1)
        x, y = self.point(xi)
        theta = np.unwrap(np.arctan2(y, x))
        if not np.all(np.diff(theta) > 0.0):
            raise ParameterError("boundary must be counter-clockwise and star-shaped about the origin")
        if not math.isclose(theta[-1] - theta[0], TWO_PI, rel_tol=1e-9):
            raise ParameterError("the origin must lie strictly inside the boundary")
        return xi, theta, np.hypot(x, y)

    @property
    def max_radius(self) -> float:
        return float(self._polar_table[2].max())

    @property
    def min_radius(self) -> float:
        return float(self._polar_table[2].min())

    def polar_angle(self, xi):
        x, y = self.point(xi)
        return np.arctan2(y, x)

    def xi_from_angle(self, theta):
        """Parameter of the boundary point with polar angle ``theta``."""
        xi_t, th_t, _ = self._polar_table
        theta = np.asarray(theta, dtype=float)
        target = th_t[0] + (theta - th_t[0]) % TWO_PI
        xi = np.interp(target, th_t, xi_t)
        for _ in range(8):
            x, y = self.point(xi)
            dx, dy = self.velocity(xi)
            resid = wrap_angle(np.arctan2(y, x) - target)
            dtheta = (x * dy - y * dx) / (x * x + y * y)
            step = resid / dtheta
            xi = xi - step
            if np.all(np.abs(step) < 1e-15):
                break
        xi = np.mod(xi, TWO_PI)
        return float(xi) if xi.ndim == 0 else xi

    def radius_at_angle(self, theta):
        x, y = self.point(self.xi_from_angle(theta))
        return np.hypot(x, y)

    def level(self, z):
        """Implicit boundary function: negative in D, zero on the curve, positive outside.

        ``z`` is an array whose first axis holds the two coordinates.
        """
        z = np.asarray(z, dtype=float)
        r = np.hypot(z[0], z[1])
        return r - self.radius_at_angle(np.arctan2(z[1], z[0]))

    def invert(self, z) -> float:
        """Parameter of the boundary point closest in angle to ``z``."""
        return float(self.xi_from_angle(math.atan2(float(z[1]), float(z[0]))))

    def frame(self, xi: float) -> "BoundaryFrame":
        return boundary_frame(self, xi)


@dataclass(frozen=True)
class EllipseBoundary(BoundaryCurve):
    """Ellipse ``(cos xi, b sin xi)`` with semimajor axis 1 and ``b = sqrt(1 - e^2)``."""

    eccentricity: float = 0.0

    def __post_init__(self):
        e = self.eccentricity
        if not (0.0 <= e < 1.0):
            raise ParameterError(f"eccentricity must lie in [0, 1), got {e!r}")

    @cached_property
    def b(self) -> float:
        return math.sqrt(1.0 - self.eccentricity**2)

    def point(self, xi):
        return np.array([np.cos(xi), self.b * np.sin(xi)])

    def velocity(self, xi):
        return np.array([-np.sin(xi), self.b * np.cos(xi)])

    def acceleration(self, xi):
        return np.array([-np.cos(xi), -self.b * np.sin(xi)])

    def curvature(self, xi):
        s, c = np.sin(xi), np.cos(xi)
        return self.b / (s * s + self.b**2 * c * c) ** 1.5

    @property
    def max_radius(self) -> float:
        return 1.0

    @property
    def min_radius(self) -> float:
        return self.b

    def xi_from_angle(self, theta):
        xi = np.mod(np.arctan2(np.sin(theta), self.b * np.cos(theta)), TWO_PI)
        return float(xi) if np.ndim(xi) == 0 else xi

    def level(self, z):
        z = np.asarray(z, dtype=float)
        return z[0] ** 2 + (z[1] / self.b) ** 2 - 1.0


@dataclass(frozen=True)
class PerturbedEllipse(BoundaryCurve):
    """Ellipse radially scaled by ``1 + amplitude * sin(2 xi)**4``.

    The perturbation and its first two derivatives vanish on the axes and it
    keeps both reflection symmetries, so the axis points stay homothetic and
    share the ellipse's second-order geometry there.
    """

    eccentricity: float = 0.0
    amplitude: float = 0.05

    def __post_init__(self):
        if not (0.0 <= self.eccentricity < 1.0):
            raise ParameterError(f"eccentricity must lie in [0, 1), got {self.eccentricity!r}")
        if not (-0.5 < self.amplitude < 0.5):
            raise ParameterError(f"amplitude must lie in (-0.5, 0.5), got {self.amplitude!r}")

    @cached_property
    def b(self) -> float:
        return math.sqrt(1.0 - self.eccentricity**2)

    def _scale(self, xi):
        s2 = np.sin(2 * xi)
        c2 = np.cos(2 * xi)
        a = self.amplitude
        return (
            1.0 + a * s2**4,
            8.0 * a * s2**3 * c2,
            a * (48.0 * s2**2 * c2**2 - 16.0 * s2**4),
        )

    def point(self, xi):
        s, _, _ = self._scale(xi)
        return s * np.array([np.cos(xi), self.b * np.sin(xi)])

    def velocity(self, xi):
        s, ds, _ = self._scale(xi)
        e0 = np.array([np.cos(xi), self.b * np.sin(xi)])
        e1 = np.array([-np.sin(xi), self.b * np.cos(xi)])
        return ds * e0 + s * e1

    def acceleration(self, xi):
        s, ds, dds = self._scale(xi)
        e0 = np.array([np.cos(xi), self.b * np.sin(xi)])
        e1 = np.array([-np.sin(xi), self.b * np.cos(xi)])
        return dds * e0 + 2.0 * ds * e1 - s * e0


CURVES = {
    "ellipse": EllipseBoundary,
    "perturbed-ellipse": PerturbedEllipse,
}


def make_curve(name: str, **kwargs) -> BoundaryCurve:
    """Instantiate a registered boundary by name."""
    try:
        cls = CURVES[name]
    except KeyError:
        raise ParameterError(f"unknown boundary {name!r}; known: {sorted(CURVES)}") from None
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ParameterError(f"bad arguments for boundary {name!r}: {exc}") from None


# --- Frames and local geometry ---


@dataclass(frozen=True)
class BoundaryFrame:
    """Local geometry of the boundary at one parameter value.

    ``curvature`` is positive where the curve bends towards the origin side.
    """

    xi: float
    position: np.ndarray = field(repr=False)
    tangent_unit: np.ndarray = field(repr=False)
    outward_normal_unit: np.ndarray = field(repr=False)
    curvature: float
    radius: float
    polar_angle: float
    speed: float


def boundary_frame(curve: BoundaryCurve, xi: float) -> BoundaryFrame:
    xi = float(xi)
    pos = np.asarray(curve.point(xi), dtype=float)
    vel = np.asarray(curve.velocity(xi), dtype=float)
    acc = np.asarray(curve.acceleration(xi), dtype=float)
    speed = math.hypot(vel[0], vel[1])
    if speed < 1e-12:
        raise DegenerateVelocity(f"|gamma'| = {speed!r} at xi = {xi!r}")
    t = vel / speed
    n = np.array([t[1], -t[0]])
    if n @ pos < 0.0:
        n = -n
    curvature = -float(acc @ n) / speed**2
    return BoundaryFrame(
        xi=xi,
        position=pos,
        tangent_unit=t,
        outward_normal_unit=n,
        curvature=curvature,
        radius=math.hypot(pos[0], pos[1]),
        polar_angle=math.atan2(pos[1], pos[0]),
        speed=speed,
    )


def radial_transversality(curve: BoundaryCurve, xi: float) -> float:
    """Sine of the angle between ``gamma(xi)`` and ``gamma'(xi)``."""
    g = np.asarray(curve.point(xi), dtype=float)
    v = np.asarray(curve.velocity(xi), dtype=float)
    return abs(g[0] * v[1] - g[1] * v[0]) / (math.hypot(*g) * math.hypot(*v))


def _radial_cosine(curve: BoundaryCurve, xi):
    g = curve.point(xi)
    v = curve.velocity(xi)
    return (g[0] * v[0] + g[1] * v[1]) / (np.hypot(g[0], g[1]) * np.hypot(v[0], v[1]))


def _grid_roots(f, grid, values, xtol=1e-14):
    roots = []
    for j in range(len(grid) - 1):
        if values[j] == 0.0:
            roots.append(float(grid[j]))
        elif values[j] * values[j + 1] < 0.0:
            roots.append(brentq(f, grid[j], grid[j + 1], xtol=xtol))
    return roots


@dataclass(frozen=True)
class HomotheticDirections:
    """Parameters of the homothetic points.

    When ``continuum`` is true every boundary point is homothetic (the circle)
    and ``xis`` holds representative samples only.
    """

    xis: tuple
    continuum: bool = False


def _ray_is_clear(curve: BoundaryCurve, xi_bar: float, n_samples: int) -> bool:
    p = np.asarray(curve.point(xi_bar), dtype=float)

    def cross(xi):
        q = curve.point(xi)
        return p[0] * q[1] - p[1] * q[0]

    grid = np.linspace(0.0, TWO_PI, n_samples + 1)
    for root in _grid_roots(cross, grid, cross(grid)):
        q = np.asarray(curve.point(root))
        if p @ q <= 0.0:
            continue
        if abs(wrap_angle(root - xi_bar)) > 1e-7:
            return False
    return True


def homothetic_directions(curve: BoundaryCurve, tol: float = 1e-10, n_samples: int = 4096) -> HomotheticDirections:
    """Boundary parameters whose radius is orthogonal to the tangent and whose
    ray from the origin meets the boundary only once."""
    grid = np.linspace(0.0, TWO_PI, n_samples + 1)
    values = _radial_cosine(curve, grid)
    if np.max(np.abs(values)) < tol:
        reps = tuple(float(x) for x in np.linspace(0.0, TWO_PI, 8, endpoint=False))
        return HomotheticDirections(xis=reps, continuum=True)

    candidates = []
    for root in _grid_roots(lambda x: float(_radial_cosine(curve, x)), grid, values):
        root = wrap_xi(root)
        if all(abs(wrap_angle(root - c)) > 1e-9 for c in candidates):
            candidates.append(root)
    found = [xi for xi in sorted(candidates) if _ray_is_clear(curve, xi, n_samples)]
    return HomotheticDirections(xis=tuple(found), continuum=False)

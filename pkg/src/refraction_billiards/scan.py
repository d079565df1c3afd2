"""Parameter sweeps, bifurcation roots, phase portraits and free-fall profiles.

Every work item is a pure function of its inputs, so grids are evaluated with
a bounded thread pool and collected in input order; the result never depends
on the number of threads.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import NoSignChange, ParameterError
from .model import EllipseBoundary, PhysParams
from .return_map import BoundaryState, free_fall_delta, iterate_orbit
from .stability import Classification, classify, delta_factors_elliptic

PARAM_NAMES = ("E", "omega", "h", "mu", "e")
THREADS_ENV = "REFRACTION_BILLIARDS_THREADS"


def thread_count(requested: int | None = None) -> int:
    """Pool width: the explicit request, else the environment cap, else the CPU count."""
    if requested is None:
        env = os.environ.get(THREADS_ENV)
        if env:
            try:
                requested = int(env)
            except ValueError:
                raise ParameterError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
        else:
            requested = min(8, os.cpu_count() or 1)
    if requested < 1:
        raise ParameterError(f"thread count must be >= 1, got {requested!r}")
    return requested


def ordered_map(fn, items, threads: int | None = None) -> list:
    items = list(items)
    n = thread_count(threads)
    if n == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def params_from_dict(values: dict) -> tuple[PhysParams, float]:
    """``(PhysParams, eccentricity)`` from a mapping keyed by :data:`PARAM_NAMES`."""
    missing = [k for k in PARAM_NAMES if k not in values]
    if missing:
        raise ParameterError(f"missing parameters: {missing}")
    p = PhysParams(values["E"], values["omega"], values["h"], values["mu"])
    e = float(values["e"])
    if not 0.0 <= e < 1.0:
        raise ParameterError(f"eccentricity must lie in [0, 1), got {e!r}")
    return p, e


# --- Discriminant sign grids ---


@dataclass(frozen=True)
class GridSpec:
    x_param: str
    x_range: tuple
    x_n: int
    y_param: str
    y_range: tuple
    y_n: int
    fixed: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in (self.x_param, self.y_param):
            if name not in PARAM_NAMES:
                raise ParameterError(f"unknown scan parameter {name!r}; expected one of {PARAM_NAMES}")
        if self.x_param == self.y_param:
            raise ParameterError("x_param and y_param must differ")
        if self.x_n < 2 or self.y_n < 2:
            raise ParameterError("grid resolutions must be >= 2")
        for r in (self.x_range, self.y_range):
            if len(r) != 2 or not all(math.isfinite(v) for v in r):
                raise ParameterError(f"bad range {r!r}")

    def cells(self) -> list:
        xs = np.linspace(self.x_range[0], self.x_range[1], self.x_n)
        ys = np.linspace(self.y_range[0], self.y_range[1], self.y_n)
        return [(float(x), float(y)) for y in ys for x in xs]


@dataclass(frozen=True)
class ScanCell:
    """One grid cell; signs are -1 (center), +1 (saddle), 0 (degenerate or inadmissible)."""

    x: float
    y: float
    delta0: float
    delta1: float
    sign0: int
    sign1: int
    admissible: bool


def _sign(c: Classification) -> int:
    return {Classification.CENTER: -1, Classification.SADDLE: 1, Classification.DEGENERATE: 0}[c]


def evaluate_cell(spec: GridSpec, x: float, y: float) -> ScanCell:
    values = dict(spec.fixed)
    values[spec.x_param] = x
    values[spec.y_param] = y
    try:
        p, e = params_from_dict(values)
        f0 = delta_factors_elliptic(p, e, 0)
        f1 = delta_factors_elliptic(p, e, 1)
    except ParameterError:
        return ScanCell(x, y, math.nan, math.nan, 0, 0, False)
    d0, d1 = f0.value, f1.value
    return ScanCell(x, y, d0, d1, _sign(classify(d0, f0)), _sign(classify(d1, f1)), True)


def delta_sign_grid(spec: GridSpec, threads: int | None = None) -> list:
    """Axis discriminants over the grid, rows ordered with ``x`` varying fastest."""
    return ordered_map(lambda xy: evaluate_cell(spec, *xy), spec.cells(), threads)


def bifurcation_root(fixed: dict, which_axis, scan_param: str, bracket: tuple, rtol: float = 1e-12) -> float:
    """Root of an axis discriminant in one parameter, by Brent's method."""
    if scan_param not in PARAM_NAMES:
        raise ParameterError(f"unknown scan parameter {scan_param!r}")

    def delta(v):
        values = dict(fixed)
        values[scan_param] = v
        p, e = params_from_dict(values)
        return delta_factors_elliptic(p, e, which_axis).value

    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise ParameterError(f"bracket must satisfy lo < hi, got {bracket!r}")
    flo, fhi = delta(lo), delta(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise NoSignChange(f"discriminant has the same sign at {scan_param} = {lo!r} and {hi!r}")
    return brentq(delta, lo, hi, xtol=1e-14, rtol=rtol, maxiter=500)


# --- Phase portraits ---


@dataclass(frozen=True)
class PortraitSpec:
    """Seed grid over ``[0, 2 pi) x [alpha_min, alpha_max]`` plus the model."""

    params: PhysParams
    eccentricity: float
    xi_seeds: int = 24
    alpha_seeds: int = 24
    alpha_range: tuple = (-0.6, 0.6)
    iterations: int = 500
    seeds_override: tuple | None = None

    def __post_init__(self):
        if not 0.0 <= self.eccentricity < 1.0:
            raise ParameterError(f"eccentricity must lie in [0, 1), got {self.eccentricity!r}")
        if self.iterations < 0:
            raise ParameterError("iterations must be >= 0")
        if self.seeds_override is None:
            if self.xi_seeds < 1 or self.alpha_seeds < 1:
                raise ParameterError("seed counts must be >= 1")
            lo, hi = self.alpha_range
            if not (-math.pi / 2 < lo <= hi < math.pi / 2):
                raise ParameterError(f"alpha range must lie inside (-pi/2, pi/2), got {self.alpha_range!r}")

    def seeds(self) -> list:
        if self.seeds_override is not None:
            return [BoundaryState(float(x), float(a)) for x, a in self.seeds_override]
        xis = 2.0 * math.pi * np.arange(self.xi_seeds) / self.xi_seeds
        if self.alpha_seeds == 1:
            alphas = np.array([0.5 * (self.alpha_range[0] + self.alpha_range[1])])
        else:
            alphas = np.linspace(self.alpha_range[0], self.alpha_range[1], self.alpha_seeds)
        return [BoundaryState(float(x), float(a)) for x in xis for a in alphas]


def phase_portrait(spec: PortraitSpec, threads: int | None = None, curve=None) -> list:
    """Orbits from every seed; ``curve`` overrides the ellipse of ``spec``."""
    curve = curve if curve is not None else EllipseBoundary(spec.eccentricity)
    return ordered_map(
        lambda s: iterate_orbit(spec.params, curve, s, spec.iterations), spec.seeds(), threads
    )


def freefall_profile(p: PhysParams, e: float, n_samples: int, threads: int | None = None, curve=None) -> list:
    """Free-fall map on a uniform grid over ``[0, pi/2]``."""
    if n_samples < 2:
        raise ParameterError(f"need at least 2 samples, got {n_samples!r}")
    curve = curve if curve is not None else EllipseBoundary(e)
    thetas = np.linspace(0.0, 0.5 * math.pi, n_samples)
    return ordered_map(lambda t: free_fall_delta(p, curve, float(t)), thetas, threads)


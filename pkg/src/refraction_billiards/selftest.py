"""Quick checks against reference numerical values.

Each check prints one ``PASS``/``FAIL`` line with values rounded to fixed
precision, so the output is byte-identical between runs.
"""

from __future__ import annotations

import math
import sys

import numpy as np

from .errors import HillViolation, NoSignChange, NonPositiveParameter
from .model import EllipseBoundary, PhysParams, homothetic_directions
from .return_map import BoundaryState, find_brake_orbits, first_return, free_fall_delta, iterate_orbit, refine_periodic_orbit
from .scan import bifurcation_root
from .stability import (
    Classification,
    ConvexityVerdict,
    classify,
    convexity_for_hyperbolae,
    delta_factors_elliptic,
    h_bar_brake,
    mu_bar_brake,
)

SQRT2 = math.sqrt(2.0)
BRAKE = dict(E=2.5, omega=SQRT2, mu=2.0, e=0.1)


def _params_validation():
    PhysParams(2.5, SQRT2, 0.1, 1.0)
    results = []
    for args, exc in (((1.0, 2.0, 1.0, 1.0), HillViolation), ((2.5, SQRT2, 0.0, 1.0), NonPositiveParameter)):
        try:
            PhysParams(*args)
            results.append(False)
        except exc:
            results.append(True)
    return all(results), "admissible, Hill violation and h = 0 cases"


def _homothetic_axes():
    hd = homothetic_directions(EllipseBoundary(0.3))
    expected = np.arange(4) * math.pi / 2
    ok = len(hd.xis) == 4 and np.allclose(hd.xis, expected, atol=1e-10)
    ok = ok and homothetic_directions(EllipseBoundary(0.0)).continuum
    return ok, "ellipse e=0.3 -> 4 axis points, circle -> continuum"


def _fixed_point():
    p = PhysParams(2.5, SQRT2, 0.1, 1.0)
    s = first_return(p, EllipseBoundary(0.3), BoundaryState(0.0, 0.0))
    err = max(abs(math.remainder(s.xi, 2 * math.pi)), abs(s.alpha))
    return err < 1e-10, "F(0,0) = (0,0)"


def _circle_translation():
    p = PhysParams(2.5, SQRT2, 0.1, 1.0)
    c = EllipseBoundary(0.0)
    rec = iterate_orbit(p, c, BoundaryState(0.3, 0.25), 100)
    spread = max(abs(s.alpha - 0.25) for s in rec.states)
    shifts = [math.remainder(first_return(p, c, BoundaryState(x, 0.25)).xi - x, 2 * math.pi) for x in (0.0, 1.0, 2.5)]
    ok = rec.termination == "completed" and spread < 1e-8 and max(shifts) - min(shifts) < 1e-9
    return ok, "alpha preserved over 100 iterations, xi-shift independent of xi"


def _h_bif():
    root = bifurcation_root(BRAKE, 1, "h", (50.0, 200.0))
    return abs(root - 109.091) <= 0.01, f"h_bif = {root:.3f}"


def _major_axis_saddle():
    try:
        bifurcation_root(BRAKE, 0, "h", (50.0, 200.0))
        no_root = False
    except NoSignChange:
        no_root = True
    ok = no_root
    for h in np.linspace(1.0, 200.0, 200):
        p = PhysParams(2.5, SQRT2, float(h), 2.0)
        f = delta_factors_elliptic(p, 0.1, 0)
        ok = ok and classify(f.value, f) is Classification.SADDLE
    return ok, "major axis is a saddle for h in [1, 200]"


def _thresholds():
    mb = mu_bar_brake(2.5, SQRT2, 0.1)
    hb = h_bar_brake(2.5, SQRT2, 2.0, 0.1)
    root = bifurcation_root(BRAKE, 1, "h", (50.0, 200.0))
    ok = abs(mb - 0.0511) <= 0.0005 and abs(hb - root) <= 0.05
    return ok, f"mu_bar = {mb:.4f}, h_bar = {hb:.3f}"


def _circle_degenerate():
    p = PhysParams(2.5, SQRT2, 0.1, 1.0)
    ok = all(classify(delta_factors_elliptic(p, 0.0, a).value, delta_factors_elliptic(p, 0.0, a)) is Classification.DEGENERATE for a in (0, 1))
    return ok, "Delta = 0 on the circle"


def _free_fall_axes():
    p = PhysParams(2.5, SQRT2, 120.0, 2.0)
    c = EllipseBoundary(0.1)
    worst = max(abs(free_fall_delta(p, c, t).delta) for t in (0.0, math.pi / 2, math.pi, 3 * math.pi / 2))
    return worst < 1e-10, "delta(k pi/2) = 0"


def _brake_orbits():
    c = EllipseBoundary(0.1)
    below = find_brake_orbits(PhysParams(2.5, SQRT2, 100.0, 2.0), c, grid_n=100)
    above = find_brake_orbits(PhysParams(2.5, SQRT2, 120.0, 2.0), c, grid_n=100)
    near = [b for b in below if b.theta > 1.0]
    ok = not near and len(above) >= 1 and all(b.closure < 1e-6 for b in above)
    detail = f"h=100: {len(near)} near pi/2; h=120: {len(above)} closing orbit(s)"
    return ok, detail


def _period_three():
    p = PhysParams(2.5, SQRT2, 0.1, 1.0)
    orbit = refine_periodic_orbit(p, EllipseBoundary(0.3), BoundaryState(1.047, 0.42), 3)
    return orbit.converged and orbit.residual < 1e-6, "period-3 orbit at e=0.3"


def _convexity():
    p = PhysParams(2.5, SQRT2, 0.1, 1.0)
    return convexity_for_hyperbolae(p, 0.5) is ConvexityVerdict.CERTIFIED_TRUE, "e=0.5 convex for hyperbolae"


CHECKS = (
    ("params-validation", _params_validation),
    ("homothetic-axes", _homothetic_axes),
    ("homothetic-fixed-point", _fixed_point),
    ("circle-translation", _circle_translation),
    ("circle-degenerate", _circle_degenerate),
    ("bifurcation-h", _h_bif),
    ("major-axis-saddle", _major_axis_saddle),
    ("brake-thresholds", _thresholds),
    ("free-fall-axes", _free_fall_axes),
    ("brake-orbits", _brake_orbits),
    ("period-three", _period_three),
    ("convexity-hyperbolae", _convexity),
)


def run(stream=None) -> bool:
    stream = stream or sys.stdout
    all_ok = True
    for name, fn in CHECKS:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failure, reported like one
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        all_ok = all_ok and ok
        stream.write(f"{'PASS' if ok else 'FAIL'} {name}: {detail}\n")
    stream.write(f"{'ALL PASS' if all_ok else 'SOME FAILED'}\n")
    return all_ok

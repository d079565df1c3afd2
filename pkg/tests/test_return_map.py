import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from refraction_billiards.inner import inner_arc
from refraction_billiards.outer import outer_arc
from refraction_billiards.model import EllipseBoundary, PerturbedEllipse, boundary_frame, wrap_angle
from refraction_billiards.refraction import (
    TotalReflection,
    boundary_potentials,
    refract_inward,
    refract_outward,
    tangential_momentum,
)
from refraction_billiards.return_map import (
    area_density,
    BoundaryState,
    find_brake_orbits,
    first_return,
    first_return_trace,
    free_fall_delta,
    iterate_orbit,
    map_jacobian,
    refine_periodic_orbit,
)

from helpers import BASE, SQRT2, random_params

ELLIPSE = EllipseBoundary(0.3)


@pytest.mark.parametrize("xi", [0.0, math.pi / 2, math.pi, 3 * math.pi / 2])
def test_axis_points_fixed(xi):
    s = first_return(BASE, ELLIPSE, BoundaryState(xi, 0.0))
    assert abs(wrap_angle(s.xi - xi)) < 1e-10
    assert abs(s.alpha) < 1e-10


@given(st.floats(0.0, 2 * math.pi), st.floats(-0.6, 0.6))
@settings(max_examples=40, deadline=None)
def test_snell_invariant_at_both_junctions(xi, alpha):
    tr = first_return_trace(BASE, ELLIPSE, BoundaryState(xi, alpha))
    vi, ve = boundary_potentials(BASE, boundary_frame(ELLIPSE, tr.outer.end_xi))
    assert tangential_momentum(vi, tr.alpha_in) == pytest.approx(tangential_momentum(ve, tr.outer.end_angle), abs=1e-10)
    if isinstance(tr.result, BoundaryState):
        vi, ve = boundary_potentials(BASE, boundary_frame(ELLIPSE, tr.inner.end_xi))
        assert tangential_momentum(ve, tr.result.alpha) == pytest.approx(tangential_momentum(vi, tr.inner.end_angle), abs=1e-10)


@pytest.mark.parametrize("seed", range(5))
def test_area_preserving(seed):
    rng = np.random.default_rng(seed)
    curve = EllipseBoundary(rng.uniform(0.0, 0.5))
    s = BoundaryState(rng.uniform(0, 2 * math.pi), rng.uniform(-0.4, 0.4))
    jac = map_jacobian(BASE, curve, s)
    s1 = first_return(BASE, curve, s)
    canonical = np.linalg.det(jac) * area_density(BASE, curve, s1) / area_density(BASE, curve, s)
    assert canonical == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("xi", [0.0, math.pi / 2])
def test_unit_determinant_at_axis_points(xi):
    jac = map_jacobian(BASE, ELLIPSE, BoundaryState(xi, 0.0))
    assert np.linalg.det(jac) == pytest.approx(1.0, abs=1e-6)


def test_rotation_equivariance_on_circle():
    c = EllipseBoundary(0.0)
    a = first_return(BASE, c, BoundaryState(0.2, 0.3))
    b = first_return(BASE, c, BoundaryState(1.7, 0.3))
    assert abs(wrap_angle((b.xi - 1.7) - (a.xi - 0.2))) < 1e-10
    assert b.alpha == pytest.approx(a.alpha, abs=1e-12)


def test_reflection_equivariance():
    # the ellipse is symmetric about its major axis: (xi, alpha) -> (-xi, -alpha)
    a = first_return(BASE, ELLIPSE, BoundaryState(0.4, 0.2))
    b = first_return(BASE, ELLIPSE, BoundaryState(-0.4, -0.2))
    assert abs(wrap_angle(a.xi + b.xi)) < 1e-10
    assert a.alpha == pytest.approx(-b.alpha, abs=1e-10)


def _reverse_step(p, curve, s1):
    """Undo one step: leave inwards along the reversed exit, fly the inner arc, then the outer arc."""
    a_in = refract_inward(p, boundary_frame(curve, s1.xi), -s1.alpha)
    back_inner = inner_arc(p, curve, s1.xi, a_in)
    a_out = refract_outward(p, boundary_frame(curve, back_inner.end_xi), back_inner.end_angle)
    return outer_arc(p, curve, back_inner.end_xi, a_out)


@given(st.floats(0.0, 2 * math.pi), st.floats(-0.5, 0.5))
@settings(max_examples=40, deadline=None)
def test_time_reversal(xi, alpha):
    s0 = BoundaryState(xi, alpha)
    s1 = first_return(BASE, ELLIPSE, s0)
    if isinstance(s1, TotalReflection):
        return
    back = _reverse_step(BASE, ELLIPSE, s1)
    assert abs(wrap_angle(back.end_xi - s0.xi)) < 1e-8
    assert back.end_angle == pytest.approx(-s0.alpha, abs=1e-8)


def test_iterate_length():
    rec = iterate_orbit(BASE, ELLIPSE, BoundaryState(0.3, 0.1), 7)
    assert rec.termination == "completed"
    assert len(rec.states) == 8
    assert len(rec.outer_times) == 7


def test_total_reflection_reachable():
    # a steep inner hit on a flat side cannot leave
    found = False
    for alpha in np.linspace(-1.4, 1.4, 57):
        for xi in np.linspace(0, 2 * math.pi, 24, endpoint=False):
            if isinstance(first_return(BASE, EllipseBoundary(0.6), BoundaryState(float(xi), float(alpha))), TotalReflection):
                found = True
                break
        if found:
            break
    assert found


def test_period_three_orbit():
    orbit = refine_periodic_orbit(BASE, ELLIPSE, BoundaryState(1.047, 0.42), 3)
    assert orbit.converged
    assert orbit.residual < 1e-10
    assert orbit.state.xi == pytest.approx(0.76958, abs=1e-4)


def test_periodic_refinement_on_perturbed_curve():
    orbit = refine_periodic_orbit(BASE, PerturbedEllipse(0.3, 0.02), BoundaryState(1.047, 0.42), 3)
    assert orbit.converged


def test_free_fall_axes_and_oddness():
    p = BASE.replace(h=120.0, mu=2.0)
    c = EllipseBoundary(0.1)
    assert abs(free_fall_delta(p, c, 0.0).delta) < 1e-10
    assert abs(free_fall_delta(p, c, math.pi / 2).delta) < 1e-10
    for t in (0.3, 1.1):
        d = free_fall_delta(p, c, t).delta
        assert free_fall_delta(p, c, -t).delta == pytest.approx(-d, abs=1e-9)
        assert free_fall_delta(p, c, math.pi - t).delta == pytest.approx(-d, abs=1e-9)


def test_brake_orbits_close():
    p = BASE.replace(h=120.0, mu=2.0)
    found = find_brake_orbits(p, EllipseBoundary(0.1), grid_n=100)
    assert found
    for b in found:
        assert b.closure < 1e-6
        assert 0.0 < b.theta < math.pi / 2


def test_no_brake_orbits_circle():
    p = BASE.replace(h=120.0, mu=2.0)
    assert find_brake_orbits(p, EllipseBoundary(0.0), grid_n=40) == []


@pytest.mark.parametrize("seed", range(3))
def test_random_parameters_run(seed):
    rng = np.random.default_rng(seed)
    p = random_params(rng)
    rec = iterate_orbit(p, EllipseBoundary(0.2), BoundaryState(1.0, 0.1), 20)
    assert rec.termination in {"completed", "total_reflection", "tangency"}

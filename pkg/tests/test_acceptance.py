"""Acceptance criteria, each at its stated tolerance.

Run with ``pytest tests/test_acceptance.py`` (or execute this file directly);
a summary with one PASS/FAIL line per criterion is printed at the end.
"""

import io
import math
import time

import numpy as np
import pytest

from refraction_billiards import io as rio
from refraction_billiards import selftest
from refraction_billiards.inner import inner_arc
from refraction_billiards.model import EllipseBoundary, PhysParams, boundary_frame, potential_at, wrap_angle
from refraction_billiards.outer import launch_velocity, outer_arc
from refraction_billiards.refraction import TotalReflection, boundary_potentials, tangential_momentum
from refraction_billiards.return_map import (
    BoundaryState,
    area_density,
    find_brake_orbits,
    first_return,
    first_return_trace,
    free_fall_delta,
    iterate_orbit,
    map_jacobian,
)
from refraction_billiards.scan import (
    GridSpec,
    PortraitSpec,
    bifurcation_root,
    delta_sign_grid,
    freefall_profile,
    phase_portrait,
)
from refraction_billiards.stability import (
    Classification,
    classify,
    count_hyperbola_intersections,
    delta_factors_elliptic,
    discriminant_elliptic,
    discriminant_general,
    ellipse_axis_frame,
    h_bar_brake,
    mu_bar_brake,
    small_e_coefficients,
    stability_report,
)

from helpers import BRAKE, SQRT2, harmonic_return, kepler_exit, random_params

BRAKE_P = dict(E=2.5, omega=SQRT2, mu=2.0)


def _brake_params(h):
    return PhysParams(2.5, SQRT2, h, 2.0)


def test_criterion_01_bifurcation_anchor():
    t0 = time.perf_counter()
    root = bifurcation_root(BRAKE, 1, "h", (50.0, 200.0))
    elapsed = time.perf_counter() - t0
    assert abs(root - 109.091) <= 0.01
    assert elapsed < 1.0


def test_criterion_02_threshold_anchor():
    assert abs(mu_bar_brake(2.5, SQRT2, 0.1) - 0.0511) <= 0.0005
    root = bifurcation_root(BRAKE, 1, "h", (50.0, 200.0))
    assert abs(h_bar_brake(2.5, SQRT2, 2.0, 0.1) - root) <= 0.05


def _jacobian_tuples():
    rng = np.random.default_rng(2024)
    tuples = [(PhysParams(2.5, SQRT2, 0.1, 1.0), 0.0, 0), (PhysParams(2.5, SQRT2, 0.1, 1.0), 0.0, 1)]
    while len(tuples) < 24:
        tuples.append((random_params(rng), float(rng.uniform(0.02, 0.7)), len(tuples) % 2))
    return tuples


def test_criterion_03_jacobian_oracle():
    t0 = time.perf_counter()
    worst = 0.0
    for p, e, axis in _jacobian_tuples():
        curve = EllipseBoundary(e)
        xi = 0.0 if axis == 0 else 0.5 * math.pi
        closed = stability_report(p, curve, xi).DF_xi
        fd = map_jacobian(p, curve, BoundaryState(xi, 0.0))
        worst = max(worst, np.linalg.norm(fd - closed) / np.linalg.norm(closed))
    assert worst < 1e-5
    assert time.perf_counter() - t0 < 30.0


@pytest.mark.parametrize("e", [0.05, 0.3])
def test_criterion_04_sign_coherence(e):
    checked = 0
    for mu in np.linspace(0.1, 5.0, 20):
        for h in np.linspace(0.1, 200.0, 20):
            p = PhysParams(2.5, SQRT2, float(h), float(mu))
            for axis in (0, 1):
                d_axis = discriminant_elliptic(p, e, axis)
                if abs(d_axis) < 1e-8:
                    continue
                frame = ellipse_axis_frame(e, axis)
                d_general = discriminant_general(p, frame)
                rep = stability_report(p, EllipseBoundary(e), frame.xi)
                assert np.sign(d_general) == np.sign(d_axis) == np.sign(rep.trace**2 - 4.0)
                checked += 1
    assert checked > 700


def test_criterion_05_small_e_expansion():
    rng = np.random.default_rng(5)
    for _ in range(10):
        p = random_params(rng)
        f2, g2 = small_e_coefficients(p)
        assert g2 == -f2
        for e, tol in ((1e-3, 1e-2), (1e-4, 1e-4)):
            assert abs(discriminant_elliptic(p, e, 0) / e**2 - f2) / abs(f2) < tol
            assert abs(discriminant_elliptic(p, e, 1) / e**2 - g2) / abs(g2) < tol


def test_criterion_06_conservation():
    rng = np.random.default_rng(6)
    n = 0
    while n < 40:
        p = random_params(rng)
        curve = EllipseBoundary(rng.uniform(0.0, 0.6))
        s = BoundaryState(rng.uniform(0, 2 * math.pi), rng.uniform(-0.6, 0.6))
        tr = first_return_trace(p, curve, s)
        if isinstance(tr.result, TotalReflection):
            continue
        n += 1
        # outer energy: |v|^2/2 equals the outer potential at both ends
        for y, v in ((tr.outer.y0, tr.outer.v0), (tr.outer.end_position, tr.outer.end_velocity)):
            assert abs(0.5 * v @ v - potential_at(p, y, "outer")) < 1e-10
        # inner energy in the physical plane
        for state in (tr.inner.start_state, tr.inner.end_state):
            z, zd = state.physical()
            assert abs(0.5 * abs(zd) ** 2 - potential_at(p, (z.real, z.imag), "inner")) < 1e-10
        # regularized energy along the arc
        w, wd = tr.inner.lc_states(np.linspace(0.0, tr.inner.lc_flight_time, 25))
        lc_energy = 0.5 * np.abs(wd) ** 2 - 0.5 * tr.inner.Omega**2 * np.abs(w) ** 2
        assert np.max(np.abs(lc_energy - p.mu)) < 1e-10
        # Snell invariant at entry and exit
        vi, ve = boundary_potentials(p, boundary_frame(curve, tr.outer.end_xi))
        assert abs(tangential_momentum(vi, tr.alpha_in) - tangential_momentum(ve, tr.outer.end_angle)) < 1e-10
        vi, ve = boundary_potentials(p, boundary_frame(curve, tr.inner.end_xi))
        assert abs(tangential_momentum(ve, tr.result.alpha) - tangential_momentum(vi, tr.inner.end_angle)) < 1e-10
        # unit determinant in canonical coordinates
        jac = map_jacobian(p, curve, s)
        det = np.linalg.det(jac) * area_density(p, curve, tr.result) / area_density(p, curve, s)
        assert abs(det - 1.0) < 1e-6
    # and directly in (xi, alpha) at the homothetic points
    for e in (0.1, 0.4):
        for xi in (0.0, 0.5 * math.pi):
            jac = map_jacobian(PhysParams(2.5, SQRT2, 0.1, 1.0), EllipseBoundary(e), BoundaryState(xi, 0.0))
            assert abs(np.linalg.det(jac) - 1.0) < 1e-6


def test_criterion_07_circle_degeneracy():
    p = PhysParams(2.5, SQRT2, 0.1, 1.0)
    circle = EllipseBoundary(0.0)
    rec = iterate_orbit(p, circle, BoundaryState(0.3, 0.25), 100)
    assert rec.termination == "completed" and len(rec.states) == 101
    assert max(abs(s.alpha - 0.25) for s in rec.states) < 1e-8
    shifts = [wrap_angle(first_return(p, circle, BoundaryState(x, 0.25)).xi - x) for x in np.linspace(0, 2 * math.pi, 9)]
    assert max(shifts) - min(shifts) < 1e-9
    for axis in (0, 1):
        f = delta_factors_elliptic(p, 0.0, axis)
        assert classify(f.value, f) is Classification.DEGENERATE


def test_criterion_08_oracle_equivalence():
    rng = np.random.default_rng(8)
    n_inner = 0
    while n_inner < 50:
        p = random_params(rng)
        curve = EllipseBoundary(rng.uniform(0.0, 0.6))
        arc = inner_arc(p, curve, rng.uniform(0, 2 * math.pi), rng.uniform(-1.3, 1.3))
        if arc.collision_flag or arc.min_radius < 0.05:
            continue
        n_inner += 1
        z0, v0 = arc.start_state.physical()
        _, z, v = kepler_exit(p, curve, [z0.real, z0.imag], [v0.real, v0.imag], 10 * arc.physical_flight_time + 1)
        xi = curve.invert(z)
        f = boundary_frame(curve, xi)
        beta = math.atan2(v @ f.tangent_unit, v @ f.outward_normal_unit)
        assert abs(wrap_angle(xi - arc.end_xi)) < 1e-8
        assert abs(beta - arc.end_angle) < 1e-8
    for _ in range(50):
        p = random_params(rng)
        curve = EllipseBoundary(rng.uniform(0.0, 0.6))
        xi0, a0 = rng.uniform(0, 2 * math.pi), rng.uniform(-1.3, 1.3)
        arc = outer_arc(p, curve, xi0, a0)
        f0 = boundary_frame(curve, xi0)
        v0 = launch_velocity(math.sqrt(2 * p.v_outer(f0.radius)), f0, a0)
        _, y, v = harmonic_return(p, curve, f0.position, v0, 1.01 * 2 * math.pi / p.omega)
        xi = curve.invert(y)
        f = boundary_frame(curve, xi)
        angle = math.atan2(v @ f.tangent_unit, -(v @ f.outward_normal_unit))
        assert abs(wrap_angle(xi - arc.end_xi)) < 1e-8
        assert abs(angle - arc.end_angle) < 1e-8


def test_criterion_09_brake_orbits():
    curve = EllipseBoundary(0.1)
    below = find_brake_orbits(_brake_params(100.0), curve, grid_n=200)
    assert not [b for b in below if b.theta > 1.0]
    above = find_brake_orbits(_brake_params(120.0), curve, grid_n=200)
    assert len(above) >= 1
    for b in above:
        assert 0.0 < b.theta < 0.5 * math.pi
        assert b.closure < 1e-6
    for h in (100.0, 120.0):
        assert abs(free_fall_delta(_brake_params(h), curve, 0.0).delta) < 1e-10
        assert abs(free_fall_delta(_brake_params(h), curve, 0.5 * math.pi).delta) < 1e-10


def _random_valid_states(p, curve, rng, n):
    out = []
    while len(out) < n:
        s0 = BoundaryState(float(rng.uniform(0, 2 * math.pi)), float(rng.uniform(-0.5, 0.5)))
        s1 = first_return(p, curve, s0)
        if isinstance(s1, TotalReflection):
            continue
        back = first_return(p, curve, BoundaryState(s1.xi, -s1.alpha))
        if isinstance(back, TotalReflection):
            continue
        out.append((s0, back))
    return out


@pytest.mark.parametrize("e", [0.0, 0.3])
def test_criterion_10_reversibility(e):
    p = PhysParams(2.5, SQRT2, 0.1, 1.0)
    rng = np.random.default_rng(10)
    worst = 0.0
    for s0, back in _random_valid_states(p, EllipseBoundary(e), rng, 100):
        worst = max(worst, abs(wrap_angle(back.xi - s0.xi)), abs(back.alpha + s0.alpha))
    assert worst < 1e-8, f"max deviation {worst:.3e}"


def test_criterion_10_delta_odd():
    curve = EllipseBoundary(0.1)
    for h in (100.0, 120.0):
        p = _brake_params(h)
        for t in np.linspace(0.05, 1.5, 12):
            d = free_fall_delta(p, curve, float(t)).delta
            assert abs(free_fall_delta(p, curve, float(-t)).delta + d) < 1e-9
            assert abs(free_fall_delta(p, curve, float(math.pi - t)).delta + d) < 1e-9


def test_criterion_11_convexity_for_hyperbolae():
    rng = np.random.default_rng(11)
    worst = 0
    for _ in range(200):
        p = random_params(rng, h_range=(0.05, 20.0), mu_range=(0.1, 5.0))
        worst = max(worst, count_hyperbola_intersections(p, 0.5, rng.uniform(0.0, 2.5), rng.uniform(0, 2 * math.pi)))
    assert worst <= 2


def _scan_outputs(threads):
    grid = GridSpec("mu", (0.1, 5.0), 8, "h", (0.1, 200.0), 6, fixed={"E": 2.5, "omega": SQRT2, "e": 0.3})
    portrait = PortraitSpec(PhysParams(2.5, SQRT2, 0.1, 1.0), 0.3, xi_seeds=4, alpha_seeds=3, iterations=20)
    return (
        rio.csv_text(rio.scan_rows(delta_sign_grid(grid, threads)), rio.SCAN_COLUMNS),
        rio.csv_text(rio.portrait_rows(phase_portrait(portrait, threads)), rio.PORTRAIT_COLUMNS),
        rio.csv_text(rio.freefall_rows(freefall_profile(_brake_params(120.0), 0.1, 17, threads)), rio.FREEFALL_COLUMNS),
    )


def test_criterion_12_determinism(monkeypatch):
    texts = []
    for threads in ("1", "4"):
        monkeypatch.setenv("REFRACTION_BILLIARDS_THREADS", threads)
        buf = io.StringIO()
        selftest.run(buf)
        texts.append(buf.getvalue())
    assert texts[0] == texts[1]
    reference = _scan_outputs(1)
    for threads in (1, 2, 4, 8):
        assert _scan_outputs(threads) == reference


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))

"""Shared parameter sets and ODE oracles for the tests."""

import math

import numpy as np
from scipy.integrate import solve_ivp

from refraction_billiards.model import PhysParams

SQRT2 = math.sqrt(2.0)
BASE = PhysParams(2.5, SQRT2, 0.1, 1.0)
BRAKE = dict(E=2.5, omega=SQRT2, mu=2.0, e=0.1)


def random_params(rng, h_range=(0.1, 5.0), mu_range=(0.5, 3.0)) -> PhysParams:
    """Admissible parameters whose Hill disk contains the unit disk with room to spare."""
    E = rng.uniform(1.5, 4.0)
    omega = rng.uniform(0.3, 0.8) * math.sqrt(2.0 * E)
    return PhysParams(E, omega, rng.uniform(*h_range), rng.uniform(*mu_range))


def kepler_exit(p, curve, z0, v0, t_max):
    """Integrate ``z'' = -mu z/|z|^3`` from the boundary until it leaves the domain."""

    def rhs(_, y):
        r3 = math.hypot(y[0], y[1]) ** 3
        return [y[2], y[3], -p.mu * y[0] / r3, -p.mu * y[1] / r3]

    def leave(_, y):
        return float(curve.level(np.array([y[0], y[1]])))

    leave.terminal = True
    leave.direction = 1.0
    sol = solve_ivp(rhs, (0.0, t_max), [*z0, *v0], method="DOP853", rtol=1e-12, atol=1e-14, events=leave)
    y = sol.y_events[0][0]
    return sol.t_events[0][0], y[:2], y[2:]


def harmonic_return(p, curve, z0, v0, t_max):
    """Integrate ``y'' = -omega^2 y`` from the boundary until it re-enters the domain."""
    w2 = p.omega**2

    def rhs(_, y):
        return [y[2], y[3], -w2 * y[0], -w2 * y[1]]

    def enter(_, y):
        return float(curve.level(np.array([y[0], y[1]])))

    enter.terminal = True
    enter.direction = -1.0
    sol = solve_ivp(rhs, (0.0, t_max), [*z0, *v0], method="DOP853", rtol=1e-12, atol=1e-14, events=enter)
    y = sol.y_events[0][0]
    return sol.t_events[0][0], y[:2], y[2:]

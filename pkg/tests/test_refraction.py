import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from refraction_billiards.model import EllipseBoundary, boundary_frame
from refraction_billiards.refraction import (
    TotalReflection,
    boundary_potentials,
    critical_angle,
    refract_inward,
    refract_outward,
    tangential_momentum,
)

from helpers import BASE

FRAME = boundary_frame(EllipseBoundary(0.3), 0.8)


@given(st.floats(-1.5, 1.5))
def test_inward_conserves_snell_invariant(a):
    vi, ve = boundary_potentials(BASE, FRAME)
    b = refract_inward(BASE, FRAME, a)
    assert tangential_momentum(vi, b) == pytest.approx(tangential_momentum(ve, a), abs=1e-12)
    # entering the deeper potential bends towards the normal
    assert abs(b) <= abs(a) + 1e-15


@given(st.floats(-1.5, 1.5))
@settings(max_examples=50)
def test_round_trip(a):
    b = refract_inward(BASE, FRAME, a)
    assert refract_outward(BASE, FRAME, b) == pytest.approx(a, abs=1e-9)


def test_total_reflection_beyond_critical():
    c = critical_angle(BASE, FRAME)
    assert isinstance(refract_outward(BASE, FRAME, c + 1e-3), TotalReflection)
    assert isinstance(refract_outward(BASE, FRAME, -(c + 1e-3)), TotalReflection)
    assert not isinstance(refract_outward(BASE, FRAME, c - 1e-3), TotalReflection)


def test_normal_incidence_unchanged():
    assert refract_inward(BASE, FRAME, 0.0) == 0.0
    assert refract_outward(BASE, FRAME, 0.0) == 0.0


def test_angle_outside_range_rejected():
    with pytest.raises(ValueError):
        refract_inward(BASE, FRAME, 2.0)


def test_total_reflection_carries_ratio():
    out = refract_outward(BASE, FRAME, 1.2)
    assert isinstance(out, TotalReflection)
    vi, ve = boundary_potentials(BASE, FRAME)
    assert out.sin_ratio == pytest.approx(math.sqrt(vi / ve) * math.sin(1.2))

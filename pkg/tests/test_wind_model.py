import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dronemfp.energy_model import FlightCondition, air_speed
from dronemfp.errors import ConfigurationError, GeometryError, ValidationError
from dronemfp.wind_model import (
    DirectionClass,
    GlobalWind,
    Point2D,
    classify,
    edge_angle,
    relative_wind_direction,
    representative,
)

coords = st.floats(-1e4, 1e4, allow_nan=False)
angles = st.floats(0, 360, exclude_max=True, allow_nan=False)


def test_edge_angle_examples():
    assert edge_angle(Point2D(0, 0), Point2D(1, 0)) == 0.0
    assert edge_angle(Point2D(0, 0), Point2D(-1, -1)) == pytest.approx(225.0)
    assert edge_angle(Point2D(0, 0), Point2D(0, 1)) == pytest.approx(90.0)


def _two_branch(dx, dy):
    # the piecewise arctan definition, valid only off the y-axis
    if dx > 0:
        return math.degrees(math.atan(dy / dx)) % 360
    return 180 + math.degrees(math.atan(dy / dx))


def test_vertical_edge_is_limit_of_first_branch():
    for eps in (1e-6, 1e-9, 1e-12):
        assert _two_branch(eps, 1.0) == pytest.approx(edge_angle(Point2D(0, 0), Point2D(0, 1)), abs=1e-3)
    assert edge_angle(Point2D(0, 0), Point2D(0, -1)) == pytest.approx(270.0)


@given(coords, coords, coords, coords)
def test_edge_angle_matches_two_branch_formula(x1, y1, x2, y2):
    dx, dy = x2 - x1, y2 - y1
    if abs(dx) < 1e-6:
        return
    got = edge_angle(Point2D(x1, y1), Point2D(x2, y2))
    assert 0 <= got < 360
    expected = _two_branch(dx, dy) % 360
    assert min(abs(got - expected), 360 - abs(got - expected)) < 1e-7


@given(coords, coords, coords, coords)
def test_reversal_adds_half_turn(x1, y1, x2, y2):
    u, v = Point2D(x1, y1), Point2D(x2, y2)
    if u == v:
        return
    diff = (edge_angle(v, u) - edge_angle(u, v)) % 360
    assert diff == pytest.approx(180.0, abs=1e-9)


def test_degenerate_edge():
    with pytest.raises(GeometryError):
        edge_angle(Point2D(3, 4), Point2D(3, 4))


def test_relative_direction_examples():
    assert relative_wind_direction(GlobalWind(5, 90), 90) == 0.0
    assert relative_wind_direction(GlobalWind(5, 30), 100) == 290.0
    # reversed edge sees the direction shifted by 180
    psi = 37.0
    w = GlobalWind(5, 200)
    assert relative_wind_direction(w, (psi + 180) % 360) == (relative_wind_direction(w, psi) - 180) % 360


@given(angles, angles)
def test_relative_direction_is_modular_difference(wo, psi):
    got = relative_wind_direction(GlobalWind(1.0, wo), psi)
    assert 0 <= got < 360
    assert math.isclose(math.cos(math.radians(got)), math.cos(math.radians(wo - psi)), abs_tol=1e-9)


def _band_oracle(theta, k):
    width = 180.0 / k
    for i in range(k):
        upper = i * width <= theta < (i + 1) * width
        lower = (2 * k - 1 - i) * width <= theta < (2 * k - i) * width
        if upper or lower:
            return i
    raise AssertionError(theta)


@pytest.mark.parametrize(
    "theta, k, index, rep",
    [(0, 4, 0, 0.0), (180, 4, 3, 180.0), (300, 4, 1, 45.0), (315, 4, 0, 0.0), (44.999, 4, 0, 0.0), (200, 8, 7, 157.5)],
)
def test_classify_examples(theta, k, index, rep):
    cls = classify(theta, k)
    assert cls.index == index
    assert cls.representative_deg == rep


@pytest.mark.parametrize("k", [4, 8])
@given(theta=angles)
def test_classify_is_total_and_matches_bands(k, theta):
    assert classify(theta, k).index == _band_oracle(theta, k)


@pytest.mark.parametrize("k", [4, 8])
@given(theta=angles)
def test_classify_cosine_symmetry_off_band_edges(k, theta):
    width = 180.0 / k
    if theta == 0 or math.isclose(theta / width, round(theta / width), abs_tol=1e-9):
        return
    assert classify(theta, k) == classify(360 - theta, k)


@given(angles, st.floats(0, 30), st.floats(1, 30))
def test_grouped_sectors_share_air_speed(theta, ws, sd):
    a = air_speed(FlightCondition(0, sd, ws, theta))
    b = air_speed(FlightCondition(0, sd, ws, (360 - theta) % 360))
    assert math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-12)


def test_representatives():
    assert representative(DirectionClass(1, 4)) == 45.0
    assert representative(DirectionClass(2, 4)) == 135.0
    assert representative(DirectionClass(5, 8)) == 112.5
    assert [representative(DirectionClass(i, 4)) for i in range(4)] == [0, 45, 135, 180]


def test_bad_inputs():
    with pytest.raises(ConfigurationError):
        classify(10, 3)
    with pytest.raises(ValidationError):
        GlobalWind(-1, 0)
    with pytest.raises(ValidationError):
        GlobalWind(1, 360)
    with pytest.raises(ValidationError):
        DirectionClass(4, 4)

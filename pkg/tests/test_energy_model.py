import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import bisect_root
from dronemfp.energy_model import (
    DroneParams,
    FlightCondition,
    UnitaryCostTable,
    air_speed,
    compute_power_breakdown,
    drag_force,
    edge_cost,
    energy_bounds,
    hover_induced_velocity,
    induced_velocity_residual,
    pitch_angle,
    solve_induced_velocity,
    thrust,
)
from dronemfp.errors import ConfigurationError, PayloadError

REPS4 = (0.0, 45.0, 135.0, 180.0)


def test_air_speed_examples():
    for theta in (0, 45, 135, 180, 290):
        assert air_speed(FlightCondition(0, 20, 0, theta)) == 20
    assert air_speed(FlightCondition(0, 20, 5, 0)) == pytest.approx(15)
    assert air_speed(FlightCondition(0, 20, 15, 180)) == pytest.approx(35)


@given(st.floats(0.1, 40), st.floats(0, 30), st.floats(0, 359.99))
def test_air_speed_closed_form(sd, ws, theta):
    got = air_speed(FlightCondition(0, sd, ws, theta))
    c = math.cos(math.radians(theta))
    assert got**2 == pytest.approx(sd**2 - 2 * sd * ws * c + ws**2, rel=1e-9, abs=1e-9)


def test_drag_examples(params):
    assert drag_force(params, 0) == 0
    assert drag_force(params, 14) == pytest.approx(4 * drag_force(params, 7))
    assert drag_force(params, 10) == pytest.approx(0.5 * 1.225 * 100 * math.pi * 0.25)
    assert drag_force(params, 10) == pytest.approx(48.11, abs=5e-3)


def test_thrust_examples(params):
    assert thrust(params, 0, 0) == pytest.approx(98.1)
    assert thrust(params, 3, 10 + 5) == pytest.approx(thrust(params, 3, 10) + 5)
    assert thrust(params, 7, 48.11) == pytest.approx(214.88, abs=5e-3)
    with pytest.raises(PayloadError):
        thrust(params, 7.5, 0)


def test_pitch_examples():
    assert pitch_angle(0, 100) == 0
    assert pitch_angle(100, 100) == pytest.approx(math.pi / 4)
    values = [pitch_angle(d, 100) for d in np.linspace(0, 1000, 50)]
    assert all(a < b for a, b in zip(values, values[1:]))
    assert values[-1] < math.pi / 2


def test_hover_induced_examples(params):
    assert hover_induced_velocity(4 * 150, params) == pytest.approx(2 * hover_induced_velocity(150, params))
    assert hover_induced_velocity(214.88, params) == pytest.approx(10.57, abs=5e-3)
    big = DroneParams(rotor_radius=0.6)
    assert hover_induced_velocity(200, big) < hover_induced_velocity(200, params)


def test_induced_velocity_hover_limit(params):
    t = 180.0
    assert abs(solve_induced_velocity(t, 0.0, 0.0, params) - hover_induced_velocity(t, params)) < 1e-9


def test_induced_velocity_against_bisection(params):
    for t, sd, alpha in itertools.product((100.0, 250.0, 900.0), (0.5, 5.0, 20.0), (0.0, 0.4, 1.2)):
        s_h = hover_induced_velocity(t, params)
        got = solve_induced_velocity(t, sd, alpha, params)
        root = bisect_root(lambda s: induced_velocity_residual(s, s_h, sd, alpha), 0.0, s_h)
        assert abs(got - root) < 1e-6
        assert abs(induced_velocity_residual(got, s_h, sd, alpha)) < 1e-6


def test_induced_velocity_decreases_with_ground_speed(params):
    values = [solve_induced_velocity(300.0, sd, 0.3, params) for sd in np.linspace(0.5, 40, 60)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_induced_velocity_fallback_converges(params):
    # one fixed-point iteration is not enough, forcing the bracketed search
    t, sd, alpha = 300.0, 2.0, 0.1
    got = solve_induced_velocity(t, sd, alpha, params, max_iter=1)
    s_h = hover_induced_velocity(t, params)
    assert abs(induced_velocity_residual(got, s_h, sd, alpha)) < 1e-6


def test_breakdown_zero_wind_ignores_direction(params):
    assert compute_power_breakdown(params, FlightCondition(7, 20, 0, 0)) == compute_power_breakdown(
        params, FlightCondition(7, 20, 0, 135)
    )


def test_breakdown_invariants(params):
    for m, sd, ws, th in itertools.product((0, 7), (10, 20), (0, 5, 10, 15), REPS4):
        b = compute_power_breakdown(params, FlightCondition(m, sd, ws, th))
        assert b.thrust >= (params.frame_mass + m) * params.gravity
        assert b.power > 0
        assert b.unitary_cost == b.power / sd
        assert b == compute_power_breakdown(params, FlightCondition(m, sd, ws, (360 - th) % 360))


def test_head_and_payload_orderings(params):
    mu = lambda m, ws, th: compute_power_breakdown(params, FlightCondition(m, 20, ws, th)).unitary_cost
    assert mu(7, 15, 180) > mu(7, 15, 0)
    assert mu(7, 5, 45) > mu(0, 5, 45)


def test_monotonicity_grid(params):
    for sd, ws in itertools.product((10, 20), (0, 5, 10, 15)):
        for th in REPS4:
            assert compute_power_breakdown(params, FlightCondition(7, sd, ws, th)).unitary_cost > (
                compute_power_breakdown(params, FlightCondition(0, sd, ws, th)).unitary_cost
            )
        row = [compute_power_breakdown(params, FlightCondition(7, sd, ws, th)).unitary_cost for th in REPS4]
        assert all(a <= b for a, b in zip(row, row[1:]))


@settings(max_examples=50, deadline=None)
@given(
    st.floats(1, 30),
    st.floats(0.1, 1.5),
    st.floats(0.2, 2.0),
    st.floats(0.5, 1.5),
    st.floats(0, 5),
    st.floats(1, 30),
    st.floats(0, 20),
)
def test_residual_bound_under_any_positive_parameters(mass, radius, cd, rho, payload, sd, ws):
    p = DroneParams(frame_mass=mass, rotor_radius=radius, drag_coefficient=cd, air_density=rho, max_payload=5)
    for th in REPS4:
        b = compute_power_breakdown(p, FlightCondition(payload, sd, ws, th))
        assert abs(induced_velocity_residual(b.induced, b.hover_induced, sd, b.pitch)) < 1e-6


def test_edge_cost(params):
    assert edge_cost(300.0, 0.0) == 0
    assert edge_cost(300.0, 2 * 17.0) == 2 * edge_cost(300.0, 17.0)
    cond = FlightCondition(7, 20, 10, 45)
    mu = compute_power_breakdown(params, cond).unitary_cost
    b = compute_power_breakdown(params, cond)
    assert edge_cost(mu, 250.0) == pytest.approx(b.thrust * (20 * math.sin(b.pitch) + b.induced) / 20 * 250.0)


def test_energy_bounds(params):
    single = energy_bounds(params, 7, 20, [0.0], 4)
    assert single.eps_min == single.eps_max

    b = energy_bounds(params, 7, 20, [0, 5, 10, 15], 4)
    grid = {
        (ws, th): compute_power_breakdown(params, FlightCondition(7, 20, ws, th)).unitary_cost
        for ws in (0, 5, 10, 15)
        for th in REPS4
    }
    assert b.eps_max == grid[(15, 180.0)] == max(grid.values())
    assert b.eps_min == grid[(15, 0.0)] == min(grid.values())

    empty = energy_bounds(params, 0, 20, [0, 5, 10, 15], 4)
    assert b.eps_min > empty.eps_min and b.eps_max > empty.eps_max


def test_unitary_table_memoizes(params):
    table = UnitaryCostTable(params, 20, 8)
    assert table.mu(7, 10, 3) is table.mu(7, 10, 3)
    assert table.mu(7, 10, 7) == compute_power_breakdown(params, FlightCondition(7, 20, 10, 157.5)).unitary_cost


def test_params_validation_and_config(tmp_path):
    with pytest.raises(ConfigurationError):
        DroneParams(frame_mass=-1)
    with pytest.raises(ConfigurationError):
        DroneParams(gravity=9.8)
    cfg = tmp_path / "drone.ini"
    cfg.write_text("[drone]\nframe_mass = 12\nrotor_radius = 0.4\n")
    p = DroneParams.from_config(cfg)
    assert p.frame_mass == 12 and p.rotor_radius == 0.4 and p.air_density == 1.225
    cfg.write_text("[drone]\nwingspan = 3\n")
    with pytest.raises(ConfigurationError):
        DroneParams.from_config(cfg)

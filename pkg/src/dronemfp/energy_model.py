"""Steady-flight multirotor power and the per-metre energy cost of an edge.

Momentum theory chain: air speed -> drag -> thrust -> pitch -> hover induced
velocity -> induced velocity (implicit) -> power -> unitary cost ``P / s_d``.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, fields
from os import PathLike
from typing import Iterable

from scipy.optimize import brentq

from dronemfp.errors import ConfigurationError, NumericalError, PayloadError, ValidationError
from dronemfp.wind_model import representatives

GRAVITY = 9.81

SOLVER_TOL = 1e-9
SOLVER_MAX_ITER = 200


@dataclass(frozen=True)
class DroneParams:
    """Physical constants of the vehicle (SI units).

    ``rotor_radius`` is the radius of one equivalent disk standing in for the
    whole rotor set. Defaults describe a mid-size delivery octocopter and are
    meant to be overridden from a config file.
    """

    frame_mass: float = 10.0
    rotor_radius: float = 0.5
    drag_coefficient: float = 1.0
    air_density: float = 1.225
    gravity: float = GRAVITY
    max_payload: float = 7.0
    battery_budget: float = 5.0e6
    cruise_speed: float = 20.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ConfigurationError(f"{f.name} must be a positive number, got {value!r}")
        if self.gravity != GRAVITY:
            raise ConfigurationError(f"gravity is fixed at {GRAVITY}, got {self.gravity}")

    @property
    def disk_area(self) -> float:
        return math.pi * self.rotor_radius**2

    @classmethod
    def from_mapping(cls, values: dict) -> DroneParams:
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise ConfigurationError(f"unknown drone parameter(s): {', '.join(sorted(unknown))}")
        try:
            return cls(**{k: float(v) for k, v in values.items()})
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from exc

    @classmethod
    def from_config(cls, path: str | PathLike, section: str = "drone") -> DroneParams:
        """Read the ``[drone]`` section of an INI-style key-value file."""
        parser = configparser.ConfigParser()
        if not parser.read(path):
            raise ConfigurationError(f"cannot read config file {path}")
        if not parser.has_section(section):
            return cls()
        return cls.from_mapping(dict(parser.items(section)))


@dataclass(frozen=True)
class FlightCondition:
    payload: float
    ground_speed: float
    wind_speed: float = 0.0
    relative_direction_deg: float = 0.0

    def __post_init__(self):
        if self.payload < 0:
            raise PayloadError(f"payload must be >= 0, got {self.payload}")
        if not self.ground_speed > 0:
            raise ValidationError(f"ground speed must be > 0, got {self.ground_speed}")
        if not self.wind_speed >= 0:
            raise ValidationError(f"wind speed must be >= 0, got {self.wind_speed}")


@dataclass(frozen=True)
class PowerBreakdown:
    air_speed: float
    drag: float
    thrust: float
    pitch: float
    hover_induced: float
    induced: float
    power: float
    unitary_cost: float


@dataclass(frozen=True)
class EnergyBounds:
    """Extremes of the unitary cost over a wind alphabet for one payload."""

    eps_min: float
    eps_max: float
    payload: float


def air_speed(cond: FlightCondition) -> float:
    # fold theta into [0, 180] so theta and 360 - theta evaluate identically
    theta = cond.relative_direction_deg % 360.0
    theta = math.radians(min(theta, 360.0 - theta))
    s_north = cond.ground_speed - cond.wind_speed * math.cos(theta)
    s_east = cond.wind_speed * math.sin(theta)
    return math.hypot(s_north, s_east)


def drag_force(params: DroneParams, s_a: float) -> float:
    return 0.5 * params.air_density * s_a**2 * params.drag_coefficient * params.disk_area


def thrust(params: DroneParams, payload: float, drag: float) -> float:
    if payload > params.max_payload:
        raise PayloadError(f"payload {payload} kg exceeds max payload {params.max_payload} kg")
    return (params.frame_mass + payload) * params.gravity + drag


def pitch_angle(drag: float, weight_force: float) -> float:
    return math.atan(drag / weight_force)


def hover_induced_velocity(thrust: float, params: DroneParams) -> float:
    return math.sqrt(thrust / (2.0 * params.air_density * params.disk_area))


def induced_velocity_residual(s_i: float, s_h: float, ground_speed: float, pitch: float) -> float:
    """``s_i - s_h^2 / sqrt((s_d cos a)^2 + (s_d sin a + s_i)^2)``; increasing in ``s_i``."""
    return s_i - s_h**2 / math.hypot(ground_speed * math.cos(pitch), ground_speed * math.sin(pitch) + s_i)


def solve_induced_velocity(
    thrust: float,
    ground_speed: float,
    pitch: float,
    params: DroneParams,
    tol: float = SOLVER_TOL,
    max_iter: int = SOLVER_MAX_ITER,
) -> float:
    """Induced velocity from the implicit momentum-theory equation.

    Fixed-point iteration seeded at the hover value, falling back to a bracketed
    root search on ``(0, s_h]`` when the iteration does not settle.
    """
    if not thrust > 0:
        raise ValidationError(f"thrust must be > 0, got {thrust}")
    s_h = hover_induced_velocity(thrust, params)
    a = ground_speed * math.cos(pitch)
    b = ground_speed * math.sin(pitch)
    s_h2 = s_h * s_h

    s_i = s_h
    for _ in range(max_iter):
        nxt = s_h2 / math.hypot(a, b + s_i)
        if abs(nxt - s_i) < tol:
            s_i = nxt
            break
        s_i = nxt
    if abs(induced_velocity_residual(s_i, s_h, ground_speed, pitch)) < tol:
        return s_i

    def g(s):
        return induced_velocity_residual(s, s_h, ground_speed, pitch)

    if g(s_h) == 0.0:
        return s_h
    try:
        root = brentq(g, 0.0, s_h, xtol=1e-14, maxiter=500)
    except (ValueError, RuntimeError) as exc:
        raise NumericalError(f"induced velocity did not converge (T={thrust}, s_d={ground_speed})") from exc
    if abs(g(root)) >= 1e-6:
        raise NumericalError(f"induced velocity residual {g(root)} too large")
    return root


def compute_power_breakdown(params: DroneParams, cond: FlightCondition) -> PowerBreakdown:
    s_a = air_speed(cond)
    f_d = drag_force(params, s_a)
    t = thrust(params, cond.payload, f_d)
    weight_force = (params.frame_mass + cond.payload) * params.gravity
    alpha = pitch_angle(f_d, weight_force)
    s_h = hover_induced_velocity(t, params)
    s_i = solve_induced_velocity(t, cond.ground_speed, alpha, params)
    power = t * (cond.ground_speed * math.sin(alpha) + s_i)
    return PowerBreakdown(
        air_speed=s_a,
        drag=f_d,
        thrust=t,
        pitch=alpha,
        hover_induced=s_h,
        induced=s_i,
        power=power,
        unitary_cost=power / cond.ground_speed,
    )


def unitary_cost(params: DroneParams, cond: FlightCondition) -> float:
    return compute_power_breakdown(params, cond).unitary_cost


def edge_cost(mu: float, length: float) -> float:
    return mu * length


class UnitaryCostTable:
    """Memoized unitary cost keyed by (payload, wind speed, class index).

    Built once per (drone, ground speed, class count) and shared read-only
    across mission runs.
    """

    def __init__(self, params: DroneParams, ground_speed: float, k: int):
        self.params = params
        self.ground_speed = ground_speed
        self.k = k
        self.reps = representatives(k)
        self._cache: dict[tuple[float, float, int], float] = {}

    def mu(self, payload: float, wind_speed: float, class_index: int) -> float:
        key = (payload, wind_speed, class_index)
        value = self._cache.get(key)
        if value is None:
            cond = FlightCondition(payload, self.ground_speed, wind_speed, self.reps[class_index])
            value = unitary_cost(self.params, cond)
            self._cache[key] = value
        return value

    def mu_by_class(self, payload: float, wind_speed: float) -> list[float]:
        return [self.mu(payload, wind_speed, i) for i in range(self.k)]

    def bounds(self, payload: float, wind_speeds: Iterable[float]) -> EnergyBounds:
        values = [m for w in wind_speeds for m in self.mu_by_class(payload, w)]
        if not values:
            raise ConfigurationError("wind speed alphabet is empty")
        return EnergyBounds(min(values), max(values), payload)


def energy_bounds(
    params: DroneParams,
    payload: float,
    ground_speed: float,
    wind_speeds: Iterable[float],
    k: int,
) -> EnergyBounds:
    """Min and max unitary cost over wind speeds x class representatives."""
    return UnitaryCostTable(params, ground_speed, k).bounds(payload, wind_speeds)

"""Relative wind direction on an edge and its quantization into direction classes.

Angles are in degrees everywhere. A wind direction is the heading the air
moves toward, so a relative direction of 0 is a pure tailwind and 180 a pure
headwind.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from dronemfp.errors import ConfigurationError, GeometryError, ValidationError

SUPPORTED_CLASS_COUNTS = (4, 8)

_REPRESENTATIVES = {
    4: (0.0, 45.0, 135.0, 180.0),
    8: tuple(i * 22.5 for i in range(8)),
}


@dataclass(frozen=True)
class Point2D:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValidationError(f"non-finite coordinates ({self.x}, {self.y})")

    def distance(self, other: Point2D) -> float:
        return math.hypot(other.x - self.x, other.y - self.y)


@dataclass(frozen=True)
class GlobalWind:
    """Wind observed over one region during one time-slot."""

    speed_ms: float
    direction_deg: float

    def __post_init__(self):
        if not self.speed_ms >= 0:
            raise ValidationError(f"wind speed must be >= 0, got {self.speed_ms}")
        if not 0 <= self.direction_deg < 360:
            raise ValidationError(f"wind direction must lie in [0, 360), got {self.direction_deg}")


@dataclass(frozen=True)
class DirectionClass:
    index: int
    class_count: int

    def __post_init__(self):
        _check_k(self.class_count)
        if not 0 <= self.index < self.class_count:
            raise ValidationError(f"class index {self.index} outside [0, {self.class_count})")

    @property
    def representative_deg(self) -> float:
        return representative(self)


def _check_k(k: int) -> None:
    if k not in SUPPORTED_CLASS_COUNTS:
        raise ConfigurationError(f"unsupported class count {k!r}; expected one of {SUPPORTED_CLASS_COUNTS}")


def _wrap(deg: float) -> float:
    deg = deg % 360.0
    # a tiny negative input rounds up to exactly 360.0
    return 0.0 if deg >= 360.0 else deg + 0.0


def edge_angle(u: Point2D, v: Point2D) -> float:
    """Polar angle of the vector ``v - u`` in [0, 360)."""
    dx, dy = v.x - u.x, v.y - u.y
    if dx == 0 and dy == 0:
        raise GeometryError(f"degenerate edge: coincident endpoints ({u.x}, {u.y})")
    return _wrap(math.degrees(math.atan2(dy, dx)))


def relative_wind_direction(wind: GlobalWind, psi: float) -> float:
    return _wrap(wind.direction_deg - psi)


def classify(theta: float, k: int) -> DirectionClass:
    """Map a relative direction to its class.

    The circle is cut into ``2k`` half-open sectors of width ``180/k``; sector
    ``s`` and its mirror ``2k - 1 - s`` share class ``min(s, 2k - 1 - s)``.
    """
    _check_k(k)
    if not 0 <= theta < 360:
        raise ValidationError(f"theta must lie in [0, 360), got {theta}")
    return DirectionClass(int(classify_array(np.asarray(theta), k)), k)


def classify_array(theta: np.ndarray, k: int) -> np.ndarray:
    """Vectorized :func:`classify` returning class indices."""
    _check_k(k)
    width = 180.0 / k
    sector = np.floor(np.asarray(theta, dtype=float) / width).astype(np.int64)
    sector = np.clip(sector, 0, 2 * k - 1)
    return np.minimum(sector, 2 * k - 1 - sector)


def representative(cls: DirectionClass) -> float:
    return _REPRESENTATIVES[cls.class_count][cls.index]


def representatives(k: int) -> tuple[float, ...]:
    _check_k(k)
    return _REPRESENTATIVES[k]

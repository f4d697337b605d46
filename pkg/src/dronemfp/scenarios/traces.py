"""Random wind traces with a discrete speed alphabet and uniform directions."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from dronemfp.errors import ConfigurationError
from dronemfp.td_graph import WindTrace
from dronemfp.wind_model import GlobalWind

DEFAULT_SPEED_ALPHABET = (0.0, 5.0, 10.0, 15.0)


def generate_wind_trace(
    seed: int,
    horizon: int,
    slot_duration: float = 60.0,
    speed_alphabet: Sequence[float] = DEFAULT_SPEED_ALPHABET,
    regions: Sequence[str] = ("global",),
) -> WindTrace:
    """Draw an independent wind per slot and region.

    Speeds are uniform over ``speed_alphabet`` and directions uniform on
    [0, 360).
    """
    if not speed_alphabet:
        raise ConfigurationError("speed alphabet is empty")
    if horizon < 1:
        raise ConfigurationError(f"trace horizon must be >= 1, got {horizon}")
    if not regions:
        raise ConfigurationError("a trace needs at least one region")
    rng = np.random.default_rng(seed)
    alphabet = np.asarray(speed_alphabet, dtype=float)
    names = list(regions)
    speeds = alphabet[rng.integers(0, len(alphabet), size=(horizon, len(names)))]
    directions = rng.uniform(0.0, 360.0, size=(horizon, len(names)))
    slots = [
        {r: GlobalWind(float(speeds[t, j]), float(directions[t, j])) for j, r in enumerate(names)}
        for t in range(horizon)
    ]
    return WindTrace(float(slot_duration), slots)

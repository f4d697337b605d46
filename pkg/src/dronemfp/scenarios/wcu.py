"""Wind-station (WCU) CSV records, rescaling, and a synthetic station feed."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace
from datetime import datetime, timedelta
from os import PathLike
from typing import Iterable, Sequence

import numpy as np

from dronemfp.errors import ConfigurationError, ParseError, ValidationError
from dronemfp.td_graph import WindTrace
from dronemfp.wind_model import GlobalWind, Point2D

HEADER = ("date", "time", "speed", "direction", "station", "x", "y")
DATE_FORMAT = "%Y-%m-%d"
TIME_FORMAT = "%H:%M"


@dataclass(frozen=True)
class WcuRecord:
    timestamp: datetime
    speed: float
    direction: float
    station: str
    location: Point2D

    def __post_init__(self):
        if not (math.isfinite(self.speed) and self.speed >= 0):
            raise ValidationError(f"wind speed must be >= 0, got {self.speed}")
        if not 0 <= self.direction < 360:
            raise ValidationError(f"wind direction must lie in [0, 360), got {self.direction}")
        if not self.station:
            raise ValidationError("station id is empty")

    @property
    def wind(self) -> GlobalWind:
        return GlobalWind(self.speed, self.direction)


def _sort_key(rec: WcuRecord):
    return rec.timestamp, rec.station


def parse_wcu_csv(text: str, source: str = "<string>") -> list[WcuRecord]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        raise ParseError(f"{source}: empty file, expected header {','.join(HEADER)}")
    if tuple(h.strip() for h in header) != HEADER:
        raise ParseError(f"{source}:1: expected header {','.join(HEADER)}, got {','.join(header)}")
    records = []
    for row in reader:
        line = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(HEADER):
            raise ParseError(f"{source}:{line}: expected {len(HEADER)} fields, got {len(row)}")
        date, time, speed, direction, station, x, y = (cell.strip() for cell in row)
        try:
            stamp = datetime.strptime(f"{date} {time}", f"{DATE_FORMAT} {TIME_FORMAT}")
            values = float(speed), float(direction), float(x), float(y)
        except ValueError as exc:
            raise ParseError(f"{source}:{line}: {exc}") from None
        try:
            records.append(WcuRecord(stamp, values[0], values[1], station, Point2D(values[2], values[3])))
        except ValidationError as exc:
            raise ValidationError(f"{source}:{line}: {exc}") from None
    records.sort(key=_sort_key)
    return records


def load_wcu_csv(path: str | PathLike) -> list[WcuRecord]:
    """Read ``date,time,speed,direction,station,x,y`` rows sorted by time then station."""
    with open(path, newline="", encoding="utf-8") as fh:
        return parse_wcu_csv(fh.read(), str(path))


def format_wcu_csv(records: Iterable[WcuRecord]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(HEADER)
    for r in sorted(records, key=_sort_key):
        writer.writerow(
            [
                r.timestamp.strftime(DATE_FORMAT),
                r.timestamp.strftime(TIME_FORMAT),
                repr(r.speed),
                repr(r.direction),
                r.station,
                repr(r.location.x),
                repr(r.location.y),
            ]
        )
    return out.getvalue()


def write_wcu_csv(records: Iterable[WcuRecord], path: str | PathLike) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(format_wcu_csv(records))


def station_locations(records: Sequence[WcuRecord]) -> dict[str, Point2D]:
    """Location of each station, checking that it never moves."""
    where: dict[str, Point2D] = {}
    for r in records:
        seen = where.setdefault(r.station, r.location)
        if seen != r.location:
            raise ValidationError(f"station {r.station!r} reported at two locations")
    return dict(sorted(where.items()))


def scale_dataset(
    records: Sequence[WcuRecord],
    distance_factor: float = 10.0,
    time_factor: int = 4,
) -> tuple[list[WcuRecord], WindTrace]:
    """Shrink station distances and split each observation interval into finer slots.

    Each raw interval becomes ``time_factor`` slots repeating the raw
    observation, so hourly data with the default factor gives 15 minute slots.
    Missing readings (a station absent at a timestamp, or a gap in the
    timestamps) repeat the station's previous reading.
    """
    if not distance_factor > 0:
        raise ConfigurationError(f"distance factor must be > 0, got {distance_factor}")
    if int(time_factor) != time_factor or time_factor < 1:
        raise ConfigurationError(f"time factor must be a positive integer, got {time_factor}")
    time_factor = int(time_factor)
    if not records:
        raise ValidationError("cannot build a wind trace from an empty dataset")
    stations = station_locations(records)

    scaled = [
        replace(r, location=Point2D(r.location.x / distance_factor, r.location.y / distance_factor))
        for r in sorted(records, key=_sort_key)
    ]

    stamps = sorted({r.timestamp for r in records})
    gaps = [b - a for a, b in zip(stamps, stamps[1:])]
    interval = min(gaps) if gaps else timedelta(hours=1)
    by_stamp: dict[datetime, dict[str, GlobalWind]] = {}
    for r in records:
        by_stamp.setdefault(r.timestamp, {})[r.station] = r.wind

    first = by_stamp[stamps[0]]
    missing = set(stations) - first.keys()
    if missing:
        raise ValidationError(f"first observation lacks station(s) {sorted(missing)}")

    raw_slots = []
    current: dict[str, GlobalWind] = {}
    n_raw = round((stamps[-1] - stamps[0]) / interval) + 1
    for i in range(n_raw):
        current = {**current, **by_stamp.get(stamps[0] + i * interval, {})}
        raw_slots.append(dict(current))

    slot_duration = interval.total_seconds() / time_factor
    slots = [slot for slot in raw_slots for _ in range(time_factor)]
    return scaled, WindTrace(slot_duration, slots)


def synthetic_wcu_records(
    seed: int,
    n_stations: int = 12,
    hours: int = 48,
    side: float = 40_000.0,
    speed_alphabet: Sequence[float] = (0.0, 5.0, 10.0, 15.0),
    min_separation: float | None = None,
    start: datetime = datetime(2020, 1, 1),
) -> list[WcuRecord]:
    """Hourly readings from stations scattered over a square, for tests and demos.

    Stations are kept at least ``min_separation`` apart (default: a quarter
    of the spacing of a regular grid with the same count) and away from the
    square's border.
    """
    if n_stations < 1 or hours < 1:
        raise ConfigurationError("need at least one station and one hour")
    rng = np.random.default_rng(seed)
    if min_separation is None:
        min_separation = 0.25 * side / math.sqrt(n_stations)
    margin = 0.05 * side
    pts: list[tuple[float, float]] = []
    for _ in range(100_000):
        if len(pts) == n_stations:
            break
        p = tuple(rng.uniform(margin, side - margin, 2))
        if all(math.dist(p, q) >= min_separation for q in pts):
            pts.append(p)
    else:
        raise ConfigurationError(f"could not place {n_stations} stations {min_separation} m apart")
    alphabet = np.asarray(speed_alphabet, dtype=float)
    records = []
    for h in range(hours):
        stamp = start + timedelta(hours=h)
        for i, (x, y) in enumerate(pts):
            records.append(
                WcuRecord(
                    stamp,
                    float(alphabet[rng.integers(len(alphabet))]),
                    float(rng.uniform(0.0, 360.0)),
                    f"W{i:02d}",
                    Point2D(float(x), float(y)),
                )
            )
    return sorted(records, key=_sort_key)

"""Campaign engine: pre-process many graphs, fly every GRAY destination with
each policy over a budget sweep, and tabulate the outcomes as CSV."""

from __future__ import annotations

import configparser
import csv
import json
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from os import PathLike
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from dronemfp.energy_model import DroneParams
from dronemfp.errors import ConfigurationError, GenerationError, GeometryError
from dronemfp.mission import ALGORITHMS, MissionLog, MissionSpec, MissionStatus, VertexColor, at_budget, bound_cycles
from dronemfp.scenarios import (
    DEFAULT_SPEED_ALPHABET,
    BBox,
    ErConfig,
    TessellationKind,
    build_tessellation,
    generate_er,
    generate_wind_trace,
    load_wcu_csv,
    scale_dataset,
    station_locations,
    synthetic_wcu_records,
    tessellation_graph,
)
from dronemfp.td_graph import CostModel, DeliveryGraph, WindTrace
from dronemfp.wind_model import SUPPORTED_CLASS_COUNTS

STATUS_ORDER = (MissionStatus.CANCELED, MissionStatus.SUCCESS, MissionStatus.DELIVERED, MissionStatus.FAIL)
COLOR_ORDER = (VertexColor.GREEN, VertexColor.GRAY, VertexColor.BLACK)
ALGORITHM_ORDER = ("osp", "dsp", "gsp")
DEFAULT_FRACTIONS = tuple(round(0.1 * i, 10) for i in range(1, 11))

STATUS_HEADER = ("budget", "algorithm", "status", "count", "percent")
COLOR_HEADER = ("budget", "color", "count", "percent")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a campaign depends on; outputs are a pure function of it.

    ``scenario`` is ``"er"`` (random graphs, one per ``c`` and index) or
    ``"tessellation"`` (station graphs of each kind in ``kinds``). Budgets
    are fractions of ``budget`` in joules.
    """

    scenario: str = "er"
    seed: int = 0
    budget: float = 5.0e6
    budget_fractions: tuple[float, ...] = DEFAULT_FRACTIONS
    payload: float = 7.0
    speed: float = 20.0
    class_count: int = 4
    slot_duration: float = 60.0
    speed_alphabet: tuple[float, ...] = DEFAULT_SPEED_ALPHABET
    drone: DroneParams = field(default_factory=DroneParams)
    # random graphs
    c_values: tuple[float, ...] = (0.5, 1.0, 1.5, 2.0)
    graphs_per_c: int = 50
    n: int = 26
    area: float = 2000.0
    max_resamples: int = 1000
    # station graphs
    kinds: tuple[str, ...] = ("VG", "DG", "HG")
    wcu_csv: str | None = None
    stations: int = 12
    hours: int = 48
    station_area: float = 120_000.0
    distance_factor: float = 10.0
    time_factor: int = 4
    start_stride: int = 4
    workers: int = 1

    def __post_init__(self):
        if self.scenario not in ("er", "tessellation"):
            raise ConfigurationError(f"unknown scenario {self.scenario!r}; expected 'er' or 'tessellation'")
        if not self.budget_fractions or not all(0 < f <= 1 for f in self.budget_fractions):
            raise ConfigurationError(f"budget fractions must lie in (0, 1], got {self.budget_fractions}")
        if len(set(self.budget_fractions)) != len(self.budget_fractions):
            raise ConfigurationError("budget fractions must be distinct")
        if self.graphs_per_c < 1:
            raise ConfigurationError(f"graphs per c must be >= 1, got {self.graphs_per_c}")
        if self.class_count not in SUPPORTED_CLASS_COUNTS:
            raise ConfigurationError(f"class count must be one of {SUPPORTED_CLASS_COUNTS}, got {self.class_count}")
        for name in ("budget", "speed", "slot_duration", "area", "station_area"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.payload < 0 or self.payload > self.drone.max_payload:
            raise ConfigurationError(f"payload must lie in [0, {self.drone.max_payload}], got {self.payload}")
        if not self.speed_alphabet or min(self.speed_alphabet) < 0:
            raise ConfigurationError("speed alphabet must be non-empty and non-negative")
        for k in self.kinds:
            TessellationKind(k)
        if self.start_stride < 1 or self.workers < 1:
            raise ConfigurationError("start stride and workers must be >= 1")

    @property
    def budgets(self) -> tuple[float, ...]:
        return tuple(sorted(self.budget_fractions))

    @classmethod
    def tessellation_defaults(cls, **overrides) -> ExperimentConfig:
        """Station-graph settings: a slower, lighter drone and two budgets."""
        base = dict(scenario="tessellation", payload=2.0, speed=10.0, budget_fractions=(0.5, 1.0))
        base.update(overrides)
        return cls(**base)

    @classmethod
    def from_config(cls, path: str | PathLike, **overrides) -> ExperimentConfig:
        """Read ``[campaign]`` and ``[drone]`` sections of an INI-style file."""
        parser = configparser.ConfigParser()
        if not parser.read(path):
            raise ConfigurationError(f"cannot read config file {path}")
        values: dict = {}
        if parser.has_section("campaign"):
            values = _parse_fields(dict(parser.items("campaign")))
        if parser.has_section("drone"):
            values["drone"] = DroneParams.from_config(path)
        if values.get("scenario") == "tessellation" or overrides.get("scenario") == "tessellation":
            merged = {**values, **overrides}
            return cls.tessellation_defaults(**merged)
        return cls(**{**values, **overrides})


def _parse_fields(raw: dict[str, str]) -> dict:
    types = {f.name: f.type for f in fields(ExperimentConfig)}
    out = {}
    for key, text in raw.items():
        if key not in types or key == "drone":
            raise ConfigurationError(f"unknown campaign setting {key!r}")
        kind = types[key]
        try:
            if "tuple[float" in kind:
                out[key] = tuple(float(x) for x in text.split(",") if x.strip())
            elif "tuple[str" in kind:
                out[key] = tuple(x.strip() for x in text.split(",") if x.strip())
            elif kind == "int":
                out[key] = int(text)
            elif kind == "float":
                out[key] = float(text)
            else:
                out[key] = text.strip() or None
        except ValueError as exc:
            raise ConfigurationError(f"bad value for {key}: {exc}") from None
    return out


# -- summaries -----------------------------------------------------------------


def _percentages(counts: Sequence[int]) -> tuple[float, ...]:
    total = sum(counts)
    return tuple(round(100.0 * c / total, 1) if total else 0.0 for c in counts)


@dataclass(frozen=True)
class StatusSummary:
    """Mission outcome counts, in CANCELED, SUCCESS, DELIVERED, FAIL order."""

    counts: tuple[int, int, int, int] = (0, 0, 0, 0)

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def percentages(self) -> tuple[float, ...]:
        return _percentages(self.counts)

    def count(self, status: MissionStatus | str) -> int:
        return self.counts[STATUS_ORDER.index(MissionStatus(status))]

    def percent(self, status: MissionStatus | str) -> float:
        return self.percentages[STATUS_ORDER.index(MissionStatus(status))]

    def __add__(self, other: StatusSummary) -> StatusSummary:
        return StatusSummary(tuple(a + b for a, b in zip(self.counts, other.counts)))


@dataclass(frozen=True)
class ColorSummary:
    """Vertex color counts, in GREEN, GRAY, BLACK order."""

    counts: tuple[int, int, int] = (0, 0, 0)

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def percentages(self) -> tuple[float, ...]:
        return _percentages(self.counts)

    def percent(self, color: VertexColor | str) -> float:
        return self.percentages[COLOR_ORDER.index(VertexColor(color))]

    def __add__(self, other: ColorSummary) -> ColorSummary:
        return ColorSummary(tuple(a + b for a, b in zip(self.counts, other.counts)))


def summarize(logs: Iterable[MissionLog]) -> StatusSummary:
    tally = Counter(log.status for log in logs)
    if None in tally:
        raise ConfigurationError("cannot summarize a mission that has no final status")
    return StatusSummary(tuple(tally[s] for s in STATUS_ORDER))


@dataclass
class ScenarioSummary:
    """Aggregates for one scenario label (one ``c`` value or one graph kind)."""

    name: str
    budgets: tuple[float, ...]
    status: dict[tuple[float, str], StatusSummary]
    colors: dict[float, ColorSummary]
    graphs: int = 0
    skipped: int = 0

    @classmethod
    def empty(cls, name: str, budgets: Sequence[float]) -> ScenarioSummary:
        return cls(
            name,
            tuple(budgets),
            {(b, a): StatusSummary() for b in budgets for a in ALGORITHM_ORDER},
            {b: ColorSummary() for b in budgets},
        )

    def merge(self, other: ScenarioSummary) -> None:
        for key, s in other.status.items():
            self.status[key] = self.status[key] + s
        for key, c in other.colors.items():
            self.colors[key] = self.colors[key] + c
        self.graphs += other.graphs
        self.skipped += other.skipped

    def same_tables(self, other: ScenarioSummary) -> bool:
        return (self.name, self.budgets, self.status, self.colors) == (
            other.name,
            other.budgets,
            other.status,
            other.colors,
        )


@dataclass(frozen=True)
class MissionRecord:
    """One (destination, algorithm, budget) outcome, as written to the mission log."""

    scenario: str
    graph: int
    start_slot: int
    destination: int
    algorithm: str
    budget: float
    status: str
    consumed: float
    edges: int


@dataclass
class CampaignResult:
    config: ExperimentConfig
    scenarios: list[ScenarioSummary]
    missions: list[MissionRecord]


# -- campaign ------------------------------------------------------------------


def _child_seed(root: int, *path: int) -> int:
    return int(np.random.SeedSequence([root, *path]).generate_state(1)[0])


def trace_horizon(graph: DeliveryGraph, speed: float, slot_duration: float) -> int:
    """Slots a mission can use: at most 2(|V| - 1) edges, each no longer than the longest."""
    longest = 2 * (graph.n_vertices - 1) * float(graph.lengths.max()) / speed
    return int(math.ceil(longest / slot_duration)) + 1


@dataclass(frozen=True)
class _Job:
    label: str
    index: int
    graph_seed: int
    trace_seed: int
    c: float = 0.0


def _missions_for_graph(
    config: ExperimentConfig,
    label: str,
    index: int,
    graph: DeliveryGraph,
    trace: WindTrace,
    start_slots: Sequence[int],
) -> tuple[ScenarioSummary, list[MissionRecord]]:
    budgets = config.budgets
    summary = ScenarioSummary.empty(label, budgets)
    summary.graphs = 1
    params = config.drone
    bounds = bound_cycles(graph, params, config.payload, config.speed, config.class_count, config.speed_alphabet)
    gray_at: dict[float, list[int]] = {}
    for f in budgets:
        colors = bounds.colors(f * config.budget)
        tally = Counter(colors.values())
        summary.colors[f] = ColorSummary(tuple(tally[c] for c in COLOR_ORDER))
        gray_at[f] = sorted(v for v, c in colors.items() if c is VertexColor.GRAY)

    model = CostModel(graph, trace, params, config.speed, config.class_count)
    records = []
    destinations = sorted({v for vs in gray_at.values() for v in vs})
    for t0 in start_slots:
        for v in destinations:
            spec = MissionSpec(v, math.inf, config.payload, config.speed, config.class_count, t0)
            for name in ALGORITHM_ORDER:
                full = ALGORITHMS[name](graph, trace, params, spec, model=model)
                for f in budgets:
                    if v not in gray_at[f]:
                        continue
                    log = at_budget(full, f * config.budget)
                    key = (f, name)
                    counts = list(summary.status[key].counts)
                    counts[STATUS_ORDER.index(log.status)] += 1
                    summary.status[key] = StatusSummary(tuple(counts))
                    records.append(
                        MissionRecord(label, index, t0, v, name, f, log.status.value, log.consumed, len(log.events))
                    )
    # colors are counted once per graph, missions once per start slot
    return summary, records


def _run_er_job(config: ExperimentConfig, job: _Job) -> tuple[ScenarioSummary, list[MissionRecord]]:
    try:
        graph = generate_er(
            ErConfig(config.n, job.c, config.area, job.graph_seed), max_resamples=config.max_resamples
        )
    except GenerationError:
        summary = ScenarioSummary.empty(job.label, config.budgets)
        summary.skipped = 1
        return summary, []
    horizon = trace_horizon(graph, config.speed, config.slot_duration)
    trace = generate_wind_trace(job.trace_seed, horizon, config.slot_duration, config.speed_alphabet)
    return _missions_for_graph(config, job.label, job.index, graph, trace, [0])


def er_label(c: float) -> str:
    return f"er_c{c:g}"


def _er_jobs(config: ExperimentConfig) -> list[_Job]:
    return [
        _Job(er_label(c), i, _child_seed(config.seed, ci, i, 0), _child_seed(config.seed, ci, i, 1), c)
        for ci, c in enumerate(config.c_values)
        for i in range(config.graphs_per_c)
    ]


def station_scenario(config: ExperimentConfig) -> tuple[dict[str, object], WindTrace, BBox]:
    """Scaled station layout, its wind trace and the clipping box."""
    if config.wcu_csv:
        records = load_wcu_csv(config.wcu_csv)
    else:
        records = synthetic_wcu_records(
            config.seed, config.stations, config.hours, config.station_area, config.speed_alphabet
        )
    scaled, trace = scale_dataset(records, config.distance_factor, config.time_factor)
    where = station_locations(scaled)
    if config.wcu_csv:
        extent = max(
            max(p.x for p in where.values()) - min(p.x for p in where.values()),
            max(p.y for p in where.values()) - min(p.y for p in where.values()),
        )
        bbox = BBox.around(list(where.values()), 0.1 * extent)
    else:
        side = config.station_area / config.distance_factor
        bbox = BBox(0.0, 0.0, side, side)
    return where, trace, bbox


def _run_tessellation(config: ExperimentConfig) -> list[tuple[ScenarioSummary, list[MissionRecord]]]:
    where, trace, bbox = station_scenario(config)
    tess = build_tessellation(list(where.values()), bbox, list(where))
    # one mission per destination and raw observation, so every hour of data is used
    starts = list(range(0, trace.horizon, config.start_stride))
    out = []
    for i, kind in enumerate(config.kinds):
        label = TessellationKind(kind).value
        try:
            graph = tessellation_graph(tess, kind)
        except GeometryError:
            summary = ScenarioSummary.empty(label, config.budgets)
            summary.skipped = 1
            out.append((summary, []))
            continue
        out.append(_missions_for_graph(config, label, i, graph, trace, starts))
    return out


def run_campaign(config: ExperimentConfig) -> CampaignResult:
    """Run every configured scenario; graphs that cannot be generated are skipped and counted."""
    if config.scenario == "er":
        jobs = _er_jobs(config)
        if config.workers > 1:
            with ProcessPoolExecutor(config.workers) as pool:
                parts = list(pool.map(_run_er_job, [config] * len(jobs), jobs))
        else:
            parts = [_run_er_job(config, job) for job in jobs]
        labels = [er_label(c) for c in config.c_values]
    else:
        parts = _run_tessellation(config)
        labels = [TessellationKind(k).value for k in config.kinds]

    merged = {label: ScenarioSummary.empty(label, config.budgets) for label in labels}
    missions = []
    for summary, records in parts:
        merged[summary.name].merge(summary)
        missions.extend(records)
    return CampaignResult(config, [merged[label] for label in labels], missions)


# -- output --------------------------------------------------------------------


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def status_rows(summary: ScenarioSummary) -> list[tuple]:
    rows = []
    for b in summary.budgets:
        for a in ALGORITHM_ORDER:
            s = summary.status[(b, a)]
            for status, count, pct in zip(STATUS_ORDER, s.counts, s.percentages):
                rows.append((repr(b), a, status.value, count, f"{pct:.1f}"))
    return rows


def color_rows(summary: ScenarioSummary) -> list[tuple]:
    rows = []
    for b in summary.budgets:
        c = summary.colors[b]
        for color, count, pct in zip(COLOR_ORDER, c.counts, c.percentages):
            rows.append((repr(b), color.value, count, f"{pct:.1f}"))
    return rows


def emit_outputs(
    result: CampaignResult | Sequence[ScenarioSummary],
    directory: str | PathLike,
) -> list[Path]:
    """Write ``<scenario>_status.csv`` and ``<scenario>_colors.csv`` per scenario.

    Given a full :class:`CampaignResult` the per-mission outcomes also go to
    ``missions.jsonl`` and the configuration plus graph counts to
    ``campaign.json``. Budgets are written as fractions of the full battery.
    """
    out = Path(directory)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror or exc}") from exc
    scenarios = result.scenarios if isinstance(result, CampaignResult) else list(result)
    written = []
    for s in scenarios:
        p = out / f"{s.name}_status.csv"
        _write_csv(p, STATUS_HEADER, status_rows(s))
        q = out / f"{s.name}_colors.csv"
        _write_csv(q, COLOR_HEADER, color_rows(s))
        written += [p, q]
    if isinstance(result, CampaignResult):
        p = out / "missions.jsonl"
        with open(p, "w", encoding="utf-8") as fh:
            for m in result.missions:
                fh.write(json.dumps(asdict(m), sort_keys=True) + "\n")
        q = out / "campaign.json"
        manifest = {
            "config": _config_dict(result.config),
            "scenarios": {s.name: {"graphs": s.graphs, "skipped": s.skipped} for s in scenarios},
        }
        q.write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n", encoding="utf-8")
        written += [p, q]
    return written


def _config_dict(config: ExperimentConfig) -> dict:
    data = asdict(config)
    data["drone"] = asdict(config.drone)
    return data


def read_outputs(directory: str | PathLike, names: Sequence[str]) -> list[ScenarioSummary]:
    """Parse the status and color CSVs written by :func:`emit_outputs`."""
    out = []
    for name in names:
        status: dict[tuple[float, str], list[int]] = {}
        colors: dict[float, list[int]] = {}
        budgets: list[float] = []
        with open(Path(directory) / f"{name}_status.csv", newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            for row in reader:
                b = float(row["budget"])
                if b not in budgets:
                    budgets.append(b)
                counts = status.setdefault((b, row["algorithm"]), [0, 0, 0, 0])
                counts[STATUS_ORDER.index(MissionStatus(row["status"]))] = int(row["count"])
        with open(Path(directory) / f"{name}_colors.csv", newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                counts = colors.setdefault(float(row["budget"]), [0, 0, 0])
                counts[COLOR_ORDER.index(VertexColor(row["color"]))] = int(row["count"])
        out.append(
            ScenarioSummary(
                name,
                tuple(budgets),
                {k: StatusSummary(tuple(v)) for k, v in status.items()},
                {k: ColorSummary(tuple(v)) for k, v in colors.items()},
            )
        )
    return out


def recount(missions: Iterable[MissionRecord | dict], scenario: str, budgets: Sequence[float]) -> ScenarioSummary:
    """Rebuild the status tables of one scenario from per-mission records."""
    summary = ScenarioSummary.empty(scenario, budgets)
    tally: Counter = Counter()
    for m in missions:
        m = m if isinstance(m, dict) else asdict(m)
        if m["scenario"] == scenario:
            tally[(m["budget"], m["algorithm"], m["status"])] += 1
    for b in budgets:
        for a in ALGORITHM_ORDER:
            summary.status[(b, a)] = StatusSummary(tuple(tally[(b, a, s.value)] for s in STATUS_ORDER))
    return summary


def with_overrides(config: ExperimentConfig, **changes) -> ExperimentConfig:
    return replace(config, **{k: v for k, v in changes.items() if v is not None})

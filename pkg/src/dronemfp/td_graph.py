"""Static delivery geometry, per-slot wind traces and the snapshot costs they induce."""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field
from os import PathLike
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from dronemfp.energy_model import DroneParams, UnitaryCostTable
from dronemfp.errors import GeometryError, PathError, TraceError, ValidationError
from dronemfp.wind_model import GlobalWind, Point2D, classify_array, edge_angle

GRAPH_SCHEMA = "dronemfp.graph/1"
TRACE_SCHEMA = "dronemfp.trace/1"

# a single region id, or (tail-side region, head-side region) for an edge
# split between two cells
WindKey = Union[str, tuple[str, str]]


@dataclass(frozen=True)
class Edge:
    id: int
    tail: int
    head: int
    length: float
    wind_key: WindKey

    @property
    def two_region(self) -> bool:
        return isinstance(self.wind_key, tuple)

    @property
    def regions(self) -> tuple[str, ...]:
        return self.wind_key if isinstance(self.wind_key, tuple) else (self.wind_key,)


class DeliveryGraph:
    """Directed delivery graph whose topology never changes over time.

    Edges are addressed by their position in :attr:`edges` (the edge index);
    ``Edge.id`` is the external identifier used in files and logs.
    """

    def __init__(self, vertices: Mapping[int, Point2D], edges: Sequence[Edge], depot: int):
        self.vertices: dict[int, Point2D] = dict(vertices)
        self.edges: list[Edge] = list(edges)
        self.depot = depot
        self._validate()

        self.psi = np.array([edge_angle(self.vertices[e.tail], self.vertices[e.head]) for e in self.edges])
        self.lengths = np.array([e.length for e in self.edges], dtype=float)
        out: dict[int, list[int]] = {v: [] for v in self.vertices}
        for idx, e in enumerate(self.edges):
            out[e.tail].append(idx)
        for v in out:
            out[v].sort(key=lambda i: (self.edges[i].head, self.edges[i].id))
        self.out_edges = out
        self.edge_index = {e.id: i for i, e in enumerate(self.edges)}
        self.pair_index = {(e.tail, e.head): i for i, e in enumerate(self.edges)}

    def _validate(self) -> None:
        if self.depot not in self.vertices:
            raise ValidationError(f"depot {self.depot} is not a vertex")
        ids = set()
        pairs: dict[tuple[int, int], float] = {}
        for e in self.edges:
            if e.id in ids:
                raise ValidationError(f"duplicate edge id {e.id}")
            ids.add(e.id)
            if e.tail == e.head:
                raise ValidationError(f"edge {e.id} is a self-loop")
            if e.tail not in self.vertices or e.head not in self.vertices:
                raise ValidationError(f"edge {e.id} references an unknown vertex")
            if not (math.isfinite(e.length) and e.length > 0):
                raise ValidationError(f"edge {e.id} has non-positive length {e.length}")
            if (e.tail, e.head) in pairs:
                raise ValidationError(f"parallel edges {e.tail}->{e.head}")
            pairs[(e.tail, e.head)] = e.length
        for (u, v), length in pairs.items():
            back = pairs.get((v, u))
            if back is None or not math.isclose(back, length, rel_tol=1e-12):
                raise ValidationError(f"edge {u}->{v} lacks a reverse counterpart of equal length")

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def regions(self) -> set[str]:
        return {r for e in self.edges for r in e.regions}

    def neighbors(self, v: int) -> list[int]:
        return [self.edges[i].head for i in self.out_edges[v]]

    def is_connected(self) -> bool:
        seen = {self.depot}
        stack = [self.depot]
        while stack:
            u = stack.pop()
            for w in self.neighbors(u):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self.vertices)

    def check_path(self, path: Sequence[int]) -> None:
        for a, b in zip(path, path[1:]):
            if self.edges[a].head != self.edges[b].tail:
                raise PathError(f"edges {self.edges[a].id} and {self.edges[b].id} are not consecutive")

    def path_vertices(self, path: Sequence[int]) -> list[int]:
        if not path:
            return []
        return [self.edges[path[0]].tail] + [self.edges[i].head for i in path]

    def path_length(self, path: Iterable[int]) -> float:
        return sum(self.edges[i].length for i in path)

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "schema": GRAPH_SCHEMA,
            "depot": self.depot,
            "vertices": [{"id": v, "x": p.x, "y": p.y} for v, p in self.vertices.items()],
            "edges": [
                {
                    "id": e.id,
                    "tail": e.tail,
                    "head": e.head,
                    "length": e.length,
                    "wind_key": list(e.wind_key) if e.two_region else e.wind_key,
                }
                for e in self.edges
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> DeliveryGraph:
        if data.get("schema") != GRAPH_SCHEMA:
            raise ValidationError(f"expected schema {GRAPH_SCHEMA!r}, got {data.get('schema')!r}")
        vertices = {int(v["id"]): Point2D(float(v["x"]), float(v["y"])) for v in data["vertices"]}
        edges = []
        for e in data["edges"]:
            key = e["wind_key"]
            edges.append(
                Edge(
                    int(e["id"]),
                    int(e["tail"]),
                    int(e["head"]),
                    float(e["length"]),
                    tuple(str(k) for k in key) if isinstance(key, list) else str(key),
                )
            )
        return cls(vertices, edges, int(data["depot"]))

    def save(self, path: str | PathLike) -> None:
        _dump_json(self.to_dict(), path)

    @classmethod
    def load(cls, path: str | PathLike) -> DeliveryGraph:
        return cls.from_dict(_load_json(path))


def bidirectional_graph(
    points: Mapping[int, Point2D],
    pairs: Iterable[tuple[int, int, WindKey, WindKey]],
    depot: int,
) -> DeliveryGraph:
    """Split undirected segments into two directed edges of equal length.

    ``pairs`` yields ``(u, v, key_uv, key_vu)``; edge ids are assigned in order.
    """
    edges = []
    for u, v, key_uv, key_vu in pairs:
        length = points[u].distance(points[v])
        if length <= 0:
            raise GeometryError(f"vertices {u} and {v} coincide")
        edges.append(Edge(len(edges), u, v, length, key_uv))
        edges.append(Edge(len(edges), v, u, length, key_vu))
    return DeliveryGraph(points, edges, depot)


@dataclass
class WindTrace:
    """Per-slot wind per region. Slots past the horizon repeat the last one."""

    slot_duration: float
    slots: list[dict[str, GlobalWind]]

    def __post_init__(self):
        if not self.slot_duration > 0:
            raise ValidationError(f"slot duration must be > 0, got {self.slot_duration}")
        if not self.slots:
            raise ValidationError("a wind trace needs at least one slot")

    @property
    def horizon(self) -> int:
        return len(self.slots)

    def clamp(self, t: int) -> int:
        if t < 0:
            raise ValidationError(f"slot index must be >= 0, got {t}")
        return min(t, self.horizon - 1)

    def wind(self, t: int, region: str) -> GlobalWind:
        try:
            return self.slots[self.clamp(t)][region]
        except KeyError:
            raise TraceError(f"no wind assigned to region {region!r} at slot {t}") from None

    def check_covers(self, regions: Iterable[str]) -> None:
        regions = set(regions)
        for t, slot in enumerate(self.slots):
            missing = regions - slot.keys()
            if missing:
                raise TraceError(f"slot {t} lacks region(s) {sorted(missing)}")

    @classmethod
    def constant(cls, wind: Mapping[str, GlobalWind], slot_duration: float = 60.0) -> WindTrace:
        return cls(slot_duration, [dict(wind)])

    def to_dict(self) -> dict:
        return {
            "schema": TRACE_SCHEMA,
            "slot_duration": self.slot_duration,
            "horizon": self.horizon,
            "slots": [
                {r: [w.speed_ms, w.direction_deg] for r, w in sorted(slot.items())} for slot in self.slots
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> WindTrace:
        if data.get("schema") != TRACE_SCHEMA:
            raise ValidationError(f"expected schema {TRACE_SCHEMA!r}, got {data.get('schema')!r}")
        slots = [{str(r): GlobalWind(float(s), float(d)) for r, (s, d) in slot.items()} for slot in data["slots"]]
        if "horizon" in data and data["horizon"] != len(slots):
            raise ValidationError(f"horizon {data['horizon']} does not match {len(slots)} slots")
        return cls(float(data["slot_duration"]), slots)

    def save(self, path: str | PathLike) -> None:
        _dump_json(self.to_dict(), path)

    @classmethod
    def load(cls, path: str | PathLike) -> WindTrace:
        return cls.from_dict(_load_json(path))


@dataclass(frozen=True)
class Snapshot:
    """Edge costs (J) of one slot for one payload, indexed by edge index."""

    graph: DeliveryGraph = field(repr=False)
    slot: int
    payload: float
    costs: tuple[float, ...]

    @classmethod
    def uniform(cls, graph: DeliveryGraph, mu: float, payload: float = 0.0) -> Snapshot:
        return cls(graph, 0, payload, tuple((mu * graph.lengths).tolist()))


class CostModel:
    """Prices a graph under a wind trace for one drone, ground speed and class count.

    Snapshots are computed lazily and cached; after construction the model can
    be shared by any number of mission runs on the same graph and trace.
    """

    def __init__(self, graph: DeliveryGraph, trace: WindTrace, params: DroneParams, ground_speed: float, k: int):
        trace.check_covers(graph.regions())
        self.graph = graph
        self.trace = trace
        self.params = params
        self.ground_speed = ground_speed
        self.k = k
        self.table = UnitaryCostTable(params, ground_speed, k)
        self._regions = sorted(graph.regions())
        rid = {r: i for i, r in enumerate(self._regions)}
        self._side_a = np.array([rid[e.regions[0]] for e in graph.edges], dtype=np.int64)
        self._side_b = np.array([rid[e.regions[-1]] for e in graph.edges], dtype=np.int64)
        self._cache: dict[tuple[int, float], Snapshot] = {}

    def traversal_time(self, edge_index: int) -> float:
        return self.graph.edges[edge_index].length / self.ground_speed

    def snapshot(self, t: int, payload: float) -> Snapshot:
        key = (self.trace.clamp(t), payload)
        snap = self._cache.get(key)
        if snap is None:
            snap = self._compute(key[0], payload)
            self._cache[key] = snap
        return snap

    def _compute(self, t: int, payload: float) -> Snapshot:
        graph = self.graph
        if not graph.edges:
            return Snapshot(graph, t, payload, ())
        winds = [self.trace.wind(t, r) for r in self._regions]
        directions = np.array([w.direction_deg for w in winds])
        mu_table = np.array([self.table.mu_by_class(payload, w.speed_ms) for w in winds])
        rel_a = np.mod(directions[self._side_a] - graph.psi, 360.0)
        rel_b = np.mod(directions[self._side_b] - graph.psi, 360.0)
        mu_a = mu_table[self._side_a, classify_array(rel_a, self.k)]
        mu_b = mu_table[self._side_b, classify_array(rel_b, self.k)]
        mu = (mu_a + mu_b) / 2.0
        return Snapshot(graph, t, payload, tuple((mu * graph.lengths).tolist()))


def snapshot_costs(
    graph: DeliveryGraph,
    trace: WindTrace,
    t: int,
    payload: float,
    params: DroneParams,
    k: int,
    ground_speed: float | None = None,
) -> Snapshot:
    speed = params.cruise_speed if ground_speed is None else ground_speed
    return CostModel(graph, trace, params, speed, k).snapshot(t, payload)


def departure_slot(elapsed: float, slot_duration: float) -> int:
    if elapsed < 0:
        raise ValidationError(f"elapsed time must be >= 0, got {elapsed}")
    return math.floor(elapsed / slot_duration)


def planned_cost(snapshot: Snapshot, path: Sequence[int]) -> float:
    snapshot.graph.check_path(path)
    return sum(snapshot.costs[i] for i in path)


@dataclass
class Walk:
    """An executed edge sequence with the cost charged to every edge."""

    edges: list[int]
    start_slot: int
    departure_slots: list[int]
    costs: list[float]

    @property
    def total(self) -> float:
        return sum(self.costs)


def actual_cost(
    model: CostModel,
    path: Sequence[int],
    start_slot: int = 0,
    payloads: Sequence[float] | float = 0.0,
) -> Walk:
    """Charge each edge at the snapshot of the slot in which it is entered."""
    model.graph.check_path(path)
    if isinstance(payloads, (int, float)):
        payloads = [float(payloads)] * len(path)
    if len(payloads) != len(path):
        raise PathError("payload schedule length differs from path length")
    dur = model.trace.slot_duration
    clock = start_slot * dur
    slots, costs = [], []
    for idx, payload in zip(path, payloads):
        t = departure_slot(clock, dur)
        slots.append(t)
        costs.append(model.snapshot(t, payload).costs[idx])
        clock += model.traversal_time(idx)
    return Walk(list(path), start_slot, slots, costs)


def shortest_path(
    snapshot: Snapshot,
    src: int,
    dst: int,
    forbidden: frozenset[int] | set[int] = frozenset(),
) -> list[int] | None:
    """Dijkstra over one snapshot, skipping ``forbidden`` vertices.

    Returns edge indices, ``[]`` when ``src == dst`` and ``None`` when ``dst``
    cannot be reached. Ties resolve toward smaller vertex ids.
    """
    if src in forbidden:
        raise ValidationError(f"source {src} is forbidden")
    if src == dst:
        return []
    if dst in forbidden:
        return None
    graph = snapshot.graph
    costs = snapshot.costs
    edges = graph.edges
    dist = {src: 0.0}
    pred: dict[int, int] = {}
    done = set()
    heap = [(0.0, src)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        if u == dst:
            break
        done.add(u)
        for i in graph.out_edges[u]:
            w = edges[i].head
            if w in forbidden or w in done:
                continue
            nd = d + costs[i]
            if nd < dist.get(w, math.inf):
                dist[w] = nd
                pred[w] = i
                heapq.heappush(heap, (nd, w))
    if dst not in pred:
        return None
    path = []
    v = dst
    while v != src:
        i = pred[v]
        path.append(i)
        v = edges[i].tail
    path.reverse()
    return path


@dataclass(frozen=True)
class Cycle:
    outbound: list[int]
    inbound: list[int]
    cost: float

    @property
    def edges(self) -> list[int]:
        return self.outbound + self.inbound


def shortest_cycle(loaded: Snapshot, empty: Snapshot, v0: int, vc: int) -> Cycle | None:
    """Cheapest loaded path ``v0 -> vc`` followed by the cheapest empty path back."""
    if v0 == vc:
        raise ValidationError("depot and destination coincide")
    out = shortest_path(loaded, v0, vc)
    if out is None:
        return None
    back = shortest_path(empty, vc, v0)
    if back is None:
        return None
    # one left-to-right sum, the order in which a flight accumulates charges
    cost = sum([loaded.costs[i] for i in out] + [empty.costs[i] for i in back])
    return Cycle(out, back, cost)


def _dump_json(data: dict, path: str | PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _load_json(path: str | PathLike) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from exc

"""Mission feasibility: vertex pre-classification, online routing policies and a
full-knowledge oracle.

Every policy flies one loaded leg (depot to customer) and one empty leg back.
Edge costs are charged at the snapshot of the slot in which the edge is
entered; the budget test runs right after charging, so running dry on the
edge into the customer is a FAIL, not a delivery.
"""

from __future__ import annotations

import enum
import heapq
import itertools
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

from dronemfp.energy_model import DroneParams, UnitaryCostTable
from dronemfp.errors import PayloadError, ResourceError, ValidationError
from dronemfp.td_graph import (
    CostModel,
    DeliveryGraph,
    Snapshot,
    Walk,
    WindTrace,
    actual_cost,
    departure_slot,
    shortest_cycle,
    shortest_path,
)

DEFAULT_WIND_SPEEDS = (0.0, 5.0, 10.0, 15.0)
ORACLE_MAX_HORIZON = 64
ORACLE_MAX_STATES = 2_000_000


class MissionStatus(str, enum.Enum):
    CANCELED = "CANCELED"
    FAIL = "FAIL"
    DELIVERED = "DELIVERED"
    SUCCESS = "SUCCESS"


class VertexColor(str, enum.Enum):
    GREEN = "GREEN"
    GRAY = "GRAY"
    BLACK = "BLACK"


@dataclass(frozen=True)
class MissionSpec:
    destination: int
    budget: float
    payload: float
    ground_speed: float
    class_count: int = 4
    start_slot: int = 0

    def __post_init__(self):
        if not self.budget > 0:
            raise ValidationError(f"budget must be > 0, got {self.budget}")
        if self.payload < 0:
            raise PayloadError(f"payload must be >= 0, got {self.payload}")
        if not self.ground_speed > 0:
            raise ValidationError(f"ground speed must be > 0, got {self.ground_speed}")
        if self.start_slot < 0:
            raise ValidationError(f"start slot must be >= 0, got {self.start_slot}")

    def validate_for(self, graph: DeliveryGraph, params: DroneParams) -> None:
        if self.destination not in graph.vertices:
            raise ValidationError(f"destination {self.destination} is not a vertex")
        if self.destination == graph.depot:
            raise ValidationError("destination must differ from the depot")
        if self.payload > params.max_payload:
            raise PayloadError(f"payload {self.payload} kg exceeds max payload {params.max_payload} kg")


@dataclass
class EdgeEvent:
    edge_id: int
    tail: int
    head: int
    departure_slot: int
    cost: float
    residual: float


@dataclass
class MissionLog:
    algorithm: str
    destination: int
    budget: float
    events: list[EdgeEvent] = field(default_factory=list)
    delivered_after: int | None = None
    status: MissionStatus | None = None
    planned_cost: float | None = None

    @property
    def consumed(self) -> float:
        return sum(e.cost for e in self.events)

    @property
    def residual(self) -> float:
        return self.events[-1].residual if self.events else self.budget

    @property
    def delivered(self) -> bool:
        return self.delivered_after is not None

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "destination": self.destination,
            "budget": self.budget,
            "status": self.status.value if self.status else None,
            "consumed": self.consumed,
            "planned_cost": self.planned_cost,
            "delivered_after": self.delivered_after,
            "events": [asdict(e) for e in self.events],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> MissionLog:
        return cls(
            algorithm=data["algorithm"],
            destination=data["destination"],
            budget=data["budget"],
            events=[EdgeEvent(**e) for e in data["events"]],
            delivered_after=data["delivered_after"],
            status=MissionStatus(data["status"]) if data["status"] else None,
            planned_cost=data.get("planned_cost"),
        )


# -- pre-processing ------------------------------------------------------------


@dataclass(frozen=True)
class BoundCycles:
    """Per-destination shortest cycle costs on the bound graphs (inf if unreachable)."""

    upper: dict[int, float]
    lower: dict[int, float]

    def colors(self, budget: float) -> dict[int, VertexColor]:
        out = {}
        for v, up in self.upper.items():
            low = self.lower[v]
            if low > budget:
                out[v] = VertexColor.BLACK
            elif up <= budget:
                out[v] = VertexColor.GREEN
            else:
                out[v] = VertexColor.GRAY
        return out


def bound_cycles(
    graph: DeliveryGraph,
    params: DroneParams,
    payload: float,
    ground_speed: float,
    k: int = 4,
    wind_speeds: Iterable[float] = DEFAULT_WIND_SPEEDS,
) -> BoundCycles:
    table = UnitaryCostTable(params, ground_speed, k)
    wind_speeds = tuple(wind_speeds)
    loaded = table.bounds(payload, wind_speeds)
    empty = table.bounds(0.0, wind_speeds)
    upper_out = Snapshot.uniform(graph, loaded.eps_max, payload)
    upper_back = Snapshot.uniform(graph, empty.eps_max, 0.0)
    lower_out = Snapshot.uniform(graph, loaded.eps_min, payload)
    lower_back = Snapshot.uniform(graph, empty.eps_min, 0.0)
    upper, lower = {}, {}
    for v in graph.vertices:
        if v == graph.depot:
            continue
        cu = shortest_cycle(upper_out, upper_back, graph.depot, v)
        cl = shortest_cycle(lower_out, lower_back, graph.depot, v)
        upper[v] = math.inf if cu is None else cu.cost
        lower[v] = math.inf if cl is None else cl.cost
    return BoundCycles(upper, lower)


def upper_bound_cycle(graph, params, payload, ground_speed, destination, k=4, wind_speeds=DEFAULT_WIND_SPEEDS):
    """The worst-case-priced cycle whose cost decides GREEN."""
    table = UnitaryCostTable(params, ground_speed, k)
    out = Snapshot.uniform(graph, table.bounds(payload, wind_speeds).eps_max, payload)
    back = Snapshot.uniform(graph, table.bounds(0.0, wind_speeds).eps_max, 0.0)
    return shortest_cycle(out, back, graph.depot, destination)


def preprocess(
    graph: DeliveryGraph,
    params: DroneParams,
    budget: float,
    payload: float,
    ground_speed: float,
    k: int = 4,
    wind_speeds: Iterable[float] = DEFAULT_WIND_SPEEDS,
) -> dict[int, VertexColor]:
    """Color every non-depot vertex GREEN, GRAY or BLACK for the given budget."""
    return bound_cycles(graph, params, payload, ground_speed, k, wind_speeds).colors(budget)


# -- online policies -----------------------------------------------------------


class _Flight:
    """Mutable bookkeeping of one mission run."""

    def __init__(self, model: CostModel, spec: MissionSpec, log: MissionLog):
        self.model = model
        self.spec = spec
        self.log = log
        self.consumed = 0.0
        self.clock = spec.start_slot * model.trace.slot_duration
        self.delivered = False

    @property
    def slot(self) -> int:
        return departure_slot(self.clock, self.model.trace.slot_duration)

    @property
    def payload(self) -> float:
        return 0.0 if self.delivered else self.spec.payload

    def snapshot(self) -> Snapshot:
        return self.model.snapshot(self.slot, self.payload)

    def fly(self, edge_index: int) -> bool:
        """Charge one edge; return False when the battery ran dry on it."""
        edge = self.model.graph.edges[edge_index]
        slot = self.slot
        cost = self.model.snapshot(slot, self.payload).costs[edge_index]
        self.consumed += cost
        residual = self.spec.budget - self.consumed
        self.log.events.append(EdgeEvent(edge.id, edge.tail, edge.head, slot, cost, residual))
        self.clock += self.model.traversal_time(edge_index)
        if residual < 0:
            self.log.status = MissionStatus.DELIVERED if self.delivered else MissionStatus.FAIL
            return False
        if edge.head == self.spec.destination and not self.delivered:
            self.delivered = True
            self.log.delivered_after = len(self.log.events) - 1
        return True

    def stranded(self) -> None:
        self.log.status = MissionStatus.DELIVERED if self.delivered else MissionStatus.FAIL


def _model_for(graph, trace, params, spec, model):
    spec.validate_for(graph, params)
    if model is None:
        return CostModel(graph, trace, params, spec.ground_speed, spec.class_count)
    if model.graph is not graph or model.ground_speed != spec.ground_speed or model.k != spec.class_count:
        raise ValidationError("cost model does not match the mission")
    return model


def run_osp(
    graph: DeliveryGraph,
    trace: WindTrace,
    params: DroneParams,
    spec: MissionSpec,
    model: CostModel | None = None,
) -> MissionLog:
    """Plan the cheapest cycle once at the start snapshot, then fly it blindly."""
    model = _model_for(graph, trace, params, spec, model)
    log = MissionLog("osp", spec.destination, spec.budget)
    t0 = spec.start_slot
    cycle = shortest_cycle(model.snapshot(t0, spec.payload), model.snapshot(t0, 0.0), graph.depot, spec.destination)
    if cycle is None:
        log.status = MissionStatus.CANCELED
        return log
    log.planned_cost = cycle.cost
    if cycle.cost > spec.budget:
        log.status = MissionStatus.CANCELED
        return log
    flight = _Flight(model, spec, log)
    for idx in cycle.edges:
        if not flight.fly(idx):
            return log
    log.status = MissionStatus.SUCCESS
    return log


def _run_online(model: CostModel, spec: MissionSpec, log: MissionLog, step: Callable) -> MissionLog:
    graph = model.graph
    flight = _Flight(model, spec, log)
    here, target = graph.depot, spec.destination
    removed: set[int] = set()
    # each leg removes one vertex per step, so a leg is at most |V| - 1 edges
    for _ in range(2 * graph.n_vertices):
        idx = step(flight, here, target, removed)
        if idx is None:
            flight.stranded()
            return log
        removed.add(here)
        if not flight.fly(idx):
            return log
        here = graph.edges[idx].head
        if here == target:
            if target == graph.depot:
                log.status = MissionStatus.SUCCESS
                return log
            removed = set()
            target = graph.depot
    raise AssertionError("online policy exceeded 2(|V| - 1) steps")


def _dsp_step(flight: _Flight, here: int, target: int, removed: set[int]) -> int | None:
    path = shortest_path(flight.snapshot(), here, target, removed)
    return path[0] if path else None


def _gsp_step(flight: _Flight, here: int, target: int, removed: set[int]) -> int | None:
    graph = flight.model.graph
    costs = flight.snapshot().costs
    options = [i for i in graph.out_edges[here] if graph.edges[i].head not in removed]
    if not options:
        return None
    return min(options, key=lambda i: (costs[i], graph.edges[i].id))


def run_dsp(graph, trace, params, spec: MissionSpec, model: CostModel | None = None) -> MissionLog:
    """Re-plan the cheapest path from every vertex and follow its first edge."""
    model = _model_for(graph, trace, params, spec, model)
    return _run_online(model, spec, MissionLog("dsp", spec.destination, spec.budget), _dsp_step)


def run_gsp(graph, trace, params, spec: MissionSpec, model: CostModel | None = None) -> MissionLog:
    """Always take the cheapest outgoing edge to a vertex not yet visited on this leg."""
    model = _model_for(graph, trace, params, spec, model)
    return _run_online(model, spec, MissionLog("gsp", spec.destination, spec.budget), _gsp_step)


ALGORITHMS = {"osp": run_osp, "dsp": run_dsp, "gsp": run_gsp}


def at_budget(log: MissionLog, budget: float) -> MissionLog:
    """The same mission flown with a smaller battery.

    No policy looks at the budget when choosing edges, so the flight under
    ``budget`` is the prefix of this one that ends on the first edge driving
    the residual below zero. Replaying an unlimited-budget log therefore
    yields every point of a budget sweep from one simulation.
    """
    if not 0 < budget <= log.budget:
        raise ValidationError(f"replay budget must lie in (0, {log.budget}], got {budget}")
    out = MissionLog(log.algorithm, log.destination, budget, planned_cost=log.planned_cost)
    if log.status is MissionStatus.CANCELED or (log.planned_cost is not None and log.planned_cost > budget):
        out.status = MissionStatus.CANCELED
        return out
    consumed = 0.0
    for i, e in enumerate(log.events):
        consumed += e.cost
        residual = budget - consumed
        out.events.append(EdgeEvent(e.edge_id, e.tail, e.head, e.departure_slot, e.cost, residual))
        if residual < 0:
            delivered = log.delivered_after is not None and log.delivered_after < i
            out.delivered_after = log.delivered_after if delivered else None
            out.status = MissionStatus.DELIVERED if delivered else MissionStatus.FAIL
            return out
    out.delivered_after = log.delivered_after
    out.status = log.status
    return out


# -- full-knowledge oracle -----------------------------------------------------


def default_oracle_horizon(model: CostModel, spec: MissionSpec, cap: int = ORACLE_MAX_HORIZON) -> int:
    """Edge count no walk within budget can exceed: ``B / (eps_min * shortest edge)``."""
    speeds = {w.speed_ms for slot in model.trace.slots for w in slot.values()}
    eps = min(model.table.bounds(spec.payload, speeds).eps_min, model.table.bounds(0.0, speeds).eps_min)
    bound = spec.budget / (eps * float(model.graph.lengths.min()))
    return int(min(cap, math.floor(bound)))


def clairvoyant_optimum(
    graph: DeliveryGraph,
    trace: WindTrace,
    params: DroneParams,
    spec: MissionSpec,
    horizon: int | None = None,
    model: CostModel | None = None,
    max_states: int = ORACLE_MAX_STATES,
    budget_limited: bool = True,
) -> Walk | None:
    """Cheapest depot -> customer -> depot walk knowing every future snapshot.

    Uniform-cost search over (vertex, clock, delivered, edges used); walks may
    revisit vertices but never wait. ``horizon`` caps the number of edges.
    Returns ``None`` when no walk within the horizon costs at most the budget
    (or at all, with ``budget_limited=False``).
    """
    model = _model_for(graph, trace, params, spec, model)
    if horizon is None:
        horizon = default_oracle_horizon(model, spec)
    if horizon > ORACLE_MAX_HORIZON:
        raise ResourceError(f"oracle horizon {horizon} exceeds {ORACLE_MAX_HORIZON} edges")
    limit = spec.budget if budget_limited else math.inf
    dur = trace.slot_duration
    v0, vc = graph.depot, spec.destination
    edges = graph.edges

    start = (v0, spec.start_slot * dur, False, 0)
    parent: dict[tuple, tuple[tuple, int, int, float] | None] = {start: None}
    best = {start: 0.0}
    tie = itertools.count()
    heap = [(0.0, next(tie), start)]
    settled = set()
    while heap:
        cost, _, state = heapq.heappop(heap)
        if state in settled:
            continue
        settled.add(state)
        if len(settled) > max_states:
            raise ResourceError(f"oracle explored more than {max_states} states")
        v, clock, delivered, steps = state
        if delivered and v == v0:
            return _rebuild_walk(parent, state, spec.start_slot)
        if steps == horizon:
            continue
        slot = departure_slot(clock, dur)
        snap = model.snapshot(slot, 0.0 if delivered else spec.payload)
        for i in graph.out_edges[v]:
            ncost = cost + snap.costs[i]
            if ncost > limit:
                continue
            w = edges[i].head
            nxt = (w, clock + model.traversal_time(i), delivered or w == vc, steps + 1)
            if nxt in settled or ncost >= best.get(nxt, math.inf):
                continue
            best[nxt] = ncost
            parent[nxt] = (state, i, slot, snap.costs[i])
            heapq.heappush(heap, (ncost, next(tie), nxt))
    return None


def _rebuild_walk(parent, state, start_slot) -> Walk:
    edges, slots, costs = [], [], []
    while parent[state] is not None:
        prev, i, slot, c = parent[state]
        edges.append(i)
        slots.append(slot)
        costs.append(c)
        state = prev
    return Walk(edges[::-1], start_slot, slots[::-1], costs[::-1])


def walk_is_simple_cycle(graph: DeliveryGraph, walk: Walk, destination: int) -> bool:
    """True when both legs of the walk visit no vertex twice."""
    verts = graph.path_vertices(walk.edges)
    if destination not in verts:
        return False
    cut = verts.index(destination)
    out, back = verts[: cut + 1], verts[cut:]
    return len(set(out)) == len(out) and len(set(back)) == len(back)


def simple_cycle_costs(model: CostModel, spec: MissionSpec) -> Sequence[tuple[list[int], float]]:
    """Actual cost of every (simple outbound path, simple return path) pair."""
    graph = model.graph
    outs = list(_simple_paths(graph, graph.depot, spec.destination))
    backs = list(_simple_paths(graph, spec.destination, graph.depot))
    result = []
    for out in outs:
        for back in backs:
            edges = out + back
            payloads = [spec.payload] * len(out) + [0.0] * len(back)
            result.append((edges, actual_cost(model, edges, spec.start_slot, payloads).total))
    return result


def _simple_paths(graph: DeliveryGraph, src: int, dst: int):
    stack = [(src, [], {src})]
    while stack:
        v, path, seen = stack.pop()
        if v == dst:
            yield path
            continue
        for i in graph.out_edges[v]:
            w = graph.edges[i].head
            if w not in seen:
                stack.append((w, path + [i], seen | {w}))

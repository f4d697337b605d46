"""Random small instances and brute-force oracles shared by the test modules."""

from __future__ import annotations

import itertools
import math

import numpy as np
from pytest import approx as _approx

from dronemfp.td_graph import WindTrace, bidirectional_graph
from dronemfp.wind_model import GlobalWind, Point2D

SPEEDS = (0.0, 5.0, 10.0, 15.0)


def random_graph(rng, n, p=0.5, side=2000.0, regions=("global",)):
    """Connected random graph on ``n`` vertices; each segment gets random region tags."""
    while True:
        pts = {i: Point2D(*rng.uniform(0, side, 2)) for i in range(n)}
        pairs = []
        for u, v in itertools.combinations(range(n), 2):
            if rng.random() < p:
                a = str(rng.choice(regions))
                b = str(rng.choice(regions))
                if a == b:
                    pairs.append((u, v, a, a))
                else:
                    pairs.append((u, v, (a, b), (b, a)))
        if not pairs:
            continue
        g = bidirectional_graph(pts, pairs, depot=0)
        if g.is_connected():
            return g


def random_trace(rng, horizon, regions=("global",), slot_duration=60.0, speeds=SPEEDS):
    return WindTrace(
        slot_duration,
        [
            {r: GlobalWind(float(rng.choice(speeds)), float(rng.uniform(0, 360))) for r in regions}
            for _ in range(horizon)
        ],
    )


def bellman_ford(snapshot, src, forbidden=frozenset()):
    graph = snapshot.graph
    dist = {v: math.inf for v in graph.vertices}
    dist[src] = 0.0
    for _ in range(len(graph.vertices) - 1):
        changed = False
        for i, e in enumerate(graph.edges):
            if e.tail in forbidden or e.head in forbidden:
                continue
            if dist[e.tail] + snapshot.costs[i] < dist[e.head]:
                dist[e.head] = dist[e.tail] + snapshot.costs[i]
                changed = True
        if not changed:
            break
    return dist


def bisect_root(f, lo, hi, tol=1e-13):
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def enumerate_walk_costs(model, spec, horizon):
    """Every depot -> customer -> depot walk of at most ``horizon`` edges.

    Re-prices each edge from scratch with ``floor(clock / slot_duration)``
    and yields ``(edges, cost)``; the walk ends on the first return to the
    depot after delivery.
    """
    graph = model.graph
    dur = model.trace.slot_duration
    v0, vc = graph.depot, spec.destination
    stack = [(v0, spec.start_slot * dur, False, [], 0.0)]
    while stack:
        v, clock, delivered, path, cost = stack.pop()
        if delivered and v == v0:
            yield path, cost
            continue
        if len(path) == horizon:
            continue
        slot = math.floor(clock / dur)
        payload = 0.0 if delivered else spec.payload
        costs = model.snapshot(slot, payload).costs
        for i, e in enumerate(graph.edges):
            if e.tail != v:
                continue
            stack.append(
                (e.head, clock + e.length / spec.ground_speed, delivered or e.head == vc, path + [i], cost + costs[i])
            )


# -- tessellation geometry oracles ------------------------------------------------


def _nearest(tess, p):
    return set(tess.nearest_station(p))


def _samples(a, b, k=41):
    return [Point2D(a.x + (b.x - a.x) * s, a.y + (b.y - a.y) * s) for s in np.linspace(0, 1, k)[1:-1]]


def shoelace(pts):
    c = Point2D(sum(p.x for p in pts) / len(pts), sum(p.y for p in pts) / len(pts))
    ring = sorted(pts, key=lambda p: math.atan2(p.y - c.y, p.x - c.x))
    return 0.5 * abs(sum(p.x * q.y - q.x * p.y for p, q in zip(ring, ring[1:] + ring[:1])))


def check_tessellation(tess):
    n = tess.n_stations
    tol = 1e-6 * tess.bbox.diagonal
    # cell corners are equidistant from their station and no other station is closer
    for i, ring in enumerate(tess.cells):
        for v in ring:
            p = tess.points[v]
            d = [p.distance(tess.points[k]) for k in range(n)]
            assert d[i] <= min(d) + tol
    # cells tile the box
    area = sum(shoelace([tess.points[v] for v in ring]) for ring in tess.cells)
    box = tess.bbox
    assert area == _approx((box.xmax - box.xmin) * (box.ymax - box.ymin), rel=1e-9)


def check_graph_tagging(tess, graph):
    names = tess.names
    station_of = {name: i for i, name in enumerate(names)}
    tol = 1e-6 * tess.bbox.diagonal
    for e in graph.edges:
        a, b = graph.vertices[e.tail], graph.vertices[e.head]
        if e.two_region:
            i, j = (station_of[k] for k in e.wind_key)
            assert {e.tail, e.head} == {i, j}
            # retained Delaunay edge: stays in the closed cells of its two ends
            for p in _samples(a, b):
                own = min(p.distance(tess.points[i]), p.distance(tess.points[j]))
                assert own <= min(p.distance(tess.points[k]) for k in range(tess.n_stations)) + tol
            continue
        cell = station_of[e.wind_key]
        # a point just right of the midpoint lies in the tagged cell
        L = a.distance(b)
        nx, ny = (b.y - a.y) / L, -(b.x - a.x) / L
        probe = Point2D((a.x + b.x) / 2 + nx * 1e-3 * L, (a.y + b.y) / 2 + ny * 1e-3 * L)
        if tess.bbox.strictly_contains(probe):
            assert cell in _nearest(tess, probe)
        # the whole edge stays inside that cell
        for p in _samples(a, b):
            q = tess.points[cell]
            assert p.distance(q) <= min(p.distance(tess.points[k]) for k in range(tess.n_stations)) + tol


def rng(seed):
    return np.random.default_rng(seed)

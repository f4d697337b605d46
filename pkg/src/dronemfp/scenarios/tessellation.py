"""Delivery graphs built on the Voronoi cells of wind stations.

Three graph kinds share one clipped tessellation:

* ``VG`` joins every station to the corners of its cell and keeps every
  cell side. Spokes fly in their cell's wind. Each direction of a side
  flies in the wind of the cell on its right.
* ``DG`` keeps the Delaunay edges that only cross their two end cells, priced
  half in each. Any other Delaunay edge is rerouted through the shared side's
  end point that makes the detour shortest, and each half then stays in one cell.
* ``HG`` is the union of the two.

Cells are clipped to the bounding box by mirroring the stations across its
four sides, which turns the box edges into Voronoi ridges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.spatial import Delaunay, QhullError, Voronoi, cKDTree

from dronemfp.errors import GeometryError, ValidationError
from dronemfp.td_graph import DeliveryGraph, Edge, WindKey
from dronemfp.wind_model import Point2D

DEFAULT_TOLERANCE = 1e-9


class TessellationKind(str, Enum):
    VG = "VG"
    DG = "DG"
    HG = "HG"


@dataclass(frozen=True)
class BBox:
    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def __post_init__(self):
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ValidationError(f"empty bounding box {self}")

    @property
    def diagonal(self) -> float:
        return math.hypot(self.xmax - self.xmin, self.ymax - self.ymin)

    def strictly_contains(self, p: Point2D) -> bool:
        return self.xmin < p.x < self.xmax and self.ymin < p.y < self.ymax

    @classmethod
    def around(cls, points: Sequence[Point2D], margin: float) -> BBox:
        xs = [p.x for p in points]
        ys = [p.y for p in points]
        return cls(min(xs) - margin, min(ys) - margin, max(xs) + margin, max(ys) + margin)


@dataclass(frozen=True)
class Side:
    """A cell side between corner vertices ``a`` and ``b``.

    ``cells`` holds the one or two stations whose cells it delimits.
    """

    a: int
    b: int
    cells: tuple[int, ...]


@dataclass
class Tessellation:
    """Voronoi cells of the stations clipped to a box.

    Vertex ids ``0..n-1`` are the stations and the corners follow in
    coordinate order.
    """

    points: dict[int, Point2D]
    names: list[str]
    bbox: BBox
    cells: list[list[int]]
    sides: list[Side]
    delaunay_pairs: list[tuple[int, int]]
    tolerance: float

    @property
    def n_stations(self) -> int:
        return len(self.names)

    def nearest_station(self, p: Point2D) -> list[int]:
        """Stations closest to ``p``, within tolerance."""
        d = [p.distance(self.points[i]) for i in range(self.n_stations)]
        best = min(d)
        return [i for i, di in enumerate(d) if di <= best + self.tolerance]

    def shared_side(self, i: int, j: int) -> Side | None:
        for s in self.sides:
            if set(s.cells) == {i, j}:
                return s
        return None

    def right_cell(self, side: Side, tail: int, head: int) -> int:
        """Cell on the right of travel from ``tail`` to ``head`` along a side."""
        if len(side.cells) == 1:
            return side.cells[0]
        p, q = self.points[tail], self.points[head]
        for c in side.cells:
            s = self.points[c]
            if (q.x - p.x) * (s.y - p.y) - (q.y - p.y) * (s.x - p.x) < 0:
                return c
        raise GeometryError(f"side {tail}-{head} has no cell on its right")

    def is_gabriel(self, i: int, j: int) -> bool:
        """True when segment ``i``-``j`` crosses only the cells of ``i`` and ``j``."""
        a, b = self.points[i], self.points[j]
        mid = Point2D((a.x + b.x) / 2, (a.y + b.y) / 2)
        r = mid.distance(a)
        return all(mid.distance(self.points[k]) >= r - self.tolerance for k in range(self.n_stations) if k not in (i, j))


def _check_stations(stations: Sequence[Point2D], bbox: BBox, tol: float) -> None:
    if len(stations) < 3:
        raise GeometryError(f"need at least 3 stations, got {len(stations)}")
    for i, p in enumerate(stations):
        if not bbox.strictly_contains(p):
            raise ValidationError(f"station {i} at ({p.x}, {p.y}) lies outside the bounding box")
    coords = np.array([(p.x, p.y) for p in stations])
    pairs = cKDTree(coords).query_pairs(tol)
    if pairs:
        i, j = sorted(min(pairs))
        raise GeometryError(f"stations {i} and {j} coincide")


def build_tessellation(
    stations: Sequence[Point2D],
    bbox: BBox,
    names: Sequence[str] | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
) -> Tessellation:
    """Clip the Voronoi diagram of ``stations`` to ``bbox`` and triangulate them."""
    tol = tolerance * bbox.diagonal
    stations = list(stations)
    _check_stations(stations, bbox, tol)
    n = len(stations)
    names = [str(i) for i in range(n)] if names is None else [str(s) for s in names]
    if len(names) != n or len(set(names)) != n:
        raise ValidationError("station names must be unique, one per station")

    coords = np.array([(p.x, p.y) for p in stations])
    try:
        tri = Delaunay(coords)
    except QhullError as exc:
        raise GeometryError(f"stations are degenerate (collinear?): {exc.args[0].splitlines()[0]}") from None
    if tri.coplanar.size:
        raise GeometryError("some stations were dropped by the triangulation")

    mirrored = np.vstack(
        [
            coords,
            np.column_stack([2 * bbox.xmin - coords[:, 0], coords[:, 1]]),
            np.column_stack([2 * bbox.xmax - coords[:, 0], coords[:, 1]]),
            np.column_stack([coords[:, 0], 2 * bbox.ymin - coords[:, 1]]),
            np.column_stack([coords[:, 0], 2 * bbox.ymax - coords[:, 1]]),
        ]
    )
    vor = Voronoi(mirrored)

    # corners used by the original cells, merged when closer than tol
    used = sorted({v for i in range(n) for v in vor.regions[vor.point_region[i]]})
    if -1 in used:
        raise GeometryError("a clipped cell is unbounded")
    vcoords = vor.vertices[used]
    parent = list(range(len(used)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in sorted(cKDTree(vcoords).query_pairs(tol)):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    roots = sorted({find(a) for a in range(len(used))}, key=lambda r: (vcoords[r, 0], vcoords[r, 1], r))
    vid_of_root = {r: n + k for k, r in enumerate(roots)}
    vid = {v: vid_of_root[find(a)] for a, v in enumerate(used)}

    points = {i: stations[i] for i in range(n)}
    for r in roots:
        x = min(max(float(vcoords[r, 0]), bbox.xmin), bbox.xmax)
        y = min(max(float(vcoords[r, 1]), bbox.ymin), bbox.ymax)
        points[vid_of_root[r]] = Point2D(x, y)

    cells = []
    for i in range(n):
        ring = []
        for v in vor.regions[vor.point_region[i]]:
            if vid[v] not in ring:
                ring.append(vid[v])
        cells.append(ring)

    side_cells: dict[tuple[int, int], set[int]] = {}
    for (p, q), rv in zip(vor.ridge_points, vor.ridge_vertices):
        if min(p, q) >= n:
            continue
        if -1 in rv:
            raise GeometryError("a clipped cell side is unbounded")
        a, b = vid[rv[0]], vid[rv[1]]
        if a == b:
            continue
        key = (min(a, b), max(a, b))
        side_cells.setdefault(key, set()).update(c for c in (p, q) if c < n)
    sides = [Side(a, b, tuple(sorted(cs))) for (a, b), cs in sorted(side_cells.items())]

    pairs = set()
    for simplex in tri.simplices:
        for u in range(3):
            i, j = int(simplex[u]), int(simplex[(u + 1) % 3])
            pairs.add((min(i, j), max(i, j)))

    return Tessellation(points, names, bbox, cells, sides, sorted(pairs), tol)


class _EdgeSet:
    """Undirected segments split into directed edges, unique by (tail, head)."""

    def __init__(self):
        self.edges: list[tuple[int, int, WindKey]] = []
        self.seen: set[tuple[int, int]] = set()

    def add(self, u: int, v: int, key_uv: WindKey, key_vu: WindKey) -> None:
        for tail, head, key in ((u, v, key_uv), (v, u, key_vu)):
            if (tail, head) not in self.seen:
                self.seen.add((tail, head))
                self.edges.append((tail, head, key))


def _voronoi_edges(tess: Tessellation, out: _EdgeSet) -> None:
    for i, ring in enumerate(tess.cells):
        for v in sorted(ring):
            out.add(i, v, tess.names[i], tess.names[i])
    for s in tess.sides:
        right_ab = tess.names[tess.right_cell(s, s.a, s.b)]
        right_ba = tess.names[tess.right_cell(s, s.b, s.a)]
        out.add(s.a, s.b, right_ab, right_ba)


def _delaunay_edges(tess: Tessellation, out: _EdgeSet) -> None:
    names = tess.names
    for i, j in tess.delaunay_pairs:
        if tess.is_gabriel(i, j):
            out.add(i, j, (names[i], names[j]), (names[j], names[i]))
            continue
        side = tess.shared_side(i, j)
        if side is None:
            # the cells only touch outside the box; there is nothing to route through
            continue
        si, sj = tess.points[i], tess.points[j]
        k = min(
            (side.a, side.b),
            key=lambda v: (si.distance(tess.points[v]) + tess.points[v].distance(sj), v),
        )
        out.add(i, k, names[i], names[i])
        out.add(k, j, names[j], names[j])


def tessellation_graph(tess: Tessellation, kind: TessellationKind | str) -> DeliveryGraph:
    kind = TessellationKind(kind)
    out = _EdgeSet()
    if kind in (TessellationKind.VG, TessellationKind.HG):
        _voronoi_edges(tess, out)
    if kind in (TessellationKind.DG, TessellationKind.HG):
        _delaunay_edges(tess, out)

    if kind is TessellationKind.DG:
        keep = sorted({v for t, h, _ in out.edges for v in (t, h)} | set(range(tess.n_stations)))
    else:
        keep = sorted(tess.points)
    points = {v: tess.points[v] for v in keep}
    edges = []
    for tail, head, key in out.edges:
        length = points[tail].distance(points[head])
        if length <= 0:
            raise GeometryError(f"vertices {tail} and {head} coincide")
        edges.append(Edge(len(edges), tail, head, length, key))
    graph = DeliveryGraph(points, edges, depot=0)
    if not graph.is_connected():
        raise GeometryError(f"{kind.value} graph is disconnected")
    return graph


def build_tessellation_graph(
    stations: Sequence[Point2D],
    kind: TessellationKind | str,
    bbox: BBox,
    names: Sequence[str] | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
) -> DeliveryGraph:
    """VG, DG or HG over ``stations``; station 0 is the depot and regions are the station names."""
    return tessellation_graph(build_tessellation(stations, bbox, names, tolerance), kind)

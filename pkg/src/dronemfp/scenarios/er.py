"""Erdős-Rényi delivery graphs on a square area."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from dronemfp.errors import ConfigurationError, GenerationError
from dronemfp.td_graph import DeliveryGraph, bidirectional_graph
from dronemfp.wind_model import Point2D

GLOBAL_REGION = "global"
MAX_RESAMPLES = 1000


@dataclass(frozen=True)
class ErConfig:
    """``n`` vertices dropped uniformly on a ``side`` x ``side`` square.

    Each pair is joined with probability ``c ln(n) / n`` unless
    ``edge_probability`` overrides it.
    """

    n: int = 26
    c: float = 1.0
    side: float = 2000.0
    seed: int = 0
    edge_probability: float | None = None

    def __post_init__(self):
        if self.n < 2:
            raise ConfigurationError(f"an ER graph needs n >= 2 vertices, got {self.n}")
        if not self.c > 0:
            raise ConfigurationError(f"density constant c must be > 0, got {self.c}")
        if not self.side > 0:
            raise ConfigurationError(f"area side must be > 0, got {self.side}")
        p = self.p
        if not 0 < p <= 1:
            raise ConfigurationError(f"edge probability {p:.4g} outside (0, 1] for n={self.n}, c={self.c}")

    @property
    def p(self) -> float:
        if self.edge_probability is not None:
            return self.edge_probability
        return self.c * math.log(self.n) / self.n


def _connected(n: int, pairs: np.ndarray) -> bool:
    adj = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    return connected_components(adj, directed=False)[0] == 1


def generate_er(config: ErConfig, max_resamples: int = MAX_RESAMPLES) -> DeliveryGraph:
    """Sample connected ER graphs, discarding disconnected draws.

    Vertex 0 is the depot and every edge shares one global wind region.
    """
    rng = np.random.default_rng(config.seed)
    n = config.n
    pairs_all = np.array(list(itertools.combinations(range(n), 2)))
    for _ in range(max_resamples):
        coords = rng.uniform(0.0, config.side, size=(n, 2))
        keep = rng.random(len(pairs_all)) < config.p
        chosen = pairs_all[keep]
        if len(chosen) < n - 1 or not _connected(n, chosen):
            continue
        points = {i: Point2D(float(x), float(y)) for i, (x, y) in enumerate(coords)}
        pairs = [(int(u), int(v), GLOBAL_REGION, GLOBAL_REGION) for u, v in chosen]
        return bidirectional_graph(points, pairs, depot=0)
    raise GenerationError(f"no connected ER graph after {max_resamples} draws (n={config.n}, p={config.p:.4g})")

"""Metric instances, threshold digraphs and hop distances."""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .exceptions import InvalidInput, NegativeCost, SizeLimit, TriangleViolation

EPS_METRIC = 1e-9
DEFAULT_MAX_N = 512


def max_n() -> int:
    """Instance size cap; ``BATSP_MAX_N`` overrides the default."""
    raw = os.environ.get("BATSP_MAX_N")
    return int(raw) if raw else DEFAULT_MAX_N


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class MetricInstance:
    """Complete asymmetric cost matrix over vertices ``0..n-1``."""

    cost: np.ndarray
    name: str = "instance"
    seed: int | None = None
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        cost = np.asarray(self.cost, dtype=np.float64)
        if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
            raise InvalidInput(f"cost matrix must be square, got shape {cost.shape}")
        if cost.shape[0] > max_n():
            raise SizeLimit(f"n={cost.shape[0]} exceeds cap {max_n()} (BATSP_MAX_N)")
        if not np.all(np.isfinite(cost)):
            raise InvalidInput("cost matrix contains non-finite entries")
        if np.any(np.diag(cost) != 0):
            raise InvalidInput("cost matrix diagonal must be zero")
        if np.any(cost < 0):
            u, v = np.argwhere(cost < 0)[0]
            raise NegativeCost(f"negative cost c({u},{v})={cost[u, v]}")
        object.__setattr__(self, "cost", _frozen(cost))

    @property
    def n(self) -> int:
        return self.cost.shape[0]

    def c(self, u: int, v: int) -> float:
        return float(self.cost[u, v])

    def distinct_costs(self) -> np.ndarray:
        """Sorted distinct off-diagonal costs."""
        if self.n < 2:
            return np.zeros(0)
        off = self.cost[~np.eye(self.n, dtype=bool)]
        return np.unique(off)

    def to_dict(self) -> dict:
        out = {"name": self.name, "n": self.n, "costs": _matrix_to_json(self.cost)}
        if self.seed is not None:
            out["seed"] = self.seed
        return out


def _matrix_to_json(cost: np.ndarray) -> list:
    rows = []
    for row in cost:
        rows.append([int(c) if float(c).is_integer() else float(c) for c in row])
    return rows


def metric_closure(cost: np.ndarray) -> np.ndarray:
    """All-pairs shortest path distances (Floyd-Warshall)."""
    d = np.array(cost, dtype=np.float64, copy=True)
    for k in range(d.shape[0]):
        np.minimum(d, d[:, k, None] + d[None, k, :], out=d)
    return d


def find_triangle_violation(cost: np.ndarray, tol: float = EPS_METRIC):
    """Lexicographically first ``(u, v, w)`` with ``c(u,w) > c(u,v) + c(v,w) + tol``."""
    best = None
    for v in range(cost.shape[0]):
        bad = cost > cost[:, v, None] + cost[None, v, :] + tol
        if bad.any():
            u, w = np.argwhere(bad)[0]
            cand = (int(u), v, int(w))
            if best is None or cand < best:
                best = cand
    return best


def validate_metric(inst: MetricInstance, mode: str = "reject") -> MetricInstance:
    """Check the triangle inequality, or repair it by metric closure.

    ``mode="reject"`` returns ``inst`` itself when the inequality holds and
    raises :class:`TriangleViolation` otherwise.  ``mode="closure"`` returns a
    new instance whose costs are shortest-path distances.
    """
    if mode == "reject":
        bad = find_triangle_violation(inst.cost)
        if bad is not None:
            u, v, w = bad
            slack = inst.cost[u, w] - inst.cost[u, v] - inst.cost[v, w]
            raise TriangleViolation(u, v, w, slack=float(slack))
        return inst
    if mode == "closure":
        return MetricInstance(
            metric_closure(inst.cost), name=inst.name, seed=inst.seed, labels=inst.labels
        )
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True, eq=False)
class Digraph:
    """Simple digraph stored as a dense boolean adjacency matrix."""

    adj: np.ndarray

    def __post_init__(self):
        adj = np.asarray(self.adj, dtype=bool).copy()
        np.fill_diagonal(adj, False)
        object.__setattr__(self, "adj", _frozen(adj))

    @property
    def n(self) -> int:
        return self.adj.shape[0]

    @property
    def arcs(self) -> list[tuple[int, int]]:
        return [(int(u), int(v)) for u, v in np.argwhere(self.adj)]

    @property
    def n_arcs(self) -> int:
        return int(self.adj.sum())

    def successors(self, u: int) -> np.ndarray:
        return np.flatnonzero(self.adj[u])

    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable[tuple[int, int]]) -> "Digraph":
        adj = np.zeros((n, n), dtype=bool)
        for u, v in arcs:
            adj[u, v] = True
        return cls(adj)


@dataclass(frozen=True, eq=False)
class ThresholdGraph(Digraph):
    """Arcs of an instance whose cost is at most ``tau``."""

    tau: float = 0.0


def threshold_graph(inst: MetricInstance, tau: float) -> ThresholdGraph:
    if tau < 0:
        raise InvalidInput("tau must be nonnegative")
    return ThresholdGraph(inst.cost <= tau, tau=float(tau))


def bfs_hops(g: Digraph, source: int, *, reverse: bool = False) -> np.ndarray:
    """Hop distances from ``source``; -1 marks unreachable vertices."""
    adj = g.adj.T if reverse else g.adj
    dist = np.full(g.n, -1, dtype=np.int64)
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in np.flatnonzero(adj[u]):
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def hop_distance(g: Digraph, u: int, v: int) -> int | None:
    """BFS distance from ``u`` to ``v``, or ``None`` when unreachable."""
    d = bfs_hops(g, u)[v]
    return None if d < 0 else int(d)


def power_graph(g: Digraph, p: int) -> Digraph:
    """Arc ``(u, v)`` iff ``g`` has a ``u -> v`` path of at most ``p`` arcs."""
    if p < 1:
        raise ValueError("power must be >= 1")
    adj = np.zeros_like(g.adj)
    for u in range(g.n):
        d = bfs_hops(g, u)
        adj[u] = (d >= 1) & (d <= p)
    return Digraph(adj)


def strongly_connected(g: Digraph) -> bool:
    if g.n <= 1:
        return True
    return bool((bfs_hops(g, 0) >= 0).all() and (bfs_hops(g, 0, reverse=True) >= 0).all())


@dataclass(frozen=True)
class HopPath:
    vertices: tuple[int, ...]

    @property
    def hops(self) -> int:
        return len(self.vertices) - 1

    def valid_in(self, g: Digraph) -> bool:
        return all(g.adj[a, b] for a, b in zip(self.vertices, self.vertices[1:]))


def shortest_hop_path(g: Digraph, u: int, v: int) -> HopPath | None:
    parent = {u: None}
    queue = deque([u])
    while queue:
        a = queue.popleft()
        if a == v:
            break
        for b in np.flatnonzero(g.adj[a]):
            b = int(b)
            if b not in parent:
                parent[b] = a
                queue.append(b)
    if v not in parent:
        return None
    path = [v]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    return HopPath(tuple(reversed(path)))


def check_tour(tour: Sequence[int], n: int) -> bool:
    return sorted(int(v) for v in tour) == list(range(n))

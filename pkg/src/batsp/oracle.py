"""Exact references for small instances."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .exceptions import SizeLimit
from .instance import Digraph, MetricInstance, power_graph, strongly_connected

DP_MAX_N = 18


@dataclass(frozen=True)
class ExactResult:
    opt_bottleneck: float
    opt_tour: tuple[int, ...]

    def to_dict(self) -> dict:
        return {"opt_bottleneck": self.opt_bottleneck, "opt_tour": list(self.opt_tour)}


def tour_bottleneck(cost: np.ndarray, tour) -> float:
    n = len(tour)
    if n < 2:
        return 0.0
    return float(max(cost[tour[i], tour[(i + 1) % n]] for i in range(n)))


def exact_bottleneck(inst: MetricInstance, cap: int = DP_MAX_N) -> ExactResult:
    """Minimax subset DP rooted at vertex 0.

    ``f[S][v]`` is the smallest possible largest arc over paths that start at
    0, visit exactly ``S`` (a subset of ``1..n-1``) and end at ``v in S``.
    """
    n = inst.n
    if n > cap:
        raise SizeLimit(f"exact oracle limited to n <= {cap}, got {n}")
    c = inst.cost
    if n == 1:
        return ExactResult(0.0, (0,))
    if n == 2:
        return ExactResult(tour_bottleneck(c, (0, 1)), (0, 1))
    m = n - 1  # vertex i+1 <-> bit i
    size = 1 << m
    inner = c[1:, 1:]
    f = np.full((size, m), np.inf)
    parent = np.full((size, m), -1, dtype=np.int16)
    for i in range(m):
        f[1 << i, i] = c[0, i + 1]
    bit = 1 << np.arange(m)
    for S in range(1, size):
        members = np.flatnonzero(S & bit)
        if len(members) < 2:
            continue
        # row: end vertex v, column: predecessor u
        prev = S ^ bit[members]
        cand = np.maximum(f[prev][:, members], inner[np.ix_(members, members)].T)
        np.fill_diagonal(cand, np.inf)
        j = np.argmin(cand, axis=1)
        f[S, members] = cand[np.arange(len(members)), j]
        parent[S, members] = members[j]
    full = size - 1
    closing = np.maximum(f[full], c[1:, 0])
    v = int(np.argmin(closing))
    best = float(closing[v])
    path = []
    S = full
    while v >= 0:
        path.append(v + 1)
        pv = int(parent[S, v])
        S ^= 1 << v
        v = pv
    tour = (0,) + tuple(reversed(path))
    return ExactResult(best, tour)


def brute_force_bottleneck(inst: MetricInstance) -> ExactResult:
    """Scan all ``(n-1)!`` tours starting at vertex 0."""
    n = inst.n
    if n > 10:
        raise SizeLimit("brute force limited to n <= 10")
    if n == 1:
        return ExactResult(0.0, (0,))
    best = None
    for rest in itertools.permutations(range(1, n)):
        tour = (0,) + rest
        b = tour_bottleneck(inst.cost, tour)
        if best is None or b < best[0]:
            best = (b, tour)
    return ExactResult(*best)


@dataclass(frozen=True)
class HamiltonicityResult:
    status: str  # "yes" | "no" | "unknown"
    tour: tuple[int, ...] | None = None
    reason: str = ""
    nodes: int = 0


def successor_matching_deficiency(g: Digraph) -> frozenset | None:
    """A vertex set whose out-neighbourhood is smaller than itself, if any.

    A Hamiltonian cycle assigns every vertex a distinct successor, so such a
    set certifies non-Hamiltonicity.
    """
    n = g.n
    succ = [list(map(int, g.successors(u))) for u in range(n)]
    owner: dict[int, int] = {}

    def augment(u, seen):
        for v in succ[u]:
            if v in seen:
                continue
            seen.add(v)
            if v not in owner or augment(owner[v], seen):
                owner[v] = u
                return True
        return False

    for u in range(n):
        seen: set[int] = set()
        if not augment(u, seen):
            return frozenset({u} | {owner[v] for v in seen})
    return None


def power_hamiltonian(g: Digraph, p: int = 1, budget: int = 5_000_000, use_certificate: bool = True) -> HamiltonicityResult:
    """Decide Hamiltonicity of ``g^p`` by search with dead-state memoisation."""
    gp = power_graph(g, p) if p > 1 else g
    n = gp.n
    if n == 1:
        return HamiltonicityResult("yes", (0,))
    if not strongly_connected(gp):
        return HamiltonicityResult("no", reason="power graph is not strongly connected")
    if use_certificate:
        bad = successor_matching_deficiency(gp)
        if bad is not None:
            return HamiltonicityResult(
                "no", reason=f"{len(bad)} vertices share fewer distinct successors: {sorted(bad)}"
            )
    succ = [list(map(int, gp.successors(u))) for u in range(n)]
    full = (1 << n) - 1
    dead: set[tuple[int, int]] = set()
    path = [0]
    nodes = 0

    def dfs(u, mask):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise _Budget
        if mask == full:
            return bool(gp.adj[u, 0])
        if (mask, u) in dead:
            return False
        for v in succ[u]:
            if not mask >> v & 1:
                path.append(v)
                if dfs(v, mask | 1 << v):
                    return True
                path.pop()
        dead.add((mask, u))
        return False

    try:
        found = dfs(0, 1)
    except _Budget:
        return HamiltonicityResult("unknown", reason="search budget exhausted", nodes=nodes)
    if found:
        return HamiltonicityResult("yes", tuple(path), nodes=nodes)
    return HamiltonicityResult("no", reason="exhaustive search", nodes=nodes)


class _Budget(Exception):
    pass

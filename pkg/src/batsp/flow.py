"""Dinic max-flow on adjacency lists.

Capacities may be ints, floats or Fractions; ``eps`` is the residual
threshold below which an arc counts as saturated (use 0 for exact types).
"""

from __future__ import annotations

from collections import deque


class FlowNetwork:
    def __init__(self, n: int, eps=0):
        self.n = n
        self.eps = eps
        self.graph: list[list[int]] = [[] for _ in range(n)]
        self.to: list[int] = []
        self.cap: list = []
        self._orig: list = []

    def add_node(self) -> int:
        self.graph.append([])
        self.n += 1
        return self.n - 1

    def add_edge(self, u: int, v: int, cap) -> int:
        """Add arc ``u -> v``; returns its id (the reverse arc is ``id ^ 1``)."""
        eid = len(self.to)
        self.to += [v, u]
        self.cap += [cap, cap * 0]
        self._orig += [cap, cap * 0]
        self.graph[u].append(eid)
        self.graph[v].append(eid + 1)
        return eid

    def flow(self, eid: int):
        return self._orig[eid] - self.cap[eid]

    def _bfs(self, s: int, t: int) -> list[int] | None:
        level = [-1] * self.n
        level[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for e in self.graph[u]:
                v = self.to[e]
                if level[v] < 0 and self.cap[e] > self.eps:
                    level[v] = level[u] + 1
                    q.append(v)
        return level if level[t] >= 0 else None

    def _dfs(self, u, t, pushed, level, it):
        if u == t:
            return pushed
        adj = self.graph[u]
        while it[u] < len(adj):
            e = adj[it[u]]
            v = self.to[e]
            if self.cap[e] > self.eps and level[v] == level[u] + 1:
                got = self._dfs(v, t, min(pushed, self.cap[e]), level, it)
                if got > self.eps:
                    self.cap[e] -= got
                    self.cap[e ^ 1] += got
                    return got
            it[u] += 1
        return 0

    def max_flow(self, s: int, t: int, limit=None):
        """Push flow from ``s`` to ``t``; stops early once ``limit`` is reached."""
        total = 0
        while True:
            level = self._bfs(s, t)
            if level is None:
                return total
            it = [0] * self.n
            while True:
                room = float("inf") if limit is None else limit - total
                if room <= self.eps:
                    return total
                pushed = self._dfs(s, t, room, level, it)
                if pushed <= self.eps:
                    break
                total += pushed

    def reachable(self, s: int) -> set[int]:
        """Nodes reachable from ``s`` in the residual network."""
        seen = {s}
        q = deque([s])
        while q:
            u = q.popleft()
            for e in self.graph[u]:
                v = self.to[e]
                if v not in seen and self.cap[e] > self.eps:
                    seen.add(v)
                    q.append(v)
        return seen


def vertex_disjoint_paths(adj, s: int, t: int, limit: int | None = None) -> int:
    """Number of internally vertex-disjoint ``s -> t`` paths in a digraph.

    ``adj`` is a boolean (or capacity) matrix; every vertex other than the
    endpoints gets capacity 1 by node splitting.
    """
    n = len(adj)
    net = FlowNetwork(2 * n)
    for v in range(n):
        # v_in = v, v_out = n + v
        net.add_edge(v, n + v, 10**9 if v in (s, t) else 1)
    for u in range(n):
        for v in range(n):
            if u != v and adj[u][v]:
                net.add_edge(n + u, v, 1)
    return int(net.max_flow(n + s, t, limit=limit))

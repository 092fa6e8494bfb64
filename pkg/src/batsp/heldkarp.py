"""Held-Karp feasibility on threshold digraphs by row generation.

The relaxation on a digraph ``G = (V, A)`` asks for ``x >= 0`` on the arcs
with unit in- and out-degree at every vertex and ``x(delta+(S)) >= 1`` for
every nonempty proper ``S``.  Degree rows are kept explicitly; cut rows are
added lazily, found by ``2(n-1)`` max-flow computations from root 0.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .exceptions import InfeasibleRelaxation, IterationLimit
from .flow import FlowNetwork
from .instance import Digraph, MetricInstance, bfs_hops, threshold_graph
from .lp import phase1, rational_rank

log = logging.getLogger(__name__)

EPS_LP = 1e-7
EPS_SEP = 1e-6
EPS_ZERO = 1e-8
ROUNDS_PER_VERTEX = 50


@dataclass(frozen=True)
class SeparationResult:
    violated: bool
    cut_set: frozenset
    cut_value: float


@dataclass(eq=False)
class HeldKarpSolution:
    """A vertex of the Held-Karp polytope of ``graph``.

    ``x`` is a dense ``n x n`` matrix (float, or Fraction in exact mode)
    that vanishes outside the arcs of ``graph``.
    """

    graph: Digraph
    x: np.ndarray
    tight_cuts: list = field(default_factory=list)
    is_extreme: bool = False
    exact: bool = False
    rounds: int = 0

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def support(self) -> list[tuple[int, int]]:
        return [(u, v) for u, v in self.graph.arcs if self.x[u, v] > EPS_ZERO]

    def value(self, u: int, v: int) -> float:
        return self.x[u, v]

    def cut_value(self, S) -> float:
        return cut_value(self.x, S)

    def as_float(self) -> np.ndarray:
        return np.asarray(self.x, dtype=np.float64)


def cut_value(x: np.ndarray, S) -> float:
    """``x(delta+(S))`` for a dense arc matrix."""
    n = x.shape[0]
    inside = np.zeros(n, dtype=bool)
    inside[list(S)] = True
    return x[np.ix_(inside, ~inside)].sum()


def _arc_network(x: np.ndarray, exact: bool) -> FlowNetwork:
    n = x.shape[0]
    net = FlowNetwork(n, eps=0 if exact else 1e-12)
    for u, v in zip(*np.nonzero(x)):
        if u != v:
            net.add_edge(int(u), int(v), x[u, v])
    return net


def _candidate_cuts(x: np.ndarray, exact: bool, symmetric: bool = False):
    """Minimum ``root -> v`` and ``v -> root`` cuts for every ``v != 0``."""
    n = x.shape[0]
    found = []
    directions = ((0, None),) if symmetric else ((0, None), (None, 0))
    for v in range(1, n):
        for s, t in directions:
            src = v if s is None else s
            dst = v if t is None else t
            net = _arc_network(x, exact)
            net.max_flow(src, dst)
            S = frozenset(net.reachable(src))
            found.append(S)
    return found


def separate_cut(g: Digraph, x: np.ndarray, *, exact: bool = False) -> SeparationResult:
    """Globally minimum directed cut of the capacity vector ``x``."""
    x = np.where(g.adj, x, 0) if not exact else _mask_exact(x, g.adj)
    best = None
    for S in _candidate_cuts(x, exact):
        val = cut_value(x, S)
        if best is None or val < best[0]:
            best = (val, S)
    value, S = best
    threshold = 1 if exact else 1 - EPS_SEP
    return SeparationResult(bool(value < threshold), S, value)


def _mask_exact(x, adj):
    out = np.array(x, dtype=object, copy=True)
    out[~adj] = Fraction(0)
    return out


def _violated(x: np.ndarray, exact: bool, rhs, tol, symmetric=False):
    """Distinct cut sets whose value is below ``rhs - tol``."""
    seen = {}
    value_of = _undirected_cut_value if symmetric else cut_value
    for S in _candidate_cuts(x, exact, symmetric=symmetric):
        if S in seen:
            continue
        val = value_of(x, S)
        if val < rhs - tol:
            seen[S] = val
    return seen


def _zero_out_cut(g: Digraph):
    """A nonempty proper set with no leaving arc, if one exists."""
    n = g.n
    for v in range(n):
        if not g.adj[v].any():
            return frozenset([v])
        if not g.adj[:, v].any():
            return frozenset(range(n)) - {v}
    fwd = bfs_hops(g, 0) >= 0
    if not fwd.all():
        return frozenset(np.flatnonzero(fwd).tolist())
    back = bfs_hops(g, 0, reverse=True) >= 0
    if not back.all():
        return frozenset(np.flatnonzero(~back).tolist())
    return None


def _build_rows(n, arcs, cuts, crossing):
    """Equality system: degree rows, then one row (with slack) per cut."""
    na, nc = len(arcs), len(cuts)
    A = np.zeros((2 * n + nc, na + nc))
    for j, (u, v) in enumerate(arcs):
        A[u, j] = 1
        A[n + v, j] = 1
    for i, S in enumerate(cuts):
        for j, arc in enumerate(arcs):
            if crossing(arc, S):
                A[2 * n + i, j] = 1
        A[2 * n + i, na + i] = -1
    return A


def _leaves(arc, S):
    return arc[0] in S and arc[1] not in S


def solve_feasibility(
    g: Digraph,
    *,
    exact: bool = False,
    trace: Callable[[dict], None] | None = None,
    max_rounds: int | None = None,
) -> HeldKarpSolution:
    """Return a vertex solution of the relaxation on ``g``.

    Raises :class:`InfeasibleRelaxation` with a cut or degree certificate.
    """
    n = g.n
    if n < 2:
        raise ValueError("Held-Karp relaxation needs n >= 2")
    S0 = _zero_out_cut(g)
    if S0 is not None:
        raise InfeasibleRelaxation(("cut", S0))

    arcs = g.arcs
    cuts: list[frozenset] = []
    cap = max_rounds if max_rounds is not None else ROUNDS_PER_VERTEX * n
    feas_tol = 0 if exact else n * EPS_LP
    for rounds in range(1, cap + 1):
        A = _build_rows(n, arcs, cuts, _leaves)
        b = np.ones(A.shape[0])
        if exact:
            A = A.astype(int)
            b = b.astype(int)
        res = phase1(A, b, exact=exact)
        if res.residual > feas_tol:
            info = {
                "residual": float(res.residual),
                "duals": None if res.duals is None else res.duals.tolist(),
                "cuts": [sorted(S) for S in cuts],
            }
            if trace:
                trace({"iteration": rounds, "added_cuts": [], "objective": float(res.residual), "status": "infeasible"})
            raise InfeasibleRelaxation(("degree", info))

        x = np.zeros((n, n), dtype=object if exact else np.float64)
        if exact:
            x[:, :] = Fraction(0)
        for j, (u, v) in enumerate(arcs):
            x[u, v] = res.y[j]
        new = _violated(x, exact, 1, 0 if exact else EPS_LP)
        new = {S: val for S, val in new.items() if S not in cuts}
        if trace:
            trace(
                {
                    "iteration": rounds,
                    "added_cuts": [sorted(S) for S in new],
                    "objective": float(res.residual),
                    "pivots": res.pivots,
                }
            )
        if not new:
            tol = 0 if exact else EPS_LP
            tight = [S for S in cuts if abs(cut_value(x, S) - 1) <= tol]
            sol = HeldKarpSolution(g, x, tight_cuts=tight, exact=exact, rounds=rounds)
            sol.is_extreme = tight_constraint_rank(sol) == len(arcs)
            return sol
        cuts.extend(sorted(new, key=lambda S: (len(S), sorted(S))))
    raise IterationLimit(f"row generation did not converge in {cap} rounds")


def is_feasible(g: Digraph, **kwargs) -> bool:
    try:
        solve_feasibility(g, **kwargs)
    except InfeasibleRelaxation:
        return False
    return True


def tight_constraint_rows(sol: HeldKarpSolution) -> list[list[int]]:
    """Constraint rows active at ``sol`` over the arcs of its graph."""
    arcs = sol.graph.arcs
    n = sol.n
    tol = 0 if sol.exact else EPS_ZERO
    rows = []
    for j, (u, v) in enumerate(arcs):
        if abs(sol.x[u, v]) <= tol:
            r = [0] * len(arcs)
            r[j] = 1
            rows.append(r)
    for v in range(n):
        rows.append([1 if a[0] == v else 0 for a in arcs])
        rows.append([1 if a[1] == v else 0 for a in arcs])
    for S in sol.tight_cuts:
        rows.append([1 if _leaves(a, S) else 0 for a in arcs])
    return rows


def tight_constraint_rank(sol: HeldKarpSolution) -> int:
    rows = tight_constraint_rows(sol)
    ncols = sol.graph.n_arcs
    if not rows or ncols == 0:
        return 0
    if sol.exact:
        return rational_rank(rows, ncols, target=ncols)
    return int(np.linalg.matrix_rank(np.array(rows, dtype=np.float64)))


def find_tau_star(
    inst: MetricInstance,
    *,
    exact: bool = False,
    trace: Callable[[dict], None] | None = None,
    history: list | None = None,
) -> tuple[float, HeldKarpSolution]:
    """Smallest threshold cost whose relaxation is feasible, with a vertex solution.

    ``history`` (if given) receives ``(tau, feasible)`` for every probe.
    """
    if inst.n < 2:
        raise ValueError("threshold search needs n >= 2")
    costs = inst.distinct_costs()
    lo, hi = 0, len(costs) - 1
    cache: dict[int, HeldKarpSolution] = {}

    def probe(i):
        g = threshold_graph(inst, costs[i])
        try:
            sol = solve_feasibility(g, exact=exact, trace=trace)
        except InfeasibleRelaxation as exc:
            log.debug("tau=%s infeasible: %s", costs[i], exc)
            if history is not None:
                history.append((float(costs[i]), False))
            return None
        if history is not None:
            history.append((float(costs[i]), True))
        cache[i] = sol
        return sol

    while lo < hi:
        mid = (lo + hi) // 2
        if probe(mid) is not None:
            hi = mid
        else:
            lo = mid + 1
    sol = cache.get(lo) or probe(lo)
    if sol is None:
        raise InfeasibleRelaxation(("cut", frozenset()))  # unreachable for n >= 2
    return float(costs[lo]), sol


# -- symmetric system -------------------------------------------------------


@dataclass(eq=False)
class SymmetricHkSolution:
    adj: np.ndarray
    z: np.ndarray
    tight_cuts: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.adj.shape[0]


def _undirected_cut_value(z: np.ndarray, S) -> float:
    return cut_value(z, S)


def _crosses(edge, S):
    return (edge[0] in S) != (edge[1] in S)


def solve_symmetric_hk(adj, *, trace=None, max_rounds: int | None = None) -> SymmetricHkSolution:
    """Feasibility of ``z(delta(v)) = 2``, ``z(delta(S)) >= 2``, ``z >= 0``.

    ``adj`` is a symmetric boolean adjacency matrix of a simple graph.
    """
    adj = np.asarray(adj, dtype=bool)
    adj = adj | adj.T
    np.fill_diagonal(adj, False)
    n = adj.shape[0]
    if n < 3:
        raise ValueError("symmetric relaxation needs n >= 3")
    reach = bfs_hops(Digraph(adj), 0) >= 0
    if not reach.all():
        raise InfeasibleRelaxation(("cut", frozenset(np.flatnonzero(reach).tolist())))

    edges = [(int(u), int(v)) for u, v in np.argwhere(np.triu(adj))]
    cuts: list[frozenset] = []
    cap = max_rounds if max_rounds is not None else ROUNDS_PER_VERTEX * n
    for rounds in range(1, cap + 1):
        ne, nc = len(edges), len(cuts)
        A = np.zeros((n + nc, ne + nc))
        for j, (u, v) in enumerate(edges):
            A[u, j] = 1
            A[v, j] = 1
        for i, S in enumerate(cuts):
            for j, e in enumerate(edges):
                if _crosses(e, S):
                    A[n + i, j] = 1
            A[n + i, ne + i] = -1
        b = np.full(A.shape[0], 2.0)
        res = phase1(A, b)
        if res.residual > n * EPS_LP:
            raise InfeasibleRelaxation(
                ("degree", {"residual": float(res.residual), "duals": None, "cuts": [sorted(S) for S in cuts]})
            )
        z = np.zeros((n, n))
        for j, (u, v) in enumerate(edges):
            z[u, v] = z[v, u] = res.y[j]
        new = _violated(z, False, 2, EPS_LP, symmetric=True)
        new = {S: val for S, val in new.items() if S not in cuts}
        if trace:
            trace({"iteration": rounds, "added_cuts": [sorted(S) for S in new], "objective": float(res.residual)})
        if not new:
            tight = [S for S in cuts if abs(cut_value(z, S) - 2) <= EPS_LP]
            return SymmetricHkSolution(adj, z, tight)
        cuts.extend(sorted(new, key=lambda S: (len(S), sorted(S))))
    raise IterationLimit(f"row generation did not converge in {cap} rounds")

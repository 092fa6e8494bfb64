"""Vertex-capacitated integral circulation around a thin tree.

Every vertex ``v`` is split into ``v_in = 2v`` and ``v_out = 2v + 1``.
Support arcs ``(u, v)`` become ``u_out -> v_in`` with bounds
``[1, ceil(1 + 2 beta x_uv)]`` for tree arcs and ``[0, ceil(2 beta x_uv)]``
otherwise; ``v_in -> v_out`` carries ``ceil(sum of fractional uppers of
v's out-arcs)`` which is at most ``ceil(4 beta)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InfeasibleCirculation, InvariantViolation
from .flow import FlowNetwork
from .heldkarp import EPS_ZERO, HeldKarpSolution
from .instance import Digraph, bfs_hops

CEIL_TOL = 1e-9


def ceil_tol(value: float, tol: float = CEIL_TOL) -> int:
    """Ceiling that ignores float noise just above an integer."""
    return int(math.ceil(value - tol))


def v_in(v: int) -> int:
    return 2 * v


def v_out(v: int) -> int:
    return 2 * v + 1


@dataclass(frozen=True)
class CirculationInstance:
    n: int
    beta: float
    arcs: list[tuple[int, int]]  # split-network arcs
    lower: list[int]
    upper: list[int]
    original: list  # original arc for arc i, or None for split arcs
    frac_capacity: np.ndarray  # per-vertex sum of fractional uppers
    tree_arcs: frozenset

    @property
    def visit_bound(self) -> int:
        return ceil_tol(4 * self.beta)


@dataclass(frozen=True)
class IntegralCirculation:
    flow: list[int]


@dataclass(frozen=True, eq=False)
class EulerianMultigraph:
    multiplicity: np.ndarray  # n x n nonnegative ints
    visit_bound: int

    @property
    def n(self) -> int:
        return self.multiplicity.shape[0]

    @property
    def n_arcs(self) -> int:
        return int(self.multiplicity.sum())

    def out_degree(self) -> np.ndarray:
        return self.multiplicity.sum(axis=1)

    def in_degree(self) -> np.ndarray:
        return self.multiplicity.sum(axis=0)


def build_instance(x_star: HeldKarpSolution, t_arrow, beta: float) -> CirculationInstance:
    x = x_star.as_float()
    n = x.shape[0]
    tree = frozenset(tuple(a) for a in t_arrow)
    for u, v in tree:
        if x[u, v] <= EPS_ZERO:
            raise InvariantViolation(f"tree arc ({u},{v}) outside the support of x*")
    arcs, lower, upper, original = [], [], [], []
    frac = np.zeros(n)
    for u, v in x_star.support:
        in_tree = (u, v) in tree
        u_frac = (1.0 if in_tree else 0.0) + 2 * beta * x[u, v]
        frac[u] += u_frac
        arcs.append((v_out(u), v_in(v)))
        lower.append(1 if in_tree else 0)
        upper.append(ceil_tol(u_frac))
        original.append((u, v))
    bound = ceil_tol(4 * beta)
    for v in range(n):
        cap = ceil_tol(frac[v])
        if cap > bound:
            raise InvariantViolation(
                f"vertex {v}: capacity ceil({frac[v]:.6g}) exceeds ceil(4 beta) = {bound}"
            )
        arcs.append((v_in(v), v_out(v)))
        lower.append(0)
        upper.append(cap)
        original.append(None)
    return CirculationInstance(n, beta, arcs, lower, upper, original, frac, tree)


def solve_integral(inst: CirculationInstance) -> IntegralCirculation:
    """Integral circulation via the standard lower-bound reduction to max-flow."""
    nodes = 2 * inst.n
    source, sink = nodes, nodes + 1
    net = FlowNetwork(nodes + 2)
    excess = [0] * nodes
    ids = []
    for (a, b), lo, hi in zip(inst.arcs, inst.lower, inst.upper):
        if lo > hi:
            raise InfeasibleCirculation(f"arc {a}->{b} has lower {lo} > upper {hi}")
        ids.append(net.add_edge(a, b, hi - lo))
        excess[b] += lo
        excess[a] -= lo
    need = 0
    for v, e in enumerate(excess):
        if e > 0:
            net.add_edge(source, v, e)
            need += e
        elif e < 0:
            net.add_edge(v, sink, -e)
    got = net.max_flow(source, sink)
    if got != need:
        side = net.reachable(source) - {source}
        deficient = sorted({node // 2 for node in side})
        raise InfeasibleCirculation(
            f"circulation infeasible: routed {got} of {need} units", deficient=deficient
        )
    flow = [lo + net.flow(eid) for lo, eid in zip(inst.lower, ids)]
    return IntegralCirculation(flow)


def assemble_multigraph(inst: CirculationInstance, circ: IntegralCirculation) -> EulerianMultigraph:
    n = inst.n
    mult = np.zeros((n, n), dtype=np.int64)
    for orig, f in zip(inst.original, circ.flow):
        if orig is not None and f:
            mult[orig] += f
    mg = EulerianMultigraph(mult, inst.visit_bound)
    check_multigraph(mg)
    return mg


def check_multigraph(mg: EulerianMultigraph) -> None:
    out, inn = mg.out_degree(), mg.in_degree()
    if not np.array_equal(out, inn):
        raise InvariantViolation("multigraph is not balanced")
    if mg.n > 1:
        if out.min() < 1:
            raise InvariantViolation("some vertex is not visited")
        if not (bfs_hops(Digraph(mg.multiplicity > 0), 0) >= 0).all():
            raise InvariantViolation("multigraph is disconnected")
    if out.max(initial=0) > mg.visit_bound:
        raise InvariantViolation(f"out-degree {out.max()} exceeds bound {mg.visit_bound}")


def to_dot(inst: CirculationInstance) -> str:
    """Graphviz rendering of the split network."""
    lines = ["digraph circulation {"]
    for v in range(inst.n):
        lines.append(f'  n{v_in(v)} [label="{v}_i"];')
        lines.append(f'  n{v_out(v)} [label="{v}_o"];')
    for (a, b), lo, hi, orig in zip(inst.arcs, inst.lower, inst.upper, inst.original):
        style = "" if orig is not None else ", style=bold"
        lines.append(f'  n{a} -> n{b} [label="[{lo},{hi}]"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"

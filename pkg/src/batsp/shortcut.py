"""From a degree-bounded Eulerian multigraph to a Hamiltonian cycle.

A circuit visiting every vertex at most ``k`` times is cut into pieces of
``k`` consecutive positions.  A system of distinct representatives (one
vertex per piece) exists by Hall's theorem, and keeping those occurrences
plus the first occurrence of every other vertex yields a tour whose
consecutive vertices are at most ``2k - 1`` circuit arcs apart.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .circulation import EulerianMultigraph
from .exceptions import InvariantViolation, NoTransversal, NotEulerian
from .instance import Digraph, MetricInstance, bfs_hops


@dataclass(frozen=True)
class SpanningCircuit:
    sequence: tuple[int, ...]
    k: int

    @property
    def m(self) -> int:
        return len(self.sequence)

    @property
    def visit_count(self) -> dict[int, int]:
        return dict(Counter(self.sequence))


@dataclass(frozen=True)
class PiecePartition:
    sequence: tuple[int, ...]
    k: int

    @property
    def pieces(self) -> list[tuple[int, ...]]:
        s, k = self.sequence, self.k
        return [s[i : i + k] for i in range(0, len(s), k)]

    def __len__(self) -> int:
        return -(-len(self.sequence) // self.k)


@dataclass(frozen=True)
class Transversal:
    # piece index -> (absolute circuit position, vertex)
    choice: dict[int, tuple[int, int]]


@dataclass
class TourResult:
    tour: list[int]
    bottleneck: float
    max_hops: int
    hops: list[int]
    k_used: int
    tau_star: float
    max_gap: int = 0
    ratio_bound: int = field(init=False)

    def __post_init__(self):
        self.ratio_bound = 2 * self.k_used - 1

    def to_dict(self) -> dict:
        return {
            "tour": list(self.tour),
            "bottleneck": self.bottleneck,
            "max_hops": self.max_hops,
            "hops": list(self.hops),
            "k_used": self.k_used,
            "tau_star": self.tau_star,
            "max_gap": self.max_gap,
            "ratio_bound": self.ratio_bound,
        }


def euler_circuit(mg: EulerianMultigraph, start: int = 0) -> SpanningCircuit:
    """Hierholzer traversal using every arc exactly its multiplicity."""
    mult = mg.multiplicity
    if not np.array_equal(mult.sum(axis=0), mult.sum(axis=1)):
        raise NotEulerian("in- and out-multiplicities differ")
    out = [[v for v in range(mg.n) for _ in range(int(mult[u, v]))] for u in range(mg.n)]
    ptr = [0] * mg.n
    stack = [start]
    walk = []
    while stack:
        u = stack[-1]
        if ptr[u] < len(out[u]):
            stack.append(out[u][ptr[u]])
            ptr[u] += 1
        else:
            walk.append(stack.pop())
    walk.reverse()
    if len(walk) - 1 != mg.n_arcs:
        raise NotEulerian("multigraph arcs are not connected to the start vertex")
    seq = tuple(walk[:-1]) if len(walk) > 1 else tuple(walk)
    return SpanningCircuit(seq, mg.visit_bound)


def partition_pieces(c: SpanningCircuit | tuple, k: int) -> PiecePartition:
    if k < 1:
        raise ValueError("k must be >= 1")
    seq = c.sequence if isinstance(c, SpanningCircuit) else tuple(c)
    return PiecePartition(seq, k)


def find_transversal(p: PiecePartition) -> Transversal:
    """Distinct representatives for the pieces by augmenting paths (Kuhn)."""
    pieces = p.pieces
    options = []
    for i, piece in enumerate(pieces):
        first = {}
        for off, v in enumerate(piece):
            first.setdefault(v, i * p.k + off)
        options.append(first)
    owner: dict[int, int] = {}

    def augment(i, visited):
        for v in options[i]:
            if v in visited:
                continue
            visited.add(v)
            if v not in owner or augment(owner[v], visited):
                owner[v] = i
                return True
        return False

    for i in range(len(pieces)):
        visited: set[int] = set()
        if not augment(i, visited):
            # Pieces reachable by alternating paths form a Hall violator.
            bad = sorted({i} | {owner[v] for v in visited if v in owner})
            raise NoTransversal(
                f"pieces {bad} cover only {len(visited)} distinct vertices", pieces=bad
            )
    choice = {i: (options[i][v], v) for v, i in owner.items()}
    return Transversal(dict(sorted(choice.items())))


def kept_positions(c: SpanningCircuit, t: Transversal) -> list[int]:
    chosen = {v for _, v in t.choice.values()}
    keep = {pos for pos, _ in t.choice.values()}
    seen = set()
    for pos, v in enumerate(c.sequence):
        if v not in chosen and v not in seen:
            keep.add(pos)
        seen.add(v)
    return sorted(keep)


def cyclic_gaps(positions: list[int], m: int) -> list[int]:
    return [
        (positions[(i + 1) % len(positions)] - positions[i]) % m or m
        for i in range(len(positions))
    ]


def shortcut_tour(c: SpanningCircuit, t: Transversal, inst: MetricInstance, g: Digraph) -> TourResult:
    """Keep transversal occurrences plus first occurrences of the rest."""
    positions = kept_positions(c, t)
    tour = [c.sequence[p] for p in positions]
    if sorted(tour) != list(range(inst.n)):
        raise InvariantViolation("shortcut sequence is not a permutation")
    gaps = cyclic_gaps(positions, c.m)
    if 0 in tour:
        r = tour.index(0)
        tour = tour[r:] + tour[:r]
    return evaluate_tour(tour, inst, g, k=c.k, max_gap=max(gaps))


def evaluate_tour(tour, inst: MetricInstance, g: Digraph, k: int, max_gap: int = 0) -> TourResult:
    n = len(tour)
    tau = float(getattr(g, "tau", 0.0))
    if n <= 1:
        return TourResult(list(tour), 0.0, 0, [], k, tau, max_gap)
    hops, costs = [], []
    for i in range(n):
        u, v = tour[i], tour[(i + 1) % n]
        d = int(bfs_hops(g, u)[v])
        hops.append(d)
        costs.append(inst.c(u, v))
    return TourResult([int(v) for v in tour], max(costs), max(hops), hops, k, tau, max_gap)

"""Explicit extremal objects, their verifiers, and random instance generators."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

import networkx as nx
import numpy as np

from .exceptions import InvalidK, SizeLimit
from .flow import FlowNetwork, vertex_disjoint_paths
from .heldkarp import InfeasibleRelaxation, solve_symmetric_hk
from .instance import Digraph, MetricInstance, bfs_hops, metric_closure
from .lp import rational_rank

EXHAUSTIVE_CUT_MAX_N = 17
PAIR_EXHAUSTIVE_MAX_N = 60


# -- high-degree extreme point --------------------------------------------------


@dataclass
class ExtremePointCertificate:
    k: int
    labels: list[str]
    x_star: np.ndarray  # n x n Fractions
    tight_sets: list[frozenset]

    @property
    def n(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def value(self, a: str, b: str) -> Fraction:
        return self.x_star[self.index(a), self.index(b)]

    @property
    def support(self) -> list[tuple[int, int]]:
        return [(int(u), int(v)) for u, v in zip(*np.nonzero(self.x_star))]

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "n": self.n,
            "labels": self.labels,
            "arcs": [
                {"tail": self.labels[u], "head": self.labels[v], "value": str(self.x_star[u, v])}
                for u, v in self.support
            ],
            "tight_sets": [sorted(self.labels[i] for i in S) for S in self.tight_sets],
        }


def _ep_labels(k: int) -> list[str]:
    return [f"u{i}" for i in range(k + 2)] + [f"v{i}" for i in range(k + 2)] + ["w"]


def build_extreme_point(k: int) -> ExtremePointCertificate:
    """Held-Karp extreme point on ``2k + 5`` vertices where ``w`` has in/out-degree ``k``.

    Vertices are numbered ``u_0..u_{k+1}``, then ``v_0..v_{k+1}``, then ``w``.
    """
    if not isinstance(k, int) or k < 2:
        raise InvalidK(f"k must be an integer >= 2, got {k!r}")
    labels = _ep_labels(k)
    n = len(labels)
    u = list(range(k + 2))
    v = list(range(k + 2, 2 * k + 4))
    w = 2 * k + 4
    x = np.empty((n, n), dtype=object)
    x[:, :] = Fraction(0)
    big, small = 1 - Fraction(1, k), Fraction(1, k)
    x[v[k + 1], u[0]] = Fraction(1)
    for i in range(k + 1):
        x[u[i], u[i + 1]] = big
        x[v[i], v[i + 1]] = big
    for i in range(1, k + 1):
        x[u[k + 1], u[i]] = small
        x[u[i], w] = small
        x[w, v[i]] = small
        x[v[i], v[0]] = small
    x[u[0], u[k + 1]] = small
    x[v[0], v[k + 1]] = small

    everything = frozenset(range(n))
    tight = [everything - frozenset(u[i:]) for i in range(1, k + 2)]
    # Mirror image under u_i <-> v_{k+1-i} with arcs reversed.
    tight += [frozenset(v[: k + 2 - i]) for i in range(1, k + 2)]
    tight.append(everything - {u[0]})
    return ExtremePointCertificate(k, labels, x, tight)


def _integer_scaled(x: np.ndarray) -> tuple[np.ndarray, int]:
    den = 1
    for val in x.flat:
        den = lcm(den, Fraction(val).denominator)
    scaled = np.array([[int(Fraction(val) * den) for val in row] for row in x], dtype=np.int64)
    return scaled, den


def all_cut_values(x_int: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``x(delta+(S))`` for every nonempty proper ``S`` (integer weights).

    Returns the membership matrix (one row per set) and the cut values.
    """
    n = x_int.shape[0]
    codes = np.arange(1, (1 << n) - 1, dtype=np.int64)
    member = ((codes[:, None] >> np.arange(n)) & 1).astype(np.int64)
    values = ((member @ x_int) * (1 - member)).sum(axis=1)
    return member.astype(bool), values


@dataclass
class ConstructionVerdict:
    ok: bool
    checks: dict = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict:
        return {"ok": self.ok, "checks": self.checks, "failures": self.failures}


def verify_extreme_point(cert: ExtremePointCertificate) -> ConstructionVerdict:
    """Degree equalities, every cut constraint, and uniqueness of the tight system."""
    n = cert.n
    if n > EXHAUSTIVE_CUT_MAX_N:
        raise SizeLimit(f"exhaustive cut scan limited to n <= {EXHAUSTIVE_CUT_MAX_N}")
    x = cert.x_star
    fails = []
    checks = {}

    bad_deg = [
        i for i in range(n)
        if sum(x[i, :], Fraction(0)) != 1 or sum(x[:, i], Fraction(0)) != 1
    ]
    checks["degree_equalities"] = not bad_deg
    if bad_deg:
        fails.append(f"degree equality fails at {[cert.labels[i] for i in bad_deg]}")

    x_int, den = _integer_scaled(x)
    member, values = all_cut_values(x_int)
    min_val = Fraction(int(values.min()), den)
    checks["cuts_checked"] = int(len(values))
    checks["min_cut_value"] = str(min_val)
    checks["violated_cuts"] = int((values < den).sum())
    if checks["violated_cuts"]:
        fails.append(f"{checks['violated_cuts']} cut constraints violated (min {min_val})")
    checks["named_tight_sets_tight"] = all(
        sum(x[i, j] for i in S for j in range(n) if j not in S) == 1 for S in cert.tight_sets
    )
    if not checks["named_tight_sets_tight"]:
        fails.append("a named tight set is not tight")

    # Tight system over support arcs: degree rows, named tight sets first,
    # then every other cut of value exactly 1.
    arcs = cert.support
    index = {S: True for S in cert.tight_sets}
    tight_all = [frozenset(np.flatnonzero(row).tolist()) for row in member[values == den]]
    ordered = list(cert.tight_sets) + [S for S in tight_all if S not in index]

    def rows():
        for i in range(n):
            yield [1 if a[0] == i else 0 for a in arcs]
            yield [1 if a[1] == i else 0 for a in arcs]
        for S in ordered:
            yield [1 if (a[0] in S and a[1] not in S) else 0 for a in arcs]

    rank = rational_rank(rows(), len(arcs), target=len(arcs))
    checks["support_arcs"] = len(arcs)
    checks["tight_cuts"] = len(tight_all)
    checks["rank"] = rank
    checks["unique_solution"] = rank == len(arcs)
    if rank != len(arcs):
        fails.append(f"tight system has rank {rank} < {len(arcs)} support arcs")

    w = n - 1
    checks["w_indegree"] = sum(1 for a in arcs if a[1] == w)
    checks["w_outdegree"] = sum(1 for a in arcs if a[0] == w)
    if checks["w_indegree"] != cert.k or checks["w_outdegree"] != cert.k:
        fails.append("w does not have in- and out-degree k in the support")
    return ConstructionVerdict(not fails, checks, fails)


# -- layered counterexample ------------------------------------------------------


@dataclass
class CounterexampleGraph:
    k: int
    p: int
    layers: list[list[int]]
    graph: Digraph

    @property
    def n(self) -> int:
        return self.graph.n

    def layer_of(self, v: int) -> int:
        for i, layer in enumerate(self.layers):
            if v in layer:
                return i
        raise KeyError(v)

    def to_dict(self) -> dict:
        return {"k": self.k, "p": self.p, "n": self.n, "layers": self.layers, "arcs": self.graph.arcs}


def build_counterexample(k: int, p: int) -> CounterexampleGraph:
    """Layers ``V_0..V_p`` with complete bipartite arcs ``V_i -> V_{i+1 mod p+1}``."""
    if k < 1 or p < 1:
        raise InvalidK("k and p must be >= 1")
    sizes = [p * (2 * k + 2) + 1] + [2 * k + 2] * p
    layers, start = [], 0
    for s in sizes:
        layers.append(list(range(start, start + s)))
        start += s
    adj = np.zeros((start, start), dtype=bool)
    for i in range(p + 1):
        nxt = layers[(i + 1) % (p + 1)]
        adj[np.ix_(layers[i], nxt)] = True
    return CounterexampleGraph(k, p, layers, Digraph(adj))


def _explicit_paths(g: CounterexampleGraph, a: int, b: int, indices) -> list[list[int]]:
    """Paths ``a -> b`` threading the layers between them through fixed slots."""
    p = g.p
    la, lb = g.layer_of(a), g.layer_of(b)
    d = (lb - la) % (p + 1)
    count = {0: p, 1: p + 1}.get(d, d - 1)
    paths = []
    for j in indices:
        mids = [g.layers[(la + s) % (p + 1)][j] for s in range(1, count + 1)]
        paths.append([a] + mids + [b])
    return paths


def explicit_disjoint_paths(g: CounterexampleGraph, a: int, b: int):
    """``k`` paths ``a -> b`` and ``k`` paths ``b -> a``, internally disjoint."""
    k = g.k
    ja, jb = g.layers[g.layer_of(a)].index(a), g.layers[g.layer_of(b)].index(b)
    free = [j for j in range(2 * k + 2) if j not in (ja, jb)]
    P, Q = free[:k], free[k : 2 * k]
    return _explicit_paths(g, a, b, P), _explicit_paths(g, b, a, Q)


def _paths_ok(g: Digraph, paths_ab, paths_ba, a, b) -> bool:
    inner = []
    for path, (s, t) in [(pp, (a, b)) for pp in paths_ab] + [(qq, (b, a)) for qq in paths_ba]:
        if path[0] != s or path[-1] != t:
            return False
        if not all(g.adj[x, y] for x, y in zip(path, path[1:])):
            return False
        if len(set(path)) != len(path):
            return False
        inner.extend(path[1:-1])
    return len(inner) == len(set(inner))


def verify_counterexample(g: CounterexampleGraph, pairs: int | None = None, seed: int = 0) -> ConstructionVerdict:
    """Counting certificate for non-Hamiltonicity of ``G^p`` plus path checks.

    ``pairs=None`` checks every ordered pair when ``n`` is small enough and 20
    random pairs otherwise.
    """
    fails, checks = [], {}
    n, p, k = g.n, g.p, g.k
    v0 = g.layers[0]
    rest = sorted(set(range(n)) - set(v0))
    reach = set()
    for v in v0:
        d = bfs_hops(g.graph, v)
        reach |= set(np.flatnonzero((d >= 1) & (d <= p)).tolist())
    checks["v0_size"] = len(v0)
    checks["rest_size"] = len(rest)
    checks["neighbourhood_is_rest"] = reach == set(rest)
    checks["counting_certificate"] = len(v0) > len(rest)
    if not checks["neighbourhood_is_rest"]:
        fails.append("p-hop out-neighbourhood of V_0 differs from V minus V_0")
    if not checks["counting_certificate"]:
        fails.append("|V_0| does not exceed |V minus V_0|")

    if pairs is None and n <= PAIR_EXHAUSTIVE_MAX_N:
        todo = [(a, b) for a in range(n) for b in range(n) if a != b]
    else:
        rng = np.random.default_rng(seed)
        todo = []
        while len(todo) < (pairs or 20):
            a, b = (int(t) for t in rng.choice(n, 2, replace=False))
            todo.append((a, b))
    explicit_bad, flow_bad = [], []
    adj = g.graph.adj
    for a, b in todo:
        pa, qa = explicit_disjoint_paths(g, a, b)
        if not _paths_ok(g.graph, pa, qa, a, b):
            explicit_bad.append((a, b))
        if vertex_disjoint_paths(adj, a, b, limit=k) < k or vertex_disjoint_paths(adj, b, a, limit=k) < k:
            flow_bad.append((a, b))
    checks["pairs_checked"] = len(todo)
    checks["explicit_paths_ok"] = not explicit_bad
    checks["flow_paths_ok"] = not flow_bad
    if explicit_bad:
        fails.append(f"explicit path construction failed for {explicit_bad[:3]}")
    if flow_bad:
        fails.append(f"fewer than k disjoint paths for {flow_bad[:3]}")
    return ConstructionVerdict(not fails, checks, fails)


# -- 2-connectivity of graphs with a feasible symmetric relaxation --------------


def _proof_flow_paths(z: np.ndarray, s: int, t: int) -> int:
    """Integral s-t flow on the support of ``z`` with rounded-up arc capacities
    and unit capacity on every vertex other than ``s`` and ``t``."""
    n = z.shape[0]
    net = FlowNetwork(2 * n)
    for v in range(n):
        net.add_edge(v, n + v, 2 if v in (s, t) else 1)
    for a in range(n):
        for b in range(n):
            if a != b and z[a, b] > 1e-9:
                net.add_edge(n + a, b, int(np.ceil(z[a, b] - 1e-9)))
    return int(net.max_flow(n + s, t, limit=2))


@dataclass
class TwoConnectivityVerdict:
    hk_feasible: bool
    articulation_points: list[int]
    pairs_checked: int
    disjoint_paths_ok: bool

    @property
    def ok(self) -> bool:
        if not self.hk_feasible:
            return True
        return not self.articulation_points and self.disjoint_paths_ok

    def __bool__(self) -> bool:
        return self.ok


def check_two_connectivity(adj, pairs: int | None = None, seed: int = 0) -> TwoConnectivityVerdict:
    """If the symmetric relaxation is feasible, confirm 2-connectivity two ways."""
    adj = np.asarray(adj, dtype=bool)
    n = adj.shape[0]
    try:
        sol = solve_symmetric_hk(adj)
    except InfeasibleRelaxation:
        return TwoConnectivityVerdict(False, [], 0, True)
    cut_vertices = sorted(nx.articulation_points(nx.from_numpy_array(adj.astype(int))))
    if pairs is None:
        todo = list(itertools.combinations(range(n), 2))
    else:
        rng = np.random.default_rng(seed)
        todo = [tuple(int(t) for t in rng.choice(n, 2, replace=False)) for _ in range(pairs)]
    ok = all(_proof_flow_paths(sol.z, s, t) >= 2 for s, t in todo)
    return TwoConnectivityVerdict(True, cut_vertices, len(todo), ok)


def random_graph(n: int, density: float, rng) -> np.ndarray:
    upper = np.triu(rng.random((n, n)) < density, k=1)
    return upper | upper.T


def planted_cut_vertex_graph(a: int, b: int, rng, density: float = 0.6) -> np.ndarray:
    """Two dense blocks of sizes ``a`` and ``b`` glued at vertex 0.

    Each block contains a Hamiltonian cycle so the only weakness is the
    shared vertex.
    """
    n = a + b - 1
    adj = np.zeros((n, n), dtype=bool)
    for block in (list(range(a)), [0] + list(range(a, n))):
        m = len(block)
        sub = random_graph(m, density, rng)
        for i in range(m):
            sub[i, (i + 1) % m] = sub[(i + 1) % m, i] = True
        np.fill_diagonal(sub, False)
        adj[np.ix_(block, block)] |= sub
    return adj


# -- random metrics --------------------------------------------------------------


def gen_random_metric(n: int, seed: int, style: str = "closure") -> MetricInstance:
    """Seeded asymmetric metric with integer costs."""
    if n < 2:
        raise ValueError("n must be >= 2")
    rng = np.random.default_rng(seed)
    if style == "closure":
        cost = rng.integers(1, 101, size=(n, n)).astype(np.float64)
    elif style == "euclidean-ish":
        pts = rng.uniform(0, 100, size=(n, 2))
        dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
        cost = np.maximum(1.0, np.round(dist * rng.uniform(1.0, 1.3, size=(n, n))))
    else:
        raise ValueError(f"unknown style {style!r}")
    np.fill_diagonal(cost, 0.0)
    return MetricInstance(metric_closure(cost), name=f"{style}-n{n}-s{seed}", seed=seed)

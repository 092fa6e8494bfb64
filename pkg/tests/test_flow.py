from fractions import Fraction

import networkx as nx
import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from batsp.flow import FlowNetwork, vertex_disjoint_paths


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 100_000), n=st.integers(2, 9))
def test_max_flow_matches_networkx(seed, n):
    rng = np.random.default_rng(seed)
    cap = rng.integers(0, 6, size=(n, n)) * (rng.random((n, n)) < 0.5)
    np.fill_diagonal(cap, 0)
    net = FlowNetwork(n)
    G = nx.DiGraph()
    G.add_nodes_from(range(n))
    for u in range(n):
        for v in range(n):
            if cap[u, v]:
                net.add_edge(u, v, int(cap[u, v]))
                G.add_edge(u, v, capacity=int(cap[u, v]))
    assert net.max_flow(0, n - 1) == nx.maximum_flow_value(G, 0, n - 1)


def test_min_cut_side_from_residual():
    net = FlowNetwork(4)
    net.add_edge(0, 1, 3)
    net.add_edge(1, 3, 1)
    net.add_edge(0, 2, 1)
    net.add_edge(2, 3, 5)
    assert net.max_flow(0, 3) == 2
    assert net.reachable(0) == {0, 1}


def test_fraction_capacities_and_edge_flow():
    net = FlowNetwork(3)
    e = net.add_edge(0, 1, Fraction(1, 3))
    net.add_edge(1, 2, Fraction(1, 2))
    assert net.max_flow(0, 2) == Fraction(1, 3)
    assert net.flow(e) == Fraction(1, 3)


def test_limit_stops_early():
    net = FlowNetwork(2)
    net.add_edge(0, 1, 10)
    assert net.max_flow(0, 1, limit=4) == 4


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 100_000), n=st.integers(3, 9))
def test_disjoint_paths_matches_networkx(seed, n):
    rng = np.random.default_rng(seed)
    adj = rng.random((n, n)) < 0.45
    np.fill_diagonal(adj, False)
    adj[0, n - 1] = False
    G = nx.DiGraph([(int(u), int(v)) for u, v in np.argwhere(adj)])
    G.add_nodes_from(range(n))
    expected = len(list(nx.node_disjoint_paths(G, 0, n - 1))) if nx.has_path(G, 0, n - 1) else 0
    assert vertex_disjoint_paths(adj, 0, n - 1) == expected

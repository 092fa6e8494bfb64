import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from batsp.circulation import EulerianMultigraph
from batsp.exceptions import NoTransversal, NotEulerian
from batsp.instance import Digraph
from batsp.shortcut import (
    SpanningCircuit,
    Transversal,
    cyclic_gaps,
    euler_circuit,
    find_transversal,
    kept_positions,
    partition_pieces,
    shortcut_tour,
)

from conftest import uniform_metric

A, B, C = 0, 1, 2


def multigraph(n, arcs, bound=4):
    mult = np.zeros((n, n), dtype=int)
    for u, v in arcs:
        mult[u, v] += 1
    return EulerianMultigraph(mult, bound)


def circuit_graph(seq):
    m = len(seq)
    return Digraph.from_arcs(max(seq) + 1, [(seq[i], seq[(i + 1) % m]) for i in range(m)])


def test_simple_cycle_circuit():
    c = euler_circuit(multigraph(5, [(i, (i + 1) % 5) for i in range(5)]))
    assert c.sequence == (0, 1, 2, 3, 4)
    assert set(c.visit_count.values()) == {1}


def test_two_triangles_share_vertex():
    arcs = [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)]
    c = euler_circuit(multigraph(5, arcs))
    assert c.m == 6 and c.visit_count[0] == 2
    seq = c.sequence
    assert sorted((seq[i], seq[(i + 1) % 6]) for i in range(6)) == sorted(arcs)


def test_unbalanced_multigraph_rejected():
    with pytest.raises(NotEulerian):
        euler_circuit(multigraph(3, [(0, 1), (1, 2)]))
    with pytest.raises(NotEulerian):
        euler_circuit(multigraph(4, [(0, 1), (1, 0), (2, 3), (3, 2)]))


@pytest.mark.parametrize("m,k,sizes", [(10, 3, [3, 3, 3, 1]), (9, 3, [3, 3, 3]), (5, 1, [1] * 5)])
def test_piece_sizes(m, k, sizes):
    p = partition_pieces(tuple(range(m)), k)
    assert [len(x) for x in p.pieces] == sizes and len(p) == len(sizes)


def test_identity_transversal():
    t = find_transversal(partition_pieces((0, 1, 2, 3), 1))
    assert t.choice == {i: (i, i) for i in range(4)}


def test_small_transversal_enumerated():
    t = find_transversal(partition_pieces((A, B, A, C), 2))
    (_, first), (_, second) = t.choice[0], t.choice[1]
    assert first != second
    assert (first, second) in {(A, C), (B, A), (B, C)}


def test_pigeonhole_violator():
    # Vertex 0 fills two whole pieces of size 1, only one representative possible.
    with pytest.raises(NoTransversal) as err:
        find_transversal(partition_pieces((0, 0, 1), 1))
    assert len(err.value.pieces) == 2
    with pytest.raises(NoTransversal):
        find_transversal(partition_pieces((0, 1, 0, 1, 0, 1, 2), 2))


def test_hamiltonian_circuit_shortcut():
    inst = uniform_metric(5)
    seq = (0, 1, 2, 3, 4)
    c = SpanningCircuit(seq, 1)
    res = shortcut_tour(c, find_transversal(partition_pieces(c, 1)), inst, circuit_graph(seq))
    assert res.tour == list(seq) and res.max_hops == 1 and res.bottleneck == 1


def test_kept_occurrence_rule():
    seq = (A, B, A, C)
    c = SpanningCircuit(seq, 2)
    t = Transversal({0: (1, B), 1: (3, C)})
    pos = kept_positions(c, t)
    assert [seq[p] for p in pos] == [A, B, C]
    assert max(cyclic_gaps(pos, 4)) <= 3
    res = shortcut_tour(c, t, uniform_metric(3), circuit_graph(seq))
    assert res.tour == [A, B, C] and res.max_hops <= 3


def random_circuit(rng, n, k):
    """Closed walk visiting every vertex between 1 and ``k`` times, no immediate repeats."""
    seq = [int(v) for v in rng.permutation(n)]
    for v in range(n):
        for _ in range(int(rng.integers(0, k))):
            slots = [i for i in range(len(seq)) if v not in (seq[i - 1], seq[i])]
            if slots:
                seq.insert(int(rng.choice(slots)), v)
    return tuple(seq)


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(2, 12), k=st.integers(1, 5))
def test_shortcut_property(seed, n, k):
    rng = np.random.default_rng(seed)
    seq = random_circuit(rng, n, k)
    c = SpanningCircuit(seq, k)
    t = find_transversal(partition_pieces(c, k))
    chosen = [v for _, v in t.choice.values()]
    assert len(set(chosen)) == len(chosen)
    res = shortcut_tour(c, t, uniform_metric(n), circuit_graph(seq))
    assert sorted(res.tour) == list(range(n))
    assert res.tour[0] == 0
    assert res.max_gap <= 2 * k - 1
    assert all(1 <= h <= res.max_gap for h in res.hops)

import itertools
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from batsp.constructions import build_extreme_point, gen_random_metric
from batsp.exceptions import DisconnectedSupport, UnsupportedEdge
from batsp.heldkarp import find_tau_star
from batsp.thintree import (
    FractionalEdgeWeights,
    beta_formula,
    derive_z,
    find_certified_thin_tree,
    orient_tree,
    sample_tree,
    thinness,
)

from conftest import solution_from_matrix


def slow_thinness(tree, z):
    """Reference: every U containing vertex 0's complement, plain Python loops."""
    n = len(z)
    best = 0.0
    for r in range(1, n):
        for U in itertools.combinations(range(1, n), r):
            U = set(U)
            crossing = sum(1 for a, b in tree if (a in U) != (b in U))
            zc = sum(z[a][b] for a in U for b in range(n) if b not in U)
            if zc > 0:
                best = max(best, crossing / zc)
    return best


def cycle_z(n):
    z = np.zeros((n, n))
    for i in range(n):
        j = (i + 1) % n
        z[i, j] = z[j, i] = 1.0
    return FractionalEdgeWeights(z)


def extreme_point_solution(k):
    return solution_from_matrix(build_extreme_point(k).x_star)


def test_derive_z_cycle_and_half_arcs():
    n = 5
    x = np.zeros((n, n))
    for i in range(n):
        x[i, (i + 1) % n] = 1.0
    z = derive_z(solution_from_matrix(x))
    assert z.z[0, 1] == z.z[1, 0] == 1.0
    assert np.allclose(z.z.sum(axis=1), 2.0)
    x = np.array([[0, 0.5], [0.5, 0]])
    assert derive_z(solution_from_matrix(x)).z[0, 1] == 1.0


def test_derive_z_extreme_point_k4():
    cert = build_extreme_point(4)
    z = derive_z(solution_from_matrix(cert.x_star))
    assert z.z[cert.index("u1"), cert.index("w")] == pytest.approx(0.25)


def test_tree_support_returned_with_certainty():
    n = 6
    z = np.zeros((n, n))
    for i in range(1, n):
        z[0, i] = z[i, 0] = 0.4
    zz = FractionalEdgeWeights(z)
    for seed in range(5):
        assert sample_tree(zz, seed) == [(0, i) for i in range(1, n)]


def test_four_cycle_uniform_tree_frequencies():
    z = cycle_z(4)
    counts = Counter(tuple(sample_tree(z, seed)) for seed in range(10_000))
    assert len(counts) == 4
    for c in counts.values():
        assert abs(c / 10_000 - 0.25) <= 0.03


def test_weighted_sampling_follows_weights():
    # Triangle with weights 2, 1, 1: tree probability proportional to product of weights.
    z = np.zeros((3, 3))
    for (a, b), w in {(0, 1): 2.0, (1, 2): 1.0, (0, 2): 1.0}.items():
        z[a, b] = z[b, a] = w
    counts = Counter(tuple(sample_tree(FractionalEdgeWeights(z), s)) for s in range(8000))
    assert abs(counts[((0, 1), (1, 2))] / 8000 - 0.4) < 0.03
    assert abs(counts[((0, 2), (1, 2))] / 8000 - 0.2) < 0.03


def test_sampled_trees_stay_in_extreme_point_support():
    sol = extreme_point_solution(2)
    z = derive_z(sol)
    support = set(z.support)
    assert len(support) == 15
    for seed in range(200):
        tree = sample_tree(z, seed)
        assert len(tree) == 8 and set(tree) <= support


def test_sample_tree_disconnected():
    z = np.zeros((4, 4))
    z[0, 1] = z[1, 0] = z[2, 3] = z[3, 2] = 2.0
    with pytest.raises(DisconnectedSupport):
        sample_tree(FractionalEdgeWeights(z), 0)


def test_sampling_reproducible():
    z = derive_z(find_tau_star(gen_random_metric(9, 4))[1])
    assert sample_tree(z, 17) == sample_tree(z, 17)


def test_path_in_four_cycle():
    z = cycle_z(4)
    res = thinness([(0, 1), (1, 2), (2, 3)], z)
    assert res.beta == pytest.approx(1.0)
    assert res.certified and res.cuts_checked == 7


@pytest.mark.parametrize("n", [4, 6, 9])
def test_star_in_uniform_complete_graph(n):
    z = np.full((n, n), 2.0 / (n - 1))
    np.fill_diagonal(z, 0)
    res = thinness([(0, i) for i in range(1, n)], FractionalEdgeWeights(z))
    assert res.beta == pytest.approx((n - 1) / 2)
    # Cuts are reported with vertex 0 outside, so the center's cut shows up as its complement.
    assert res.witness == set(range(1, n))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(4, 9))
def test_thinness_matches_reference_and_lower_bound(seed, n):
    sol = find_tau_star(gen_random_metric(n, seed))[1]
    z = derive_z(sol)
    tree = sample_tree(z, seed)
    res = thinness(tree, z)
    assert res.beta == pytest.approx(slow_thinness(tree, z.z.tolist()), abs=1e-12)
    assert res.beta >= (n - 1) / (z.z.sum() / 2) - 1e-12
    crossing = sum(1 for a, b in tree if (a in res.witness) != (b in res.witness))
    assert crossing / z.cut(res.witness) == pytest.approx(res.beta, abs=1e-12)
    sampled = thinness(tree, z, "sampled", rng_seed=seed)
    assert not sampled.certified and sampled.beta <= res.beta + 1e-12


@pytest.mark.parametrize("n", [5, 8, 10])
def test_spanning_path_of_cycle_within_two(n):
    z = cycle_z(n)
    res = find_certified_thin_tree(z, beta_target=2.0, attempts=8)
    assert res.certified and res.success and res.beta <= 2.0


def test_formula_target_always_met_at_n10():
    assert beta_formula(10) == pytest.approx(11.04, abs=0.01)
    for seed in range(5):
        z = derive_z(find_tau_star(gen_random_metric(10, seed))[1])
        assert find_certified_thin_tree(z, beta_formula(10), attempts=4, rng_seed=seed).success


def test_single_attempt_reports_that_tree():
    z = derive_z(find_tau_star(gen_random_metric(8, 2))[1])
    res = find_certified_thin_tree(z, attempts=1, rng_seed=3)
    seed = np.random.SeedSequence(3).spawn(1)[0]
    tree = sample_tree(z, seed)
    assert res.edges == tree
    assert res.beta == thinness(tree, z).beta


def test_more_attempts_never_worse():
    z = derive_z(find_tau_star(gen_random_metric(9, 8))[1])
    few = find_certified_thin_tree(z, attempts=4, rng_seed=1)
    many = find_certified_thin_tree(z, attempts=32, rng_seed=1)
    assert many.beta <= few.beta


def test_orientation_rules():
    x = np.zeros((3, 3))
    x[0, 1] = 1.0
    x[1, 2], x[2, 1] = 0.3, 0.7
    x[2, 0] = 0.5
    sol = solution_from_matrix(x)
    assert orient_tree([(0, 1), (1, 2)], sol) == [(0, 1), (2, 1)]
    x2 = np.zeros((3, 3))
    x2[1, 2] = x2[2, 1] = 0.5
    assert orient_tree([(1, 2)], solution_from_matrix(x2)) == [(1, 2)]
    with pytest.raises(UnsupportedEdge):
        orient_tree([(0, 2)], solution_from_matrix(x2))


def test_orientation_on_extreme_point_k4():
    cert = build_extreme_point(4)
    sol = solution_from_matrix(cert.x_star)
    v5, u0 = cert.index("v5"), cert.index("u0")
    assert cert.value("v5", "u0") == Fraction(1)
    assert orient_tree([(u0, v5)], sol) == [(v5, u0)]

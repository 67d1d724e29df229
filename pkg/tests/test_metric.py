import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blab.errors import DegenerateWindow, ValidationError
from blab.maps import bipyramid, octahedron, tetrahedron
from blab.metric import (
    BallGrowthProfile,
    FiniteMetricSpace,
    ball_growth,
    ball_growth_csr,
    diameter,
    dimension_estimate,
    edge_length,
    hop_diameter,
    hop_distances,
    hop_matrix,
    rescaled_diameter,
    rescaled_space,
    two_point_distance,
)
from blab.sampler import EnsembleSpec, enumerate_classes, mcmc_sample

from oracles import all_pairs_bfs_python, torus_ball_volumes, torus_csr


def adjacency_dict(t):
    adj = {v: [] for v in range(t.n)}
    for d in range(t.map.dart_count):
        adj[int(t.origin[d])].append(int(t.origin[t.twin[d]]))
    return adj


def test_edge_length_close_to_quarter_power():
    for n in (4, 6, 1000, 65536):
        assert edge_length(n) == pytest.approx(n ** -0.25, abs=5e-13)


def test_tetrahedron_distances():
    t = tetrahedron()
    assert hop_distances(t, 0).tolist() == [0, 1, 1, 1]
    assert abs(diameter(rescaled_space(t)) - 2 ** -0.5) < 1e-12
    assert rescaled_diameter(t) == diameter(rescaled_space(t))


def test_octahedron_distances():
    t = octahedron()
    d = hop_distances(t, 0)
    assert sorted(d.tolist()) == [0, 1, 1, 1, 1, 2]
    assert hop_diameter(t) == 2


def test_hop_matrix_matches_python_bfs():
    t = next(mcmc_sample(EnsembleSpec(n=120, seed=4), 1))
    ref = all_pairs_bfs_python(adjacency_dict(t))
    D = hop_matrix(t)
    for s in range(t.n):
        assert [ref[s][v] for v in range(t.n)] == D[s].tolist()
    assert hop_diameter(t) == D.max()


@given(st.integers(0, 2**32))
@settings(max_examples=15, deadline=None)
def test_exact_diameter_matches_matrix(seed):
    t = next(mcmc_sample(EnsembleSpec(n=300, seed=seed, burn_in=3000), 1))
    assert hop_diameter(t) == hop_matrix(t).max()


def test_rescaled_spaces_are_metrics():
    for n in range(4, 9):
        for t in enumerate_classes(n).values():
            assert rescaled_space(t).validate()


def test_dense_limit():
    with pytest.raises(ValueError):
        rescaled_space(bipyramid(10), max_dense=8)


def test_validate_rejects():
    with pytest.raises(ValidationError):
        FiniteMetricSpace([[0, 1], [2, 0]]).validate()
    with pytest.raises(ValidationError):
        FiniteMetricSpace([[0, 1, 5], [1, 0, 1], [5, 1, 0]]).validate()
    with pytest.raises(ValidationError):
        FiniteMetricSpace([[0, 0], [0, 0]]).validate()
    with pytest.raises(ValidationError):
        FiniteMetricSpace([[0, 1, 2]])


def test_two_point_tetrahedron():
    rng = np.random.default_rng(0)
    assert {two_point_distance(tetrahedron(), rng) for _ in range(20)} == {edge_length(4)}


def test_two_point_octahedron_mean():
    # 12 pairs at distance 1 and 3 at distance 2
    rng = np.random.default_rng(1)
    t = octahedron()
    xs = np.array([two_point_distance(t, rng) for _ in range(10_000)])
    target = 1.2 * 6 ** -0.25
    assert abs(xs.mean() - target) < 3 * xs.std() / np.sqrt(len(xs))


def test_two_point_deterministic():
    t = bipyramid(12)
    a = two_point_distance(t, np.random.default_rng(5))
    b = two_point_distance(t, np.random.default_rng(5))
    assert a == b


def test_ball_growth_small():
    rng = np.random.default_rng(0)
    p = ball_growth(tetrahedron(), 4, rng)
    assert p.mean_volumes.tolist() == [1.0, 4.0]
    p = ball_growth(octahedron(), 6, rng)
    assert p.mean_volumes.tolist() == [1.0, 5.0, 6.0]


def test_ball_growth_reaches_n():
    t = next(mcmc_sample(EnsembleSpec(n=500, seed=2), 1))
    p = ball_growth(t, 50, np.random.default_rng(3))
    assert p.mean_volumes[0] == 1 and p.mean_volumes[-1] == t.n
    assert np.all(np.diff(p.mean_volumes) >= 0)


def test_ball_growth_on_torus_matches_exact_volumes():
    L, d = 12, 2
    indptr, indices = torus_csr(L, d)
    p = ball_growth_csr(indptr, indices, np.arange(L ** d), d * (L // 2))
    assert np.array_equal(p.mean_volumes, torus_ball_volumes(L, d, d * (L // 2)))


def test_dimension_of_square_law():
    r = np.arange(0, 40, dtype=float)
    p = BallGrowthProfile(r, r ** 2)
    assert abs(dimension_estimate(p) - 2.0) < 1e-9


@pytest.mark.parametrize("d,L", [(2, 32), (2, 64), (2, 128), (3, 64), (3, 128)])
def test_dimension_of_grid_torus(d, L):
    D = d * (L // 2)
    p = BallGrowthProfile(np.arange(D + 1.0), torus_ball_volumes(L, d, D).astype(float))
    assert abs(dimension_estimate(p) - d) < 0.2


def test_dimension_small_3d_torus_bias():
    # lower-order terms of the L1 ball volume pull the slope down at small L
    L, d = 32, 3
    D = d * (L // 2)
    p = BallGrowthProfile(np.arange(D + 1.0), torus_ball_volumes(L, d, D).astype(float))
    assert 2.6 < dimension_estimate(p) < 2.8


def test_degenerate_window():
    p = BallGrowthProfile(np.arange(5.0), np.array([1.0, 1, 4, 9, 16]))
    with pytest.raises(DegenerateWindow):
        dimension_estimate(p)
    assert dimension_estimate(p, window=(1, 4)) == pytest.approx(2.0)

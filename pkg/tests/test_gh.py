import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blab.errors import EmptySet, ResourceLimit
from blab.gh import (
    distortion,
    embedding_from_correspondence,
    gh_distance_exact,
    gh_lower_bounds,
    hausdorff_distance,
)
from blab.maps import octahedron, tetrahedron
from blab.metric import FiniteMetricSpace, diameter, rescaled_space

from oracles import gh_brute_force


def random_space(rng, k):
    pts = rng.normal(size=(k, 2))
    return FiniteMetricSpace(np.linalg.norm(pts[:, None] - pts[None], axis=-1))


spaces = st.builds(lambda seed, k: random_space(np.random.default_rng(seed), k),
                   st.integers(0, 2**32), st.integers(1, 4))


def gh(X, Y):
    return gh_distance_exact(X, Y).value


def test_hausdorff_basic():
    amb = np.array([[0, 1, 3], [1, 0, 2], [3, 2, 0]], dtype=float)
    assert hausdorff_distance([0], [0], amb) == 0
    assert hausdorff_distance([0], [1, 2], amb) == 3
    assert hausdorff_distance([0, 1], [1], amb) == 1
    with pytest.raises(EmptySet):
        hausdorff_distance([], [1], amb)


def test_point_vs_space():
    X = rescaled_space(octahedron())
    P = FiniteMetricSpace([[0.0]])
    assert gh(P, X) == diameter(X) / 2
    assert gh(X, P) == diameter(X) / 2


@pytest.mark.parametrize("a,b", [(1.0, 3.0), (0.5, 0.5), (2.0, 0.25)])
def test_two_point_spaces(a, b):
    X = FiniteMetricSpace([[0, a], [a, 0]])
    Y = FiniteMetricSpace([[0, b], [b, 0]])
    assert gh(X, Y) == abs(a - b) / 2


def test_isometric_copies():
    X = rescaled_space(octahedron())
    assert gh(X, X.permuted([3, 1, 5, 0, 2, 4])) == 0


def test_tetrahedron_vs_octahedron():
    X = rescaled_space(tetrahedron())
    Y = rescaled_space(octahedron())
    r = gh_distance_exact(X, Y)
    assert r.witness.covers(4, 6)
    assert r.value == distortion(X, Y, r.witness.relation) / 2
    assert gh_lower_bounds(X, Y) <= r.value


@given(spaces, spaces)
@settings(max_examples=60, deadline=None)
def test_matches_brute_force(X, Y):
    if X.size * Y.size > 9:
        return
    assert abs(gh(X, Y) - gh_brute_force(X.d.tolist(), Y.d.tolist())) < 1e-12


@given(spaces, spaces, spaces)
@settings(max_examples=60, deadline=None)
def test_pseudometric_axioms(X, Y, Z):
    xy, yz, xz = gh(X, Y), gh(Y, Z), gh(X, Z)
    assert gh(X, X) == 0
    assert abs(xy - gh(Y, X)) <= 1e-12
    assert xz <= xy + yz + 1e-12


@given(spaces, spaces)
@settings(max_examples=60, deadline=None)
def test_lower_bound_and_diameter_lipschitz(X, Y):
    v = gh(X, Y)
    assert gh_lower_bounds(X, Y) <= v + 1e-12
    assert abs(diameter(X) - diameter(Y)) <= 2 * v + 1e-12


@given(spaces, spaces)
@settings(max_examples=40, deadline=None)
def test_embedding_realises_bound(X, Y):
    r = gh_distance_exact(X, Y)
    K, ix, iy = embedding_from_correspondence(X, Y, r.witness.relation)
    assert np.allclose(K[np.ix_(ix, ix)], X.d) and np.allclose(K[np.ix_(iy, iy)], Y.d)
    assert np.allclose(K, K.T)
    n = len(K)
    for j in range(n):
        assert np.all(K <= K[:, j, None] + K[None, j, :] + 1e-12)
    assert hausdorff_distance(ix, iy, K) <= r.value + 1e-12


def test_budget():
    rng = np.random.default_rng(0)
    X, Y = random_space(rng, 9), random_space(rng, 9)
    with pytest.raises(ResourceLimit):
        gh_distance_exact(X, Y, budget=50)

"""Hausdorff and Gromov-Hausdorff distances between finite metric spaces.

For subsets ``A, B`` of a metric space ``K`` the Hausdorff distance is the
least ``eps`` such that each set lies in the closed ``eps``-thickening of the
other.  The Gromov-Hausdorff distance of two compact spaces ``X, Y`` is the
infimum of ``d_H(i(X), j(Y))`` over isometric embeddings ``i: X -> K`` and
``j: Y -> K`` into a common compact space ``K``.

That infimum cannot be searched directly.  For finite spaces we use the
standard identity (Burago-Burago-Ivanov, Thm 7.3.25)

    d_GH(X, Y) = 1/2 * min over correspondences R of dis(R),
    dis(R) = max |d_X(x, x') - d_Y(y, y')|  over (x, y), (x', y') in R,

where a correspondence is a relation covering every point of both spaces.
:func:`embedding_from_correspondence` builds the explicit common space
behind the inequality ``d_GH <= dis(R)/2``, so the embedding side of the
definition can be checked numerically.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptySet, ResourceLimit
from .metric import FiniteMetricSpace, diameter, radius
from .sampler import default_budget


@dataclass(frozen=True)
class Correspondence:
    relation: frozenset

    def __post_init__(self):
        object.__setattr__(self, "relation", frozenset(self.relation))

    def covers(self, nx, ny):
        return ({i for i, _ in self.relation} == set(range(nx))
                and {j for _, j in self.relation} == set(range(ny)))


@dataclass(frozen=True)
class GhResult:
    value: float
    witness: Correspondence
    exact: bool = True


def _as_matrix(X):
    return X.d if isinstance(X, FiniteMetricSpace) else np.asarray(X, dtype=float)


def hausdorff_distance(A, B, ambient) -> float:
    """Hausdorff distance between index subsets ``A`` and ``B`` of ``ambient``."""
    A = list(A)
    B = list(B)
    if not A or not B:
        raise EmptySet("Hausdorff distance needs non-empty sets")
    d = _as_matrix(ambient)[np.ix_(A, B)]
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def distortion(X, Y, relation) -> float:
    dx = _as_matrix(X)
    dy = _as_matrix(Y)
    pairs = np.array(sorted(relation), dtype=np.int64).reshape(-1, 2)
    i, j = pairs[:, 0], pairs[:, 1]
    return float(np.abs(dx[np.ix_(i, i)] - dy[np.ix_(j, j)]).max())


def gh_distance_exact(X, Y, budget=None) -> GhResult:
    """Exact Gromov-Hausdorff distance by branch and bound.

    Distortion only grows when pairs are added to a relation, so the minimum
    is attained on relations of the form ``graph(f) + {(g(y), y)}`` where
    ``f: X -> Y`` is any map and ``g`` is only needed on points of ``Y`` that
    ``f`` misses.  The search assigns ``f`` point by point, then covers the
    missed points, pruning every branch whose partial distortion already
    reaches the best complete one.  ``budget`` caps visited nodes.
    """
    dx = _as_matrix(X)
    dy = _as_matrix(Y)
    nx, ny = len(dx), len(dy)
    if nx == 0 or ny == 0:
        raise EmptySet("both spaces must be non-empty")
    budget = default_budget() if budget is None else budget

    # the full relation is a valid correspondence, so it seeds the bound
    best = float(np.abs(dx[:, :, None, None] - dy[None, None, :, :]).max())
    best_rel = [(i, j) for i in range(nx) for j in range(ny)]
    nodes = 0
    rel: list[tuple[int, int]] = []

    def added_cost(i, j):
        c = 0.0
        for (a, b) in rel:
            v = abs(dx[i, a] - dy[j, b])
            if v > c:
                c = v
        return c

    def cover(missing, k, cur):
        nonlocal best, best_rel, nodes
        if k == len(missing):
            if cur < best:
                best, best_rel = cur, list(rel)
            return
        j = missing[k]
        for i in range(nx):
            nodes += 1
            if nodes > budget:
                raise ResourceLimit(f"GH search exceeded {budget} nodes")
            c = max(cur, added_cost(i, j))
            if c >= best:
                continue
            rel.append((i, j))
            cover(missing, k + 1, c)
            rel.pop()

    def assign(i, cur, hit):
        nonlocal nodes
        if i == nx:
            missing = [j for j in range(ny) if not hit[j]]
            cover(missing, 0, cur)
            return
        for j in range(ny):
            nodes += 1
            if nodes > budget:
                raise ResourceLimit(f"GH search exceeded {budget} nodes")
            c = max(cur, added_cost(i, j))
            if c >= best:
                continue
            rel.append((i, j))
            hit[j] += 1
            assign(i + 1, c, hit)
            hit[j] -= 1
            rel.pop()

    assign(0, 0.0, [0] * ny)
    return GhResult(value=float(best) / 2.0, witness=Correspondence(best_rel), exact=True)


def gh_lower_bounds(X, Y) -> float:
    """``max(|diam X - diam Y|, |rad X - rad Y|) / 2``, a lower bound on d_GH."""
    X = X if isinstance(X, FiniteMetricSpace) else FiniteMetricSpace(X)
    Y = Y if isinstance(Y, FiniteMetricSpace) else FiniteMetricSpace(Y)
    return 0.5 * max(abs(diameter(X) - diameter(Y)), abs(radius(X) - radius(Y)))


def embedding_from_correspondence(X, Y, relation):
    """Common metric on the disjoint union ``X + Y`` built from a correspondence.

    With ``r = dis(R)/2`` the cross distances are
    ``d(x, y) = min over (x', y') in R of d_X(x, x') + r + d_Y(y', y)``.
    Both spaces embed isometrically and their Hausdorff distance inside the
    union is at most ``r``.  Returns ``(ambient matrix, X indices, Y indices)``.
    When ``dis(R) = 0`` a tiny positive ``r`` would be needed to separate
    matched points; the returned ambient then is only a pseudometric.
    """
    dx = _as_matrix(X)
    dy = _as_matrix(Y)
    nx, ny = len(dx), len(dy)
    r = distortion(dx, dy, relation) / 2.0
    cross = np.full((nx, ny), np.inf)
    for (a, b) in relation:
        cross = np.minimum(cross, dx[:, a, None] + r + dy[None, b, :])
    K = np.zeros((nx + ny, nx + ny))
    K[:nx, :nx] = dx
    K[nx:, nx:] = dy
    K[:nx, nx:] = cross
    K[nx:, :nx] = cross.T
    return K, list(range(nx)), list(range(nx, nx + ny))

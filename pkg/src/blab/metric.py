"""Vertex metrics of triangulations.

A triangulation with ``n`` vertices becomes a finite metric space by giving
every edge length ``n**-0.25`` and measuring shortest edge paths.  Only the
vertex set is a point of the space; nothing is interpolated across faces.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DegenerateWindow, ValidationError
from .maps import Triangulation

MAX_DENSE = 4096


_QUANTUM_BITS = 40


def edge_length(n):
    """``n**-0.25`` rounded to a multiple of ``2**-40``.

    Hop counts below ``2**13`` then scale exactly, so an integer metric stays
    a metric after rescaling (plain ``n**-0.25`` breaks the triangle
    inequality by one ulp).  The rounding error is below ``5e-13``.
    """
    return math.ldexp(round(math.ldexp(float(n) ** -0.25, _QUANTUM_BITS)), -_QUANTUM_BITS)


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    d: np.ndarray
    labels: tuple | None = None

    def __post_init__(self):
        d = np.array(self.d, dtype=np.float64)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValidationError("distance matrix must be square")
        d.setflags(write=False)
        object.__setattr__(self, "d", d)
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != len(d):
                raise ValidationError("one label per point required")
            object.__setattr__(self, "labels", labels)

    @property
    def size(self):
        return self.d.shape[0]

    def __len__(self):
        return self.size

    def scaled(self, c):
        return FiniteMetricSpace(c * self.d, self.labels)

    def permuted(self, perm):
        perm = np.asarray(perm)
        labels = None if self.labels is None else tuple(self.labels[i] for i in perm)
        return FiniteMetricSpace(self.d[np.ix_(perm, perm)], labels)

    def validate(self, triples=None, rng=None, atol=0.0):
        """Check the metric axioms; raise :class:`ValidationError` on failure.

        The triangle inequality is checked on every triple when ``triples`` is
        None, otherwise on that many random triples drawn from ``rng``.
        """
        d = self.d
        n = self.size
        if np.any(np.diag(d) != 0):
            raise ValidationError("non-zero diagonal")
        if not np.array_equal(d, d.T):
            raise ValidationError("asymmetric distances")
        off = d[~np.eye(n, dtype=bool)]
        if np.any(off <= 0) or not np.all(np.isfinite(off)):
            raise ValidationError("distinct points at non-positive distance")
        if triples is None:
            for j in range(n):
                # d(i,k) <= d(i,j) + d(j,k) for all i, k at once
                if np.any(d > d[:, j, None] + d[None, j, :] + atol):
                    raise ValidationError(f"triangle inequality fails through {j}")
        else:
            rng = np.random.default_rng() if rng is None else rng
            i, j, k = rng.integers(0, n, size=(3, triples))
            if np.any(d[i, k] > d[i, j] + d[j, k] + atol):
                raise ValidationError("triangle inequality fails on a sampled triple")
        return True


@dataclass(frozen=True)
class BallGrowthProfile:
    """Mean closed-ball volume at each radius."""

    radii: np.ndarray
    mean_volumes: np.ndarray
    centers: int = 0

    def rows(self):
        return list(zip(self.radii.tolist(), self.mean_volumes.tolist()))


def hop_distances(t: Triangulation, source: int) -> np.ndarray:
    indptr, indices = t.adjacency
    dist = np.empty(t.n, np.int64)
    queue = np.empty(t.n, np.int64)
    _kernels.bfs(indptr, indices, int(source), dist, queue)
    return dist


def hop_matrix(t: Triangulation) -> np.ndarray:
    indptr, indices = t.adjacency
    return _kernels.all_pairs(indptr, indices)


def hop_diameter(t: Triangulation) -> int:
    indptr, indices = t.adjacency
    return int(_kernels.exact_diameter(indptr, indices)[0])


def rescaled_space(t: Triangulation, max_dense=MAX_DENSE) -> FiniteMetricSpace:
    """Vertices of ``t`` with edge length ``n**-0.25``.

    Builds the full matrix, so ``n`` is capped at ``max_dense``; above that
    use :func:`hop_distances` / :func:`rescaled_diameter` on demand.
    """
    if t.n > max_dense:
        raise ValueError(
            f"n={t.n} exceeds the dense limit {max_dense}; use on-demand BFS")
    return FiniteMetricSpace(hop_matrix(t) * edge_length(t.n))


def rescaled_diameter(t: Triangulation) -> float:
    return hop_diameter(t) * edge_length(t.n)


def diameter(X: FiniteMetricSpace) -> float:
    if X.size == 0:
        return 0.0
    return float(X.d.max())


def radius(X: FiniteMetricSpace) -> float:
    """Smallest eccentricity."""
    if X.size == 0:
        return 0.0
    return float(X.d.max(axis=1).min())


def two_point_distance(t: Triangulation, rng: np.random.Generator) -> float:
    """Rescaled distance between two independent uniform distinct vertices."""
    if t.n < 2:
        raise ValueError("need at least two vertices")
    u = int(rng.integers(t.n))
    v = u
    while v == u:
        v = int(rng.integers(t.n))
    return float(hop_distances(t, u)[v]) * edge_length(t.n)


def ball_growth_csr(indptr, indices, centers, rmax):
    centers = np.asarray(centers, dtype=np.int64)
    total = _kernels.ball_counts(indptr, indices, centers, int(rmax))
    return BallGrowthProfile(
        radii=np.arange(rmax + 1, dtype=np.float64),
        mean_volumes=total / len(centers),
        centers=len(centers),
    )


def ball_growth(t: Triangulation, centers: int, rng: np.random.Generator,
                rmax: int | None = None) -> BallGrowthProfile:
    """Mean ``|B(v, r)|`` over random centers ``v`` for ``r = 0..rmax``.

    ``rmax`` defaults to the hop diameter.  Centers are drawn without
    replacement when ``centers <= n``.
    """
    indptr, indices = t.adjacency
    if rmax is None:
        rmax = hop_diameter(t)
    replace = centers > t.n
    cs = rng.choice(t.n, size=centers, replace=replace)
    return ball_growth_csr(indptr, indices, cs, rmax)


def default_window(profile: BallGrowthProfile):
    return 2.0, profile.radii[-1] / 2.0


def dimension_estimate(profile: BallGrowthProfile, window=None) -> float:
    """Slope of ``log(mean volume)`` against ``log(radius)`` over ``window``.

    ``window = (lo, hi)`` keeps radii with ``lo <= r <= hi``; it defaults to
    ``[2, max radius / 2]``.
    """
    lo, hi = default_window(profile) if window is None else window
    r = np.asarray(profile.radii, dtype=np.float64)
    v = np.asarray(profile.mean_volumes, dtype=np.float64)
    keep = (r >= lo) & (r <= hi) & (r > 0)
    if keep.sum() < 3:
        raise DegenerateWindow(
            f"window [{lo}, {hi}] holds {int(keep.sum())} radii, need >= 3")
    slope, _ = np.polyfit(np.log(r[keep]), np.log(v[keep]), 1)
    return float(slope)

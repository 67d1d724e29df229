"""Gaussian free field and Liouville area measure on the unit sphere.

Field
-----
Let ``psi_{l,m}`` be the real spherical harmonics, orthonormal in L^2 of the
round sphere, with ``-Lap psi_{l,m} = l(l+1) psi_{l,m}``.  Green's identity
gives ``int grad psi . grad psi' = l(l+1) delta``, so the functions

    phi_{l,m} = sqrt(2 pi / (l(l+1))) * psi_{l,m}

satisfy ``(1/2pi) int grad phi_i . grad phi_j = delta_ij``.  The constant
``l = 0`` mode has eigenvalue zero and is left out.  The field truncated at
degree ``L`` is

    G(x) = sum_{l=1..L} sum_{m=-l..l} g_{l,m} phi_{l,m}(x),   g iid N(0, 1).

By the addition theorem ``sum_m psi_{l,m}(x)^2 = (2l+1)/(4pi)``, hence

    Var G(x)   = sum_{l<=L} (2l+1) / (2 l (l+1)),
    Cov(x, y)  = sum_{l<=L} (2l+1) / (2 l (l+1)) * P_l(cos angle(x, y)).

The variance grows like ``log L``: the limit is a distribution, not a
function.

Real harmonics are indexed ``(l, m)`` with ``m = -l..l``:
``psi_{l,0} = P_l^0``, ``psi_{l,m} = sqrt2 P_l^m cos(m phi)`` and
``psi_{l,-m} = sqrt2 P_l^m sin(m phi)`` for ``m > 0``, where ``P_l^m`` is the
fully normalised associated Legendre function without Condon-Shortley phase.
``theta`` is colatitude, ``phi`` longitude.

Measure
-------
``exp(gamma G)`` is given meaning by Wick renormalisation on each truncation:
a cell ``c`` with centre ``x_c`` and area ``a_c`` gets mass

    m_c = exp(gamma G(x_c) - gamma^2 Var G(x_c) / 2) * a_c,

so ``E m_c = a_c`` exactly.  ``gamma = sqrt(8/3)`` is the coupling tied to
the Brownian map; other couplings give random metrics whose dimension grows
with ``gamma``.  Only the area measure is built here, not the metric.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.special import eval_legendre

from .seeding import derive_seed, make_rng

GAMMA_BROWNIAN = math.sqrt(8.0 / 3.0)


def _legendre(l_max, x):
    """Fully normalised ``P_l^m(x)`` as an array ``[l, m, point]``."""
    x = np.asarray(x, dtype=np.float64)
    s = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    P = np.zeros((l_max + 1, l_max + 1) + x.shape)
    P[0, 0] = 1.0 / math.sqrt(4.0 * math.pi)
    for m in range(1, l_max + 1):
        P[m, m] = math.sqrt((2 * m + 1) / (2.0 * m)) * s * P[m - 1, m - 1]
    for m in range(0, l_max):
        P[m + 1, m] = math.sqrt(2 * m + 3) * x * P[m, m]
    for m in range(0, l_max + 1):
        for l in range(m + 2, l_max + 1):
            a = math.sqrt((4.0 * l * l - 1) / (l * l - m * m))
            b = math.sqrt(((l - 1) ** 2 - m * m) / (4.0 * (l - 1) ** 2 - 1))
            P[l, m] = a * (x * P[l - 1, m] - b * P[l - 2, m])
    return P


@dataclass(frozen=True, eq=False)
class HarmonicBasis:
    """Real spherical harmonics of degree ``1..l_max``."""

    l_max: int

    def __post_init__(self):
        if self.l_max < 1:
            raise ValueError("l_max must be >= 1")

    @cached_property
    def degrees(self):
        return np.array([l for l in range(1, self.l_max + 1) for _ in range(2 * l + 1)])

    @cached_property
    def orders(self):
        return np.array([m for l in range(1, self.l_max + 1) for m in range(-l, l + 1)])

    @property
    def size(self):
        return len(self.degrees)

    @cached_property
    def eigenvalues(self):
        l = self.degrees
        return (l * (l + 1)).astype(np.float64)

    @cached_property
    def scale(self):
        """``sqrt(2 pi / lambda_l)``: L^2-normalised to Dirichlet-normalised."""
        return np.sqrt(2.0 * math.pi / self.eigenvalues)

    def evaluate(self, theta, phi):
        """``psi`` values, shape ``(points, size)``."""
        theta = np.atleast_1d(np.asarray(theta, dtype=np.float64))
        phi = np.atleast_1d(np.asarray(phi, dtype=np.float64))
        P = _legendre(self.l_max, np.cos(theta))
        out = np.empty((theta.size, self.size))
        for k, (l, m) in enumerate(zip(self.degrees, self.orders)):
            if m == 0:
                out[:, k] = P[l, 0]
            elif m > 0:
                out[:, k] = math.sqrt(2.0) * P[l, m] * np.cos(m * phi)
            else:
                out[:, k] = math.sqrt(2.0) * P[l, -m] * np.sin(-m * phi)
        return out

    def gradient(self, theta, phi):
        """Components of ``grad psi`` along ``e_theta`` and ``e_phi``.

        Returns two arrays of shape ``(points, size)``.  Requires
        ``0 < theta < pi``.
        """
        theta = np.atleast_1d(np.asarray(theta, dtype=np.float64))
        phi = np.atleast_1d(np.asarray(phi, dtype=np.float64))
        x = np.cos(theta)
        s = np.sin(theta)
        P = _legendre(self.l_max, x)
        gt = np.empty((theta.size, self.size))
        gp = np.empty((theta.size, self.size))
        for k, (l, m) in enumerate(zip(self.degrees, self.orders)):
            am = abs(m)
            c = math.sqrt((2 * l + 1) / (2 * l - 1) * (l * l - am * am))
            dP = (l * x * P[l, am] - c * P[l - 1, am]) / s
            if m == 0:
                gt[:, k] = dP
                gp[:, k] = 0.0
            elif m > 0:
                gt[:, k] = math.sqrt(2.0) * dP * np.cos(m * phi)
                gp[:, k] = -math.sqrt(2.0) * m * P[l, m] / s * np.sin(m * phi)
            else:
                gt[:, k] = math.sqrt(2.0) * dP * np.sin(am * phi)
                gp[:, k] = math.sqrt(2.0) * am * P[l, am] / s * np.cos(am * phi)
        return gt, gp

    def evaluate_normalized(self, theta, phi):
        """Dirichlet-normalised ``phi_{l,m}`` values."""
        return self.evaluate(theta, phi) * self.scale


def build_basis(l_max):
    return HarmonicBasis(int(l_max))


def sphere_quadrature(n_theta=128, n_phi=256):
    """Gauss-Legendre in ``cos theta`` times the uniform rule in ``phi``.

    Returns flattened ``theta, phi, weights``; the weights sum to ``4 pi``.
    """
    x, w = np.polynomial.legendre.leggauss(n_theta)
    theta = np.arccos(x)
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    T, Ph = np.meshgrid(theta, phi, indexing="ij")
    W = np.outer(w, np.full(n_phi, 2.0 * math.pi / n_phi))
    return T.ravel(), Ph.ravel(), W.ravel()


# -------------------------------------------------------------------- field


def pointwise_variance(l_max):
    l = np.arange(1, int(l_max) + 1, dtype=np.float64)
    return float(np.sum((2 * l + 1) / (2 * l * (l + 1))))


@dataclass(frozen=True, eq=False)
class GffSample:
    basis: HarmonicBasis
    coefficients: np.ndarray
    seed: int

    @property
    def l_max(self):
        return self.basis.l_max

    def __call__(self, theta, phi):
        return self.basis.evaluate(theta, phi) @ (self.coefficients * self.basis.scale)


def sample_gff(basis: HarmonicBasis, seed: int) -> GffSample:
    rng = make_rng(seed, "gff")
    g = rng.standard_normal(basis.size)
    g.setflags(write=False)
    return GffSample(basis, g, int(seed))


def sample_gff_batch(basis: HarmonicBasis, master: int, count: int) -> np.ndarray:
    """Coefficient rows of ``sample_gff(basis, derive_seed(master, "replica", i))``."""
    out = np.empty((count, basis.size))
    for i in range(count):
        out[i] = sample_gff(basis, derive_seed(master, "replica", i)).coefficients
    return out


def _unit(p):
    p = np.asarray(p, dtype=np.float64)
    if p.shape[-1] == 2:
        th, ph = p[..., 0], p[..., 1]
        return np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], -1)
    return p / np.linalg.norm(p, axis=-1, keepdims=True)


def gff_covariance(x, y, basis) -> float:
    """Truncated covariance ``E G(x) G(y)``.

    ``x`` and ``y`` are unit 3-vectors or ``(theta, phi)`` pairs; ``basis`` is
    a :class:`HarmonicBasis` or a truncation degree.
    """
    l_max = basis.l_max if isinstance(basis, HarmonicBasis) else int(basis)
    c = float(np.clip(np.dot(_unit(x), _unit(y)), -1.0, 1.0))
    l = np.arange(1, l_max + 1)
    return float(np.sum((2 * l + 1) / (2.0 * l * (l + 1)) * eval_legendre(l, c)))


def log_divergence_check(l_max) -> float:
    """``Var_{2L} - Var_L`` of the pointwise field; tends to ``log 2``."""
    return pointwise_variance(2 * l_max) - pointwise_variance(l_max)


# ------------------------------------------------------------------ measure


@dataclass(frozen=True, eq=False)
class SphereMesh:
    """Latitude-longitude cells, uniform in colatitude and longitude."""

    n_theta: int = 128
    n_phi: int = 256

    @cached_property
    def theta_edges(self):
        return np.linspace(0.0, math.pi, self.n_theta + 1)

    @cached_property
    def phi_edges(self):
        return np.linspace(0.0, 2.0 * math.pi, self.n_phi + 1)

    @cached_property
    def centers(self):
        """Flattened ``(theta, phi)`` midpoints; cell id ``i * n_phi + j``."""
        th = 0.5 * (self.theta_edges[:-1] + self.theta_edges[1:])
        ph = 0.5 * (self.phi_edges[:-1] + self.phi_edges[1:])
        T, P = np.meshgrid(th, ph, indexing="ij")
        return T.ravel(), P.ravel()

    @cached_property
    def areas(self):
        band = -np.diff(np.cos(self.theta_edges))
        return np.outer(band, np.diff(self.phi_edges)).ravel()

    def basis_matrix(self, basis):
        """Dirichlet-normalised basis at the cell centres, ``(cells, size)``."""
        return basis.evaluate_normalized(*self.centers)


def parse_mesh(text):
    a, b = str(text).lower().split("x")
    return SphereMesh(int(a), int(b))


@dataclass(frozen=True, eq=False)
class LqgMeasure:
    gamma: float
    mesh: SphereMesh
    masses: np.ndarray
    field_values: np.ndarray = field(repr=False)

    @property
    def areas(self):
        return self.mesh.areas

    @property
    def total_mass(self):
        return float(np.sum(self.masses))


def wick_weights(values, gamma, variance):
    return np.exp(gamma * values - 0.5 * gamma * gamma * variance)


def lqg_measure(sample: GffSample, gamma: float, mesh=None) -> LqgMeasure:
    """Wick-renormalised ``exp(gamma G)`` area of every mesh cell."""
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    mesh = SphereMesh() if mesh is None else mesh
    values = mesh.basis_matrix(sample.basis) @ sample.coefficients
    v = pointwise_variance(sample.l_max)
    masses = mesh.areas * wick_weights(values, gamma, v)
    masses.setflags(write=False)
    return LqgMeasure(float(gamma), mesh, masses, values)


def lqg_total_masses(basis, gamma, mesh, master, count, chunk=100):
    """Total masses of ``count`` replicas ``lqg_measure(sample_gff(..., seed_i))``.

    Shares the basis matrix across replicas; ``seed_i`` follows
    :func:`sample_gff_batch`.
    """
    B = mesh.basis_matrix(basis)
    a = mesh.areas
    v = pointwise_variance(basis.l_max)
    out = np.empty(count)
    coeffs = sample_gff_batch(basis, master, count)
    for s in range(0, count, chunk):
        vals = coeffs[s:s + chunk] @ B.T
        out[s:s + chunk] = (wick_weights(vals, gamma, v) * a).sum(axis=1)
    return out

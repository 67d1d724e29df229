import math

import numpy as np
import pytest
from scipy.special import sph_harm_y
from scipy.stats import special_ortho_group

from blab.gff import (
    GAMMA_BROWNIAN,
    SphereMesh,
    build_basis,
    gff_covariance,
    lqg_measure,
    lqg_total_masses,
    log_divergence_check,
    parse_mesh,
    pointwise_variance,
    sample_gff,
    sample_gff_batch,
    sphere_quadrature,
)


def test_gamma_brownian():
    assert GAMMA_BROWNIAN == math.sqrt(8 / 3)


def test_basis_layout():
    b = build_basis(3)
    assert b.size == 15
    assert b.degrees.tolist()[:3] == [1, 1, 1] and b.orders.tolist()[:3] == [-1, 0, 1]


@pytest.mark.parametrize("l_max", [1, 4, 10])
def test_matches_scipy_harmonics(l_max):
    rng = np.random.default_rng(l_max)
    th = rng.uniform(0.01, math.pi - 0.01, 50)
    ph = rng.uniform(0, 2 * math.pi, 50)
    b = build_basis(l_max)
    got = b.evaluate(th, ph)
    for k, (l, m) in enumerate(zip(b.degrees, b.orders)):
        Y = sph_harm_y(l, abs(m), th, ph)
        # scipy includes the Condon-Shortley phase
        sign = (-1) ** abs(m)
        if m == 0:
            ref = Y.real
        elif m > 0:
            ref = sign * math.sqrt(2) * Y.real
        else:
            ref = sign * math.sqrt(2) * Y.imag
        assert np.allclose(got[:, k], ref, atol=1e-12)


def test_orthonormal_l2():
    th, ph, w = sphere_quadrature(32, 64)
    P = build_basis(8).evaluate(th, ph)
    assert np.abs(P.T @ (P * w[:, None]) - np.eye(P.shape[1])).max() < 1e-12


def test_gradient_finite_differences():
    b = build_basis(6)
    rng = np.random.default_rng(0)
    th = rng.uniform(0.2, math.pi - 0.2, 20)
    ph = rng.uniform(0, 2 * math.pi, 20)
    gt, gp = b.gradient(th, ph)
    h = 1e-6
    dth = (b.evaluate(th + h, ph) - b.evaluate(th - h, ph)) / (2 * h)
    dph = (b.evaluate(th, ph + h) - b.evaluate(th, ph - h)) / (2 * h) / np.sin(th)[:, None]
    assert np.allclose(gt, dth, atol=1e-7) and np.allclose(gp, dph, atol=1e-7)


def test_dirichlet_gram_identity():
    b = build_basis(8)
    th, ph, w = sphere_quadrature(64, 128)
    gt, gp = b.gradient(th, ph)
    gt, gp = gt * b.scale, gp * b.scale
    G = (gt.T @ (gt * w[:, None]) + gp.T @ (gp * w[:, None])) / (2 * math.pi)
    assert np.abs(G - np.eye(b.size)).max() < 1e-6


@pytest.mark.parametrize("L,target", [(1, 0.75), (2, 7 / 6)])
def test_variance_closed_form(L, target):
    assert pointwise_variance(L) == pytest.approx(target, rel=1e-15)


def test_variance_equals_covariance_at_zero():
    x = (0.3, 1.1)
    assert gff_covariance(x, x, 12) == pytest.approx(pointwise_variance(12), rel=1e-13)


def test_covariance_matches_basis_sum():
    b = build_basis(7)
    x, y = (0.4, 2.0), (2.1, -0.3)
    fx = b.evaluate_normalized(*x)[0]
    fy = b.evaluate_normalized(*y)[0]
    assert gff_covariance(x, y, b) == pytest.approx(float(fx @ fy), abs=1e-12)


def test_covariance_rotation_invariant():
    rng = np.random.default_rng(3)
    x = rng.normal(size=3)
    y = rng.normal(size=3)
    R = special_ortho_group.rvs(3, random_state=4)
    assert gff_covariance(x, y, 10) == pytest.approx(gff_covariance(R @ x, R @ y, 10), abs=1e-12)


def test_log_divergence():
    assert abs(log_divergence_check(64) / math.log(2) - 1) < 0.02


def test_sample_deterministic():
    b = build_basis(5)
    a, c = sample_gff(b, 9), sample_gff(b, 9)
    assert np.array_equal(a.coefficients, c.coefficients)
    assert not np.array_equal(a.coefficients, sample_gff(b, 10).coefficients)
    assert np.array_equal(sample_gff_batch(b, 1, 3)[2], sample_gff_batch(b, 1, 5)[2])


def test_monte_carlo_variance_l2():
    b = build_basis(2)
    coeffs = sample_gff_batch(b, 7, 4000)
    vals = coeffs @ b.evaluate_normalized(1.0, 0.5)[0]
    x2 = vals ** 2
    assert abs(x2.mean() - 7 / 6) < 3 * x2.std() / math.sqrt(len(x2))


def test_mesh():
    m = parse_mesh("16x32")
    assert m.areas.sum() == pytest.approx(4 * math.pi, rel=1e-14)
    assert len(m.centers[0]) == 16 * 32
    with pytest.raises(ValueError):
        parse_mesh("16by32")


def test_gamma_zero_mass_is_area():
    m = lqg_measure(sample_gff(build_basis(4), 0), 0.0, SphereMesh(32, 64))
    assert np.array_equal(m.masses, m.areas)
    assert abs(m.total_mass - 4 * math.pi) < 1e-12


def test_total_masses_match_single_measure():
    b = build_basis(6)
    mesh = SphereMesh(16, 32)
    batch = lqg_total_masses(b, 1.0, mesh, master=4, count=3)
    from blab.seeding import derive_seed
    single = lqg_measure(sample_gff(b, derive_seed(4, "replica", 1)), 1.0, mesh).total_mass
    assert batch[1] == pytest.approx(single, rel=1e-12)


def test_negative_gamma():
    with pytest.raises(ValueError):
        lqg_measure(sample_gff(build_basis(2), 0), -1.0)

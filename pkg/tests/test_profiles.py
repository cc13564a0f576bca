from __future__ import annotations

import math

import numpy as np
import pytest

from henon4.errors import DomainError, PreconditionError, ThresholdError
from henon4.profiles import (
    BALL_VOLUME,
    OMEGA_3,
    BoundaryKind,
    FunctionalParams,
    RadialProfile,
    assert_boundary_conditions,
    corpus_names,
    corpus_profile,
    embedding_bound,
    exp_minus_taylor,
    laplacian_l2_sq,
    pointwise_log_bound_margin,
    poly_profile,
    power_profile,
    series_upper_bound,
    unit_energy,
    weighted_functional,
    weighted_lp_norm_p,
)


def zero_profile() -> RadialProfile:
    z = lambda r: np.zeros_like(np.asarray(r, dtype=float))
    return RadialProfile(z, z, z, BoundaryKind.DIRICHLET, "zero")


def test_omega3_matches_ball_volume():
    assert OMEGA_3 == pytest.approx(2.0 * math.pi**2, rel=1e-15)
    # integral_B 1 dx = OMEGA_3 / 4 = pi^2 / 2
    vol = weighted_functional(zero_profile(), FunctionalParams(0.0, 1.0, None))
    assert vol == pytest.approx(math.pi**2 / 2.0, rel=1e-12)
    assert BALL_VOLUME == pytest.approx(math.pi**2 / 2.0, rel=1e-15)


def test_laplacian_zero_profile():
    assert laplacian_l2_sq(zero_profile()) == pytest.approx(0.0, abs=1e-14)


def test_laplacian_poly2():
    # Delta(1-r^2) = -8, so the energy is 64 * vol(B) = 32 pi^2
    assert laplacian_l2_sq(poly_profile(1)) == pytest.approx(
        32.0 * math.pi**2, rel=1e-12
    )


def test_laplacian_poly4():
    # Delta(1-r^2)^2 = 24 r^2 - 16; omega_3 * int (24r^2-16)^2 r^3 dr = 8 omega_3
    assert laplacian_l2_sq(poly_profile(2)) == pytest.approx(
        16.0 * math.pi**2, rel=1e-12
    )


@pytest.mark.parametrize("c", [0.5, 2.0, 10.0])
@pytest.mark.parametrize("name", ["poly2", "poly4", "cos2", "ring:0.55:0.25"])
def test_laplacian_homogeneity(name, c):
    u = corpus_profile(name)
    base = laplacian_l2_sq(u)
    assert laplacian_l2_sq(u.scaled(c)) == pytest.approx(c * c * base, rel=1e-10)


def test_weighted_functional_zero_truncated():
    assert weighted_functional(zero_profile(), FunctionalParams(1.0, 7.0, 1)) == 0.0


def test_weighted_functional_oracle_poly4():
    # frozen from a 10^6-panel composite Simpson oracle (see below); the
    # integrand's center value is g(u(0)) = e^2 - 3
    u = poly_profile(2).scaled(1.0 / (4.0 * math.pi))
    sigma = 32.0 * math.pi**2
    got = weighted_functional(u, FunctionalParams(0.0, sigma, 1))
    assert got == pytest.approx(0.320533940644441, rel=1e-12)

    n = 200_000
    r = np.linspace(0.0, 1.0, n + 1)
    s = u.value(r)
    f = r**3 * exp_minus_taylor(sigma * s * s, 1)
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    oracle = OMEGA_3 / (3.0 * n) * float((f * w).sum())
    assert got == pytest.approx(oracle, rel=1e-11)
    assert math.exp(2.0) - 3.0 == pytest.approx(4.389056, abs=1e-6)


def test_lp_norm_examples():
    u = poly_profile(1)
    assert weighted_lp_norm_p(zero_profile(), 2.0, 0.0) == pytest.approx(0.0, abs=1e-14)
    assert weighted_lp_norm_p(u, 2.0, 0.0) == pytest.approx(math.pi**2 / 12.0, rel=1e-12)
    assert weighted_lp_norm_p(u, 2.0, 4.0) == pytest.approx(
        2.0 * math.pi**2 / 120.0, rel=1e-12
    )


def test_embedding_bound_examples():
    assert embedding_bound(2.0, 0.0, 1.0) == pytest.approx(1.0 / 64.0, rel=1e-14)
    # p = 2k with k = 1 reduces to the same closed form
    k = 1
    eps = 4.0 / 4.0
    general = math.factorial(k) * eps ** (1 + k) / 4 ** (1 + 2 * k) * OMEGA_3 ** (1 - k)
    assert general == pytest.approx(1.0 / 64.0, rel=1e-14)
    assert embedding_bound(5.0, 3.0, 0.0) == 0.0


@pytest.mark.parametrize("pexp", [2.0, 4.0, 6.0])
@pytest.mark.parametrize("alpha", [0.0, 1.0, 4.0, 16.0])
@pytest.mark.parametrize("name", ["poly2", "poly4", "cos2", "moser:1e-4:navier"])
def test_embedding_inequality_spot(name, pexp, alpha):
    u = corpus_profile(name)
    lap = math.sqrt(laplacian_l2_sq(u))
    lhs = weighted_lp_norm_p(u, pexp, alpha)
    assert lhs <= embedding_bound(pexp, alpha, lap) * (1.0 + 1e-8)


def test_series_upper_bound_examples():
    p = FunctionalParams(0.0, 0.5 * 32.0 * math.pi**2, None)
    assert series_upper_bound(p, 1.0) == pytest.approx(math.pi**2, rel=1e-14)
    # sigma -> 0+: only the k = 0 term survives, the measure of B ... bound
    # tends to OMEGA_3 / 4
    tiny = FunctionalParams(0.0, 1e-12, None)
    assert series_upper_bound(tiny, 1.0) == pytest.approx(OMEGA_3 / 4.0, rel=1e-10)
    # m = 0 bound equals the full bound minus the k = 0 term
    for alpha in (0.0, 3.0, 16.0):
        p_full = FunctionalParams(alpha, 0.37 * FunctionalParams(alpha, 1.0).sigma_alpha(), None)
        p_m0 = FunctionalParams(p_full.alpha, p_full.sigma, 0)
        lhs = series_upper_bound(p_m0, 1.0)
        rhs = series_upper_bound(p_full, 1.0) - OMEGA_3 / (4.0 + alpha)
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_series_upper_bound_threshold_error():
    p = FunctionalParams(2.0, FunctionalParams(2.0, 1.0).sigma_alpha(), None)
    with pytest.raises(ThresholdError):
        series_upper_bound(p, 1.0)
    with pytest.raises(PreconditionError):
        series_upper_bound(FunctionalParams(0.0, 1.0, None), 1.5)


def test_sigma_alpha_identity():
    for alpha in (0.0, 1.0, 4.0, 16.0, 512.0):
        p = FunctionalParams(alpha, 1.0, None)
        assert p.sigma_alpha() == pytest.approx(
            (4.0 + alpha) * 4.0 * OMEGA_3, rel=1e-14
        )


def test_pointwise_margin_zero_profile():
    assert pointwise_log_bound_margin(zero_profile()) == 0.0


def test_pointwise_margin_poly2():
    u = poly_profile(1)
    m = pointwise_log_bound_margin(u)
    assert m <= 1.0 + 1e-9
    # ratio at r = 1/e: |u| = 1 - e^{-2} against bound sqrt(1)*||Delta u||/(2 sqrt(omega3))
    lap = math.sqrt(32.0 * math.pi**2)
    ratio = (1.0 - math.e**-2) * 2.0 * math.sqrt(OMEGA_3) / lap
    assert ratio == pytest.approx(0.432, abs=5e-4)


def test_pointwise_margin_moser():
    u = unit_energy(corpus_profile("moser:1e-4:navier"))
    assert pointwise_log_bound_margin(u) <= 1.0 + 1e-9


def test_exp_minus_taylor_consistency():
    # against direct subtraction where cancellation is mild
    for z in (0.6, 1.0, 3.0):
        for m in (0, 1, 2):
            direct = math.exp(z) - sum(z**k / math.factorial(k) for k in range(m + 1))
            got = float(exp_minus_taylor(np.array([z]), m)[0])
            assert got == pytest.approx(direct, rel=1e-13)
    # successive truncations differ by the dropped Taylor term
    z = np.array([0.01, 0.3, 0.49])
    for m in (0, 1, 2):
        diff = exp_minus_taylor(z, m) - exp_minus_taylor(z, m + 1)
        term = z ** (m + 1) / math.factorial(m + 1)
        assert np.allclose(diff, term, rtol=1e-12)
    # m absent reduces to exp
    assert float(exp_minus_taylor(np.array([0.25]), None)[0]) == pytest.approx(
        math.exp(0.25), rel=1e-15
    )


def test_truncation_monotone_in_m():
    sigma = 0.9 * 32.0 * math.pi**2
    for name in ("poly2", "cos2", "moser:1e-4:navier"):
        u = unit_energy(corpus_profile(name))
        vals = [
            weighted_functional(u, FunctionalParams(0.0, sigma, m))
            for m in (None, 0, 1, 2)
        ]
        assert vals[0] >= vals[1] >= vals[2] >= vals[3] > 0.0


def test_corpus_complete_and_boundary_clean():
    names = corpus_names()
    assert len(names) >= 10
    for name in names:
        u = corpus_profile(name)
        assert_boundary_conditions(u, tol=1e-12)


def test_corpus_derivative_consistency():
    # d1 and d2 must be consistent with value by central differences on
    # interior points (closed-form contract)
    h = 1e-5
    for name in corpus_names():
        u = corpus_profile(name)
        for r in (0.15, 0.35, 0.55, 0.75, 0.95):
            if any(abs(r - b) < 20 * h for b in u.breakpoints):
                continue
            fd1 = (u.value(np.array([r + h]))[0] - u.value(np.array([r - h]))[0]) / (2 * h)
            fd2 = (u.d1(np.array([r + h]))[0] - u.d1(np.array([r - h]))[0]) / (2 * h)
            d1 = float(u.d1(np.array([r]))[0])
            d2 = float(u.d2(np.array([r]))[0])
            scale1 = max(abs(d1), 1e-3)
            scale2 = max(abs(d2), 1e-3)
            assert abs(fd1 - d1) / scale1 < 1e-6
            assert abs(fd2 - d2) / scale2 < 1e-6


def test_unit_energy_normalizes():
    u = unit_energy(corpus_profile("ring:0.55:0.25"))
    assert laplacian_l2_sq(u) == pytest.approx(1.0, rel=1e-10)
    with pytest.raises(DomainError):
        unit_energy(zero_profile())


def test_functional_params_validation():
    with pytest.raises(DomainError):
        FunctionalParams(-1.0, 1.0, None)
    with pytest.raises(DomainError):
        FunctionalParams(0.0, 0.0, None)
    with pytest.raises(DomainError):
        FunctionalParams(0.0, 1.0, -2)


def test_power_profile_rejects_bad_exponent():
    with pytest.raises(DomainError):
        power_profile(0.0)

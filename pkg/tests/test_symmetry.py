from __future__ import annotations

import math

import numpy as np
import pytest

from henon4.errors import DomainError, PreconditionError
from henon4.moser import MoserParams, moser_navier
from henon4.profiles import (
    OMEGA_3,
    BoundaryKind,
    FunctionalParams,
    laplacian_l2_sq,
    weighted_functional,
)
from henon4.quadrature import DEFAULT_SPEC, integrate
from henon4.symmetry import (
    CROSSOVER_KAPPA,
    BumpSpec,
    SearchOptions,
    bump_profile,
    crossover_detect,
    fit_loglog_slope,
    radial_max_search,
    translated_bump_paper_bound,
    translated_bump_value,
)

SIGMA = 32.0 * math.pi**2


def test_bump_normalized_and_admissible():
    for kind in ("poly4", "cos2"):
        u = bump_profile(BumpSpec(kind))
        assert laplacian_l2_sq(u) == pytest.approx(1.0, rel=1e-10)
        r = np.linspace(1e-4, 1.0 - 1e-6, 200)
        assert np.all(u.value(r) > 0.0)
        assert abs(float(u.value(np.array([1.0]))[0])) < 1e-12
        assert abs(float(u.d1(np.array([1.0]))[0])) < 1e-12


def test_translated_bump_scale_invariance():
    # energy of the translated rescaled bump, computed about its own center,
    # equals the bump energy exactly (4D scale invariance); alpha = 8 spot check
    u = bump_profile(BumpSpec("poly4"))
    alpha = 8.0

    def integrand(rho):
        rr = np.asarray(rho, dtype=float)
        s = alpha * rr
        lap = alpha**2 * (u.d2(s) + 3.0 * u.d1(s) / np.maximum(s, 1e-150))
        return lap**2 * rr**3

    val = OMEGA_3 * integrate(integrand, 0.0, 1.0 / alpha, DEFAULT_SPEC).value
    assert val == pytest.approx(1.0, rel=1e-8)


def test_polar_reduction_measure():
    # 4 pi int_0^1 int_0^pi s^3 sin^2(th) dth ds = vol(B) = pi^2/2
    xs, ws = np.polynomial.legendre.leggauss(64)
    s = 0.5 * (xs + 1.0)
    th = 0.5 * math.pi * (xs + 1.0)
    val = (
        4.0
        * math.pi
        * float((0.5 * ws * s**3).sum())
        * float((0.5 * math.pi * ws * np.sin(th) ** 2).sum())
    )
    assert val == pytest.approx(math.pi**2 / 2.0, rel=1e-12)


def test_prefactor_64():
    # (1 - 2/64)^64 = exp(64 log(31/32)) = 0.131084..., i.e. e^-2 (1 + o(1))
    val = (1.0 - 2.0 / 64.0) ** 64
    assert val == pytest.approx(math.exp(64.0 * math.log(31.0 / 32.0)), rel=1e-12)
    assert val == pytest.approx(0.131084, abs=1e-6)
    assert val == pytest.approx(math.exp(-2.0), rel=0.04)


def test_bump_bound_is_minorant():
    p = FunctionalParams(0.0, SIGMA, 1)
    for alpha in (16.0, 64.0, 256.0):
        bound = translated_bump_paper_bound(alpha, p)
        value = translated_bump_value(alpha, p)
        assert 0.0 < bound <= value


def test_bump_bound_limit_matches_g_integral():
    # alpha^4 * bound -> e^-2 * integral_B g(u); frozen oracle value for the
    # unit-energy quartic bump at sigma = 32 pi^2, m = 1 (composite Simpson)
    i0 = 0.320533940644441
    p = FunctionalParams(0.0, SIGMA, 1)
    errs = []
    for alpha in (64.0, 256.0, 1024.0):
        bound = translated_bump_paper_bound(alpha, p)
        errs.append(abs(alpha**4 * bound - math.exp(-2.0) * i0))
    assert errs[0] > errs[1] > errs[2]
    # convergence rate is 2/alpha: (1-2/a)^a = e^-2 (1 - 2/a + O(a^-2))
    assert errs[2] < 3.0 / 1024.0 * math.exp(-2.0) * i0


def test_bump_truncation_ordering():
    for alpha in (16.0, 128.0):
        b0 = translated_bump_paper_bound(alpha, FunctionalParams(0.0, SIGMA, 0))
        b1 = translated_bump_paper_bound(alpha, FunctionalParams(0.0, SIGMA, 1))
        b2 = translated_bump_paper_bound(alpha, FunctionalParams(0.0, SIGMA, 2))
        assert b2 < b1 < b0
        v1 = translated_bump_value(alpha, FunctionalParams(0.0, SIGMA, 1))
        v2 = translated_bump_value(alpha, FunctionalParams(0.0, SIGMA, 2))
        assert v2 < v1


def test_bump_small_sigma_limit():
    val = translated_bump_value(16.0, FunctionalParams(0.0, 1e-8, 1))
    assert 0.0 <= val < 1e-18


def test_bump_preconditions():
    with pytest.raises(PreconditionError):
        translated_bump_value(2.0, FunctionalParams(0.0, SIGMA, 1))
    with pytest.raises(PreconditionError):
        translated_bump_value(16.0, FunctionalParams(0.0, SIGMA, None))
    with pytest.raises(PreconditionError):
        translated_bump_value(16.0, FunctionalParams(0.0, 2.0 * SIGMA, 1))


def test_radial_search_beats_fixed_moser_candidate():
    p = FunctionalParams(0.0, SIGMA, 1)
    u = moser_navier(MoserParams(1e-4, BoundaryKind.NAVIER))
    v = u.scaled(1.0 / math.sqrt(laplacian_l2_sq(u)))
    candidate = weighted_functional(v, p)
    val, prof = radial_max_search(0.0, p, SearchOptions(seed=3))
    assert math.isfinite(val)
    assert val >= candidate * (1.0 - 1e-9)


def test_radial_search_profile_certified():
    p = FunctionalParams(0.0, SIGMA, 1)
    val, prof = radial_max_search(32.0, p, SearchOptions(seed=5))
    assert laplacian_l2_sq(prof) == pytest.approx(1.0, rel=1e-8)
    got = weighted_functional(prof, FunctionalParams(32.0, SIGMA, 1))
    assert got == pytest.approx(val, rel=1e-7)


def test_radial_search_deterministic():
    p = FunctionalParams(0.0, SIGMA, 1)
    v1, _ = radial_max_search(64.0, p, SearchOptions(seed=11))
    v2, _ = radial_max_search(64.0, p, SearchOptions(seed=11))
    assert v1 == v2


def test_radial_search_m_ordering():
    opts = SearchOptions(seed=7)
    v1, _ = radial_max_search(64.0, FunctionalParams(0.0, SIGMA, 1), opts)
    v2, _ = radial_max_search(64.0, FunctionalParams(0.0, SIGMA, 2), opts)
    assert v2 <= v1


def test_radial_search_validation():
    with pytest.raises(PreconditionError):
        radial_max_search(16.0, FunctionalParams(0.0, SIGMA, None))
    with pytest.raises(PreconditionError):
        radial_max_search(16.0, FunctionalParams(0.0, SIGMA, 0))
    with pytest.raises(PreconditionError):
        radial_max_search(16.0, FunctionalParams(0.0, 2.0 * SIGMA, 1))


def test_fit_loglog_slope_exact_power():
    alphas = [16.0, 32.0, 64.0, 128.0]
    values = [7.0 * a**-4.5 for a in alphas]
    slope, resid = fit_loglog_slope(alphas, values)
    assert slope == pytest.approx(-4.5, abs=1e-12)
    assert resid < 1e-12


def test_crossover_detect_validation():
    p = FunctionalParams(0.0, SIGMA, 1)
    with pytest.raises(DomainError):
        crossover_detect(p, [16.0, 32.0, 64.0])  # too short
    with pytest.raises(DomainError):
        crossover_detect(p, [16.0, 16.0, 32.0, 64.0])
    with pytest.raises(DomainError):
        crossover_detect(FunctionalParams(0.0, SIGMA, None), [16.0, 32.0, 64.0, 128.0])


def test_crossover_report_shape_small_grid():
    p = FunctionalParams(0.0, SIGMA, 1)
    rep = crossover_detect(p, [16.0, 32.0, 64.0, 128.0], opts=SearchOptions(seed=2))
    d = rep.to_json_dict()
    assert set(d) == {"sigma", "m", "rows", "fitted_slopes", "alpha_star"}
    assert len(d["rows"]) == 4
    assert set(d["rows"][0]) == {
        "alpha",
        "bump_exact",
        "bump_paper_bound",
        "radial_max",
        "radial_profile_id",
    }
    header, rows = rep.csv_rows()
    assert len(rows) == 4 and len(header) == 5
    # minorant chain on every row
    for r in rep.rows:
        assert 0.0 < r.bump_paper_bound <= r.bump_exact
    # rows sorted by alpha
    assert [r.alpha for r in rep.rows] == [16.0, 32.0, 64.0, 128.0]

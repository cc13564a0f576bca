from __future__ import annotations

import math

import numpy as np
import pytest

from henon4.errors import DomainError
from henon4.moser import (
    MoserParams,
    blowup_scan,
    moser_dirichlet,
    moser_navier,
    navier_norm_sq_exact,
)
from henon4.profiles import (
    OMEGA_3,
    BoundaryKind,
    FunctionalParams,
    laplacian_l2_sq,
    series_upper_bound,
)


def test_params_validation():
    with pytest.raises(DomainError):
        MoserParams(0.5, BoundaryKind.NAVIER)  # above e^-2
    with pytest.raises(DomainError):
        MoserParams(0.0, BoundaryKind.NAVIER)
    # eta >= 1/2 at eps = 1e-2 rules out the Dirichlet member
    with pytest.raises(DomainError):
        MoserParams(1e-2, BoundaryKind.DIRICHLET)
    MoserParams(1e-4, BoundaryKind.DIRICHLET)  # eta ~ 0.45 < 1/2


def test_navier_matching_point_exact():
    # eps = e^-4: both pieces give 1/(2 sqrt(omega3)) at the seam r = 1/e
    eps = math.exp(-4.0)
    u = moser_navier(MoserParams(eps, BoundaryKind.NAVIER))
    seam = eps**0.25
    assert seam == pytest.approx(math.exp(-1.0), rel=1e-15)
    expected = 1.0 / (2.0 * math.sqrt(OMEGA_3))
    inner = float(u.value(np.array([seam * (1 - 1e-12)]))[0])
    outer = float(u.value(np.array([seam * (1 + 1e-12)]))[0])
    assert inner == pytest.approx(expected, rel=1e-9)
    assert outer == pytest.approx(expected, rel=1e-9)


def test_navier_derivative_matches_at_seam():
    eps = math.exp(-4.0)
    u = moser_navier(MoserParams(eps, BoundaryKind.NAVIER))
    seam = eps**0.25
    L = 4.0
    expected = -(eps**-0.25) / math.sqrt(OMEGA_3 * L)
    left = float(u.d1(np.array([seam * (1 - 1e-12)]))[0])
    right = float(u.d1(np.array([seam * (1 + 1e-12)]))[0])
    assert left == pytest.approx(expected, rel=1e-9)
    assert right == pytest.approx(expected, rel=1e-9)


def test_navier_c0_c1_matching_generic_eps():
    for eps in (1e-3, 1e-6, 1e-9):
        u = moser_navier(MoserParams(eps, BoundaryKind.NAVIER))
        seam = eps**0.25
        lo = np.array([seam * (1 - 1e-11)])
        hi = np.array([seam * (1 + 1e-11)])
        assert float(u.value(lo)[0]) == pytest.approx(float(u.value(hi)[0]), rel=1e-10)
        assert float(u.d1(lo)[0]) == pytest.approx(float(u.d1(hi)[0]), rel=1e-10)


def test_navier_vanishes_at_boundary():
    u = moser_navier(MoserParams(1e-4, BoundaryKind.NAVIER))
    assert float(u.value(np.array([1.0]))[0]) == 0.0


def test_navier_norm_formula():
    assert navier_norm_sq_exact(math.exp(-4.0)) == pytest.approx(2.0, rel=1e-14)
    assert navier_norm_sq_exact(math.exp(-100.0)) == pytest.approx(1.04, rel=1e-14)
    assert navier_norm_sq_exact(1e-300) == pytest.approx(1.0, abs=6e-3)


@pytest.mark.parametrize("eps", [1e-2, 1e-4, 1e-6, 1e-8])
def test_navier_norm_quadrature_matches_closed_form(eps):
    u = moser_navier(MoserParams(eps, BoundaryKind.NAVIER))
    exact = navier_norm_sq_exact(eps)
    assert abs(laplacian_l2_sq(u) - exact) <= 1e-6 * exact


def test_dirichlet_seam_value_and_boundary():
    eps = 1e-6
    mp = MoserParams(eps, BoundaryKind.DIRICHLET)
    u = moser_dirichlet(mp)
    L = -math.log(eps)
    eta = mp.eta()
    a = -math.log1p(-eta)
    seam = 1.0 - eta
    expected = a / math.sqrt(OMEGA_3 * L)
    lo = float(u.value(np.array([seam * (1 - 1e-12)]))[0])
    hi = float(u.value(np.array([seam * (1 + 1e-12)]))[0])
    assert lo == pytest.approx(expected, rel=1e-9)
    assert hi == pytest.approx(expected, rel=1e-9)
    # C1 across the cap seam
    dlo = float(u.d1(np.array([seam * (1 - 1e-12)]))[0])
    dhi = float(u.d1(np.array([seam * (1 + 1e-12)]))[0])
    assert dlo == pytest.approx(dhi, rel=1e-9)
    # double root at r = 1
    assert float(u.value(np.array([1.0]))[0]) == 0.0
    assert float(u.d1(np.array([1.0]))[0]) == 0.0


def test_dirichlet_equals_navier_inside():
    eps = 1e-6
    ud = moser_dirichlet(MoserParams(eps, BoundaryKind.DIRICHLET))
    un = moser_navier(MoserParams(eps, BoundaryKind.NAVIER))
    eta = 1.0 / math.log(-math.log(eps))
    r = np.linspace(1e-6, (1.0 - eta) * (1 - 1e-12), 500)
    assert np.allclose(ud.value(r), un.value(r), rtol=0, atol=0)
    assert np.allclose(ud.d1(r), un.d1(r), rtol=0, atol=0)
    assert np.allclose(ud.d2(r), un.d2(r), rtol=0, atol=0)


@pytest.mark.parametrize("eps", [1e-6, 1e-12, 1e-24])
def test_dirichlet_norm_deviation_bracket(eps):
    u = moser_dirichlet(MoserParams(eps, BoundaryKind.DIRICHLET))
    L = -math.log(eps)
    bracket = (laplacian_l2_sq(u) - 1.0) * L / math.log(L)
    assert 0.1 <= bracket <= 50.0


def test_blowup_scan_validation():
    with pytest.raises(DomainError):
        blowup_scan(0.0, 1.2, [])
    with pytest.raises(DomainError):
        blowup_scan(0.0, 1.2, [1e-2, 1e-2])
    with pytest.raises(DomainError):
        blowup_scan(0.0, 0.0, [1e-2, 1e-3])


def test_blowup_diverging_navier():
    eps = [10.0 ** (-k) for k in range(2, 11)]
    ex = blowup_scan(0.0, 1.2, eps)
    assert ex.verdict == "Diverging"
    # strictly increasing after the first entry
    assert all(b > a for a, b in zip(ex.values[1:], ex.values[2:]))
    # log-values dominate the predicted blow-up exponent
    assert all(
        lv >= lb - 1.0 for lv, lb in zip(ex.log_values, ex.lower_bound_exponents)
    )


def test_blowup_bounded_navier():
    eps = [10.0 ** (-k) for k in range(2, 11)]
    ex = blowup_scan(0.0, 0.8, eps)
    assert ex.verdict == "Bounded"
    bound = series_upper_bound(
        FunctionalParams(0.0, 0.8 * FunctionalParams(0.0, 1.0).sigma_alpha(), None), 1.0
    )
    assert all(v <= bound + 1e-8 for v in ex.values)


def test_blowup_dirichlet_verdicts():
    div = blowup_scan(
        0.0,
        1.2,
        [10.0 ** (-k) for k in range(46, 64, 2)],
        bc=BoundaryKind.DIRICHLET,
    )
    assert div.verdict == "Diverging"
    # monotone divergence after the first entry
    assert all(b > a for a, b in zip(div.values[1:], div.values[2:]))
    bnd = blowup_scan(
        0.0,
        0.8,
        [10.0 ** (-k) for k in range(6, 15)],
        bc=BoundaryKind.DIRICHLET,
    )
    assert bnd.verdict == "Bounded"


def test_csv_rows_shape():
    ex = blowup_scan(0.0, 0.8, [1e-2, 1e-3, 1e-4])
    header, rows = ex.csv_rows()
    assert header == ("epsilon", "norm_sq", "value", "log_value", "lower_bound_exponent")
    assert len(rows) == 3 and len(rows[0]) == 5


def test_seam_diagnostics_table():
    from henon4.moser import seam_diagnostics

    diag = seam_diagnostics(1e-6)
    by_name = {row[0]: row for row in diag.rows}
    # uncorrected plateau constant is exactly twice the outer branch
    _, unc, matched, ref = by_name["navier inner value at r=eps^(1/4)"]
    assert unc == pytest.approx(2.0 * ref, rel=1e-12)
    assert matched == pytest.approx(ref, rel=1e-12)
    # seam derivative identical in both variants
    _, d_unc, d_matched, d_ref = by_name["navier derivative at r=eps^(1/4)"]
    assert d_unc == d_matched == d_ref
    # uncorrected cap coefficient lands at -3x the outer branch
    _, c_unc, c_matched, c_ref = by_name["dirichlet cap value at r=1-eta"]
    assert c_unc == pytest.approx(-3.0 * c_ref, rel=1e-12)
    assert c_matched == pytest.approx(c_ref, rel=1e-12)
    # the matched formulas are exactly what the constructed profiles evaluate
    u = moser_navier(MoserParams(1e-6, BoundaryKind.NAVIER))
    seam = 1e-6**0.25
    inner_matched = by_name["navier inner value at r=eps^(1/4)"][2]
    assert float(u.value(np.array([seam]))[0]) == pytest.approx(inner_matched, rel=1e-12)

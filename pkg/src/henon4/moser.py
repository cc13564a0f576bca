"""Concentrating extremal sequences and threshold-sharpness scans.

The Navier-boundary member u_eps rises logarithmically from the boundary and
plateaus on the ball r <= eps^{1/4}; writing L = |log eps|,

    u_eps(r) = [ L/4 + (sqrt(eps) - r^2) / (2 sqrt(eps)) ] / sqrt(OMEGA_3 L)
                                                for r <= eps^{1/4},
    u_eps(r) = -log(r) / sqrt(OMEGA_3 L)        for eps^{1/4} < r <= 1.

The inner constant L/4 (rather than L/2) is forced by C^0/C^1 matching at
r = eps^{1/4}; both pieces then share the derivative -eps^{-1/4}/sqrt(OMEGA_3 L)
at the seam, and the energy comes out exactly

    ||Delta u_eps||_2^2 = 1 + 4/L.

The Dirichlet member u_{eps,0} equals u_eps up to r = 1 - eta, with
eta = 1 / log L, and is capped by the unique C^1 cubic in s = |log r| that
vanishes to second order at r = 1: with a = |log(1 - eta)|,

    u_{eps,0}(r) = (2 a s^2 - s^3) / (a^2 sqrt(OMEGA_3 L)),  1 - eta < r <= 1.

(The leading coefficient must carry |log(1-eta)|, not log(1-eta), for the cap
to match the positive outer branch; the derivative formulas below follow from
that reading.)  Its energy is 1 + O(log L / L).

`blowup_scan` normalizes a member onto the unit energy sphere, evaluates the
weighted functional at sigma = beta * sigma_alpha for each eps, and classifies
the scan.  The asymptotic growth of a diverging scan is
exp((alpha+4)/4 * (beta-1) * |log eps|), i.e. a factor
exp((alpha+4)(beta-1) ln(10)/4) per decade of eps -- at alpha = 0, beta = 1.2
that is only ~1.585, so the divergence gate requires >= 15% growth per decade
(well above the < 10%-over-three-decades flatness of a bounded scan) rather
than a factor of 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError
from .profiles import (
    OMEGA_3,
    BoundaryKind,
    FunctionalParams,
    RadialProfile,
    laplacian_l2_sq,
    weighted_functional,
)
from .quadrature import DEFAULT_SPEC, QuadratureSpec

__all__ = [
    "MoserParams",
    "ThresholdExperiment",
    "moser_navier",
    "navier_norm_sq_exact",
    "moser_dirichlet",
    "blowup_scan",
    "seam_diagnostics",
    "SeamDiagnostics",
    "DIVERGING_GROWTH_PER_DECADE",
    "BOUNDED_VARIATION",
]

# Declared verdict thresholds for finite scans.
DIVERGING_GROWTH_PER_DECADE = 1.15
BOUNDED_VARIATION = 0.10

_EPS_MAX = math.exp(-2.0)


@dataclass(frozen=True)
class MoserParams:
    epsilon: float
    bc: BoundaryKind

    def __post_init__(self) -> None:
        if not 0.0 < self.epsilon < _EPS_MAX:
            raise DomainError(f"epsilon must lie in (0, e^-2), got {self.epsilon!r}")
        if self.bc is BoundaryKind.DIRICHLET and self.eta() >= 0.5:
            raise DomainError(
                "Dirichlet member needs 1/log|log eps| < 1/2 "
                f"(epsilon = {self.epsilon!r} too large)"
            )

    def log_eps(self) -> float:
        return -math.log(self.epsilon)

    def eta(self) -> float:
        return 1.0 / math.log(self.log_eps())


def moser_navier(mp: MoserParams) -> RadialProfile:
    """The Navier-boundary concentrating profile for the given epsilon."""
    if mp.bc is not BoundaryKind.NAVIER:
        raise DomainError("moser_navier requires bc = NAVIER")
    eps = mp.epsilon
    L = mp.log_eps()
    seam = eps**0.25
    sqrt_eps = math.sqrt(eps)
    c = 1.0 / math.sqrt(OMEGA_3 * L)

    def value(r):
        rr = np.asarray(r, dtype=float)
        inner = c * (L / 4.0 + (sqrt_eps - rr**2) / (2.0 * sqrt_eps))
        outer = c * (-np.log(np.maximum(rr, 1e-150)))
        return np.where(rr <= seam, inner, outer)

    def d1(r):
        rr = np.asarray(r, dtype=float)
        inner = -c * rr / sqrt_eps
        outer = -c / np.maximum(rr, 1e-150)
        return np.where(rr <= seam, inner, outer)

    def d2(r):
        rr = np.asarray(r, dtype=float)
        inner = np.full_like(rr, -c / sqrt_eps)
        outer = c / np.maximum(rr, 1e-150) ** 2
        return np.where(rr <= seam, inner, outer)

    return RadialProfile(
        value,
        d1,
        d2,
        BoundaryKind.NAVIER,
        f"moser:{eps:g}:navier",
        breakpoints=(seam,),
    )


def navier_norm_sq_exact(epsilon: float) -> float:
    """Closed form of ||Delta u_eps||_2^2 = 1 + 4/|log eps|."""
    if not 0.0 < epsilon < _EPS_MAX:
        raise DomainError("epsilon out of range")
    return 1.0 + 4.0 / (-math.log(epsilon))


def moser_dirichlet(mp: MoserParams) -> RadialProfile:
    """The Dirichlet-boundary member: u_eps capped by a C^1 cubic near r = 1."""
    if mp.bc is not BoundaryKind.DIRICHLET:
        raise DomainError("moser_dirichlet requires bc = DIRICHLET")
    eps = mp.epsilon
    L = mp.log_eps()
    eta = mp.eta()
    seam_in = eps**0.25
    seam_out = 1.0 - eta
    if seam_in >= seam_out:
        raise DomainError("epsilon too large: plateau and boundary cap overlap")
    a = -math.log1p(-eta)  # |log(1 - eta)|
    c = 1.0 / math.sqrt(OMEGA_3 * L)
    sqrt_eps = math.sqrt(eps)

    def value(r):
        rr = np.asarray(r, dtype=float)
        s = -np.log(np.maximum(rr, 1e-150))
        inner = c * (L / 4.0 + (sqrt_eps - rr**2) / (2.0 * sqrt_eps))
        outer = c * s
        cap = c * (2.0 * a * s**2 - s**3) / a**2
        return np.where(rr <= seam_in, inner, np.where(rr <= seam_out, outer, cap))

    def d1(r):
        rr = np.asarray(r, dtype=float)
        rsafe = np.maximum(rr, 1e-150)
        s = -np.log(rsafe)
        inner = -c * rr / sqrt_eps
        outer = -c / rsafe
        cap = c * (3.0 * s**2 - 4.0 * a * s) / (rsafe * a**2)
        return np.where(rr <= seam_in, inner, np.where(rr <= seam_out, outer, cap))

    def d2(r):
        rr = np.asarray(r, dtype=float)
        rsafe = np.maximum(rr, 1e-150)
        s = -np.log(rsafe)
        inner = np.full_like(rr, -c / sqrt_eps)
        outer = c / rsafe**2
        cap = c * (4.0 * a - 6.0 * s + 4.0 * a * s - 3.0 * s**2) / (rsafe**2 * a**2)
        return np.where(rr <= seam_in, inner, np.where(rr <= seam_out, outer, cap))

    return RadialProfile(
        value,
        d1,
        d2,
        BoundaryKind.DIRICHLET,
        f"moser:{eps:g}:dirichlet",
        breakpoints=(seam_in, seam_out),
    )


@dataclass(frozen=True)
class SeamDiagnostics:
    """Audit table for the matched piecewise formulas.

    Both sequences are often displayed with an inner plateau constant
    sqrt(L)/2 and a boundary-cap coefficient carrying the signed logarithm;
    those variants fail to match the outer branch at the seams.  The table
    records the uncorrected and matched evaluations against the outer-branch
    reference so the replacement is auditable rather than silent.
    """

    epsilon: float
    rows: tuple  # (quantity, uncorrected, matched, outer_reference)

    def csv_rows(self):
        return ("quantity", "uncorrected", "matched", "outer_reference"), self.rows


def seam_diagnostics(epsilon: float) -> SeamDiagnostics:
    """Evaluate uncorrected vs matched seam formulas for the given epsilon.

    The uncorrected inner plateau constant is exactly twice the outer branch
    at r = eps^{1/4}; the uncorrected boundary cap evaluates to -3x the outer
    branch at r = 1 - eta.  Seam derivatives and the closed-form energy
    1 + 4/L are identical for both variants.
    """
    if not 0.0 < epsilon < _EPS_MAX:
        raise DomainError("epsilon out of range")
    L = -math.log(epsilon)
    c = 1.0 / math.sqrt(OMEGA_3 * L)
    outer_at_seam = c * L / 4.0
    rows = [
        (
            "navier inner value at r=eps^(1/4)",
            math.sqrt(L / 4.0) / math.sqrt(OMEGA_3),  # uncorrected: sqrt(L)/2 scale
            outer_at_seam,  # matched: L/4 over sqrt(L)
            outer_at_seam,
        ),
        (
            "navier derivative at r=eps^(1/4)",
            -(epsilon**-0.25) * c,
            -(epsilon**-0.25) * c,
            -(epsilon**-0.25) * c,
        ),
    ]
    if math.log(L) > 2.0:  # Dirichlet member defined for this epsilon
        eta = 1.0 / math.log(L)
        a = -math.log1p(-eta)
        outer_at_cap = c * a
        rows.append(
            (
                "dirichlet cap value at r=1-eta",
                c * (2.0 * (-a) * a * a - a**3) / a**2,  # signed-log coefficient
                c * (2.0 * a * a * a - a**3) / a**2,  # matched coefficient
                outer_at_cap,
            )
        )
    return SeamDiagnostics(epsilon=epsilon, rows=tuple(rows))


@dataclass(frozen=True)
class ThresholdExperiment:
    alpha: float
    beta: float
    bc: BoundaryKind
    m: Optional[int]
    epsilons: tuple
    norm_sqs: tuple
    values: tuple
    log_values: tuple
    lower_bound_exponents: tuple
    verdict: str  # "Diverging" | "Bounded" | "Inconclusive"

    def csv_rows(self):
        header = ("epsilon", "norm_sq", "value", "log_value", "lower_bound_exponent")
        rows = list(
            zip(
                self.epsilons,
                self.norm_sqs,
                self.values,
                self.log_values,
                self.lower_bound_exponents,
            )
        )
        return header, rows


def _classify(epsilons: Sequence[float], values: Sequence[float]) -> str:
    n = len(values)
    decades = [math.log10(epsilons[k - 1] / epsilons[k]) for k in range(1, n)]
    # Divergence gate: strict growth at >= 15% per decade on every step beyond
    # the third scan entry.
    tail_pairs = [k for k in range(3, n)]
    if tail_pairs:
        diverging = True
        for k in tail_pairs:
            if values[k] <= values[k - 1]:
                diverging = False
                break
            g = (values[k] / values[k - 1]) ** (1.0 / decades[k - 1])
            if g < DIVERGING_GROWTH_PER_DECADE:
                diverging = False
                break
        if diverging:
            return "Diverging"
    # Flatness gate: < 10% spread over the final three decades of eps.
    eps_min = epsilons[-1]
    window = [values[k] for k in range(n) if epsilons[k] <= eps_min * 1e3]
    if len(window) >= 2 and max(window) < (1.0 + BOUNDED_VARIATION) * min(window):
        return "Bounded"
    return "Inconclusive"


def blowup_scan(
    alpha: float,
    beta: float,
    epsilons: Sequence[float],
    m: Optional[int] = None,
    spec: QuadratureSpec = DEFAULT_SPEC,
    bc: BoundaryKind = BoundaryKind.NAVIER,
) -> ThresholdExperiment:
    """Evaluate F (or F_m) at sigma = beta * sigma_alpha along an eps scan.

    Each member is normalized onto the unit energy sphere by its quadrature
    energy before evaluation.  The lower_bound_exponent column records
    (alpha+4)/4 * ((beta-1) |log eps| - 4), the predicted log-scale floor of
    a diverging scan.
    """
    if not beta > 0.0:
        raise DomainError("beta must be > 0")
    eps_list = [float(e) for e in epsilons]
    if not eps_list:
        raise DomainError("epsilons must be non-empty")
    if any(e2 >= e1 for e1, e2 in zip(eps_list, eps_list[1:])):
        raise DomainError("epsilons must be strictly decreasing")

    sigma_alpha = 32.0 * math.pi**2 * (1.0 + alpha / 4.0)
    params = FunctionalParams(alpha, beta * sigma_alpha, m)

    norm_sqs = []
    values = []
    log_values = []
    lbes = []
    for eps in eps_list:
        mp = MoserParams(eps, bc)
        u = moser_navier(mp) if bc is BoundaryKind.NAVIER else moser_dirichlet(mp)
        norm_sq = laplacian_l2_sq(u, spec)
        v = u.scaled(1.0 / math.sqrt(norm_sq))
        val = weighted_functional(v, params, spec)
        L = -math.log(eps)
        norm_sqs.append(norm_sq)
        values.append(val)
        log_values.append(math.log(val))
        lbes.append((alpha + 4.0) / 4.0 * ((beta - 1.0) * L - 4.0))

    verdict = _classify(eps_list, values)
    return ThresholdExperiment(
        alpha=alpha,
        beta=beta,
        bc=bc,
        m=m,
        epsilons=tuple(eps_list),
        norm_sqs=tuple(norm_sqs),
        values=tuple(values),
        log_values=tuple(log_values),
        lower_bound_exponents=tuple(lbes),
        verdict=verdict,
    )

"""Radial-versus-nonradial scaling experiments for the truncated functionals.

Nonradial side: a fixed unit-energy bump u supported in the ball, translated
to x_a = (1 - 1/alpha, 0, 0, 0) and rescaled to radius 1/alpha.  The 4D
bi-Laplacian energy is scale invariant, so the translate stays on the unit
energy sphere, and

    F_m(u_alpha) = alpha^-4 * integral_B |x_a + y/alpha|^alpha g(u(|y|)) dy,

which reduces by polar decomposition about the symmetry axis to

    alpha^-4 * 4 pi * int_0^1 int_0^pi g(u(s)) R(s,th)^alpha s^3 sin^2 th dth ds,
    R(s,th)^2 = xbar^2 + 2 xbar (s/alpha) cos th + (s/alpha)^2.

This is a rigorous lower bound for the unconstrained supremum and scales like
alpha^-4.  The elementary minorant (1 - 2/alpha)^alpha * alpha^-4 * int g(u),
obtained by bounding the weight below on the support ball, is also computed
(the bump_paper_bound column).

Radial side: a certified lower estimate of the radial supremum by multistart
coordinate ascent over parametric families (boundary-adapted power profiles,
their squares, concentrating extremal members, off-origin ring bumps), each
candidate scalar-projected onto the unit energy sphere.  Values decay like
alpha^-5 (boundary-power class), consistent with the alpha^{-9/2} upper
bound for the radial supremum.

Crossover: the smallest grid alpha where the translated-bump value strictly
exceeds kappa = 1.05 times the radial search value; the margin column is the
log-ratio log(bump / (kappa * radial)), increasing past the crossover.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, Henon4Error, OptFailure, PreconditionError
from .moser import MoserParams, moser_navier
from .profiles import (
    OMEGA_3,
    BoundaryKind,
    FunctionalParams,
    RadialProfile,
    cos2_profile,
    exp_minus_taylor,
    laplacian_l2_sq,
    poly_profile,
    power_profile,
    power_sq_profile,
    ring_profile,
    weighted_functional,
)
from .quadrature import DEFAULT_SPEC, QuadratureSpec, integrate

__all__ = [
    "BumpSpec",
    "SearchOptions",
    "SweepRow",
    "SweepReport",
    "bump_profile",
    "translated_bump_value",
    "translated_bump_paper_bound",
    "radial_max_search",
    "crossover_detect",
    "CROSSOVER_KAPPA",
    "fit_loglog_slope",
]

CROSSOVER_KAPPA = 1.05  # safety factor on the radial estimate
SIGMA_CAP = 32.0 * math.pi**2


def _relative_spec(spec: QuadratureSpec) -> QuadratureSpec:
    """Sweep values decay like alpha^-4..alpha^-7, far below any fixed
    absolute tolerance; sweep quadratures must be driven by rel_tol alone."""
    return QuadratureSpec(
        rel_tol=spec.rel_tol, abs_tol=1e-300, max_subdivisions=spec.max_subdivisions
    )


@dataclass(frozen=True)
class BumpSpec:
    """Named positive smooth bump, normalized to unit bi-Laplacian energy."""

    kind: str = "poly4"


_BUMP_BASES = {
    "poly4": lambda: poly_profile(2),
    "cos2": cos2_profile,
}

_bump_cache: dict = {}


def bump_profile(bump: BumpSpec, spec: QuadratureSpec = DEFAULT_SPEC) -> RadialProfile:
    key = bump.kind
    if key not in _bump_cache:
        if key not in _BUMP_BASES:
            raise DomainError(f"unknown bump kind {bump.kind!r}")
        base = _BUMP_BASES[key]()
        lap = laplacian_l2_sq(base, spec)
        _bump_cache[key] = base.scaled(1.0 / math.sqrt(lap))
    return _bump_cache[key]


def _check_bump_params(alpha: float, p: FunctionalParams) -> None:
    if alpha < 4.0:
        raise PreconditionError("translated bump requires alpha >= 4")
    if p.m is None:
        raise PreconditionError("the comparison concerns truncated functionals (m present)")
    if p.sigma > SIGMA_CAP * (1.0 + 1e-12):
        raise PreconditionError("sigma must stay at or below 32 pi^2")


def _bump_g_integral(bump: BumpSpec, p: FunctionalParams, spec: QuadratureSpec) -> float:
    """integral_B g(u(|y|)) dy for the normalized bump (cached per sigma, m)."""
    key = (bump.kind, p.sigma, p.m)
    if key not in _bump_cache:
        u = bump_profile(bump, spec)

        def integrand(s):
            ss = np.asarray(s, dtype=float)
            val = u.value(ss)
            return ss**3 * exp_minus_taylor(p.sigma * val * val, p.m)

        _bump_cache[key] = OMEGA_3 * integrate(integrand, 0.0, 1.0, spec).value
    return _bump_cache[key]


def translated_bump_value(
    alpha: float,
    p: FunctionalParams,
    bump: BumpSpec = BumpSpec(),
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> float:
    """Exact F_m of the translated, 1/alpha-scaled bump (2D reduction).

    Evaluated by tensor Gauss-Legendre with node doubling until two
    successive refinements agree to 10 * rel_tol.
    """
    _check_bump_params(alpha, p)
    u = bump_profile(bump, spec)
    xbar = 1.0 - 1.0 / alpha
    inv_a = 1.0 / alpha

    def tensor_value(n: int) -> float:
        xs, ws = np.polynomial.legendre.leggauss(n)
        s = 0.5 * (xs + 1.0)  # radius in (0, 1)
        ws_s = 0.5 * ws
        th = 0.5 * math.pi * (xs + 1.0)  # angle in (0, pi)
        ws_t = 0.5 * math.pi * ws
        val = u.value(s)
        gs = exp_minus_taylor(p.sigma * val * val, p.m) * s**3 * ws_s
        r_sq = (
            xbar**2
            + 2.0 * xbar * inv_a * np.outer(s, np.cos(th))
            + (inv_a * s[:, None]) ** 2
        )
        weight = np.exp(0.5 * alpha * np.log(r_sq)) * np.sin(th) ** 2 * ws_t[None, :]
        return 4.0 * math.pi * float(gs @ weight.sum(axis=1)) / alpha**4

    prev = tensor_value(48)
    for n in (96, 192, 384):
        cur = tensor_value(n)
        if abs(cur - prev) <= 10.0 * spec.rel_tol * abs(cur):
            return cur
        prev = cur
    return prev


def translated_bump_paper_bound(
    alpha: float,
    p: FunctionalParams,
    bump: BumpSpec = BumpSpec(),
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> float:
    """Elementary minorant (1 - 2/alpha)^alpha alpha^-4 integral_B g(u)."""
    _check_bump_params(alpha, p)
    base = _bump_g_integral(bump, p, spec)
    return (1.0 - 2.0 / alpha) ** alpha / alpha**4 * base


# ---------------------------------------------------------------------------
# radial search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SearchOptions:
    seed: int = 0
    sweeps: int = 2
    golden_iters: int = 16
    jitter_starts: int = 3  # extra rng-perturbed starts on top of the base seeds


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(fn, lo: float, hi: float, iters: int):
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fn(c), fn(d)
    best_x, best_f = (c, fc) if fc >= fd else (d, fd)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fn(d)
        if fc >= best_f:
            best_x, best_f = c, fc
        if fd >= best_f:
            best_x, best_f = d, fd
    return best_x, best_f


_FAMILY_BOUNDS = {
    "pow": ((0.5, 12.0),),
    "pow2": ((0.5, 12.0),),
    "moser": ((-12.0, -0.95),),  # log10 epsilon
    "ring": ((0.0, 0.97), (0.03, 0.6)),
}


def _family_profile(family: str, params: Sequence[float]) -> RadialProfile:
    if family == "pow":
        return power_profile(params[0])
    if family == "pow2":
        return power_sq_profile(params[0])
    if family == "moser":
        return moser_navier(MoserParams(10.0 ** params[0], BoundaryKind.NAVIER))
    if family == "ring":
        return ring_profile(params[0], params[1])
    raise DomainError(f"unknown family {family!r}")


def _base_seeds() -> list:
    return [
        ("pow", [1.2]),
        ("pow", [2.0]),
        ("pow", [3.5]),
        ("pow2", [2.0]),
        ("moser", [-2.0]),
        ("moser", [-4.0]),
        ("ring", [0.3, 0.3]),
        ("ring", [0.7, 0.15]),
        ("ring", [0.9, 0.08]),
    ]


def radial_max_search(
    alpha: float,
    p: FunctionalParams,
    opts: SearchOptions = SearchOptions(),
    spec: QuadratureSpec = DEFAULT_SPEC,
):
    """Certified lower estimate of the radial supremum of F_m.

    Multistart coordinate ascent over the parametric families; every
    candidate is scalar-projected onto the unit energy sphere before the
    functional is evaluated, so any returned value is a true lower bound.
    Deterministic for a fixed opts.seed.  Returns (value, profile).
    """
    if p.sigma > SIGMA_CAP * (1.0 + 1e-12):
        raise PreconditionError("sigma must stay at or below 32 pi^2")
    if p.m is None or p.m < 1:
        raise PreconditionError("radial search targets truncated functionals, m >= 1")
    params_alpha = FunctionalParams(alpha, p.sigma, p.m)
    qspec = _relative_spec(spec)

    def objective(family: str, params) -> float:
        try:
            u = _family_profile(family, params)
            lap = laplacian_l2_sq(u, qspec)
            if not (lap > 0.0 and math.isfinite(lap)):
                return -math.inf
            v = u.scaled(1.0 / math.sqrt(lap))
            val = weighted_functional(v, params_alpha, qspec)
        except Henon4Error:
            return -math.inf
        return val if math.isfinite(val) else -math.inf

    rng = np.random.default_rng(opts.seed)
    starts = list(_base_seeds())
    for _ in range(opts.jitter_starts):
        family, params = starts[int(rng.integers(len(_base_seeds())))]
        bounds = _FAMILY_BOUNDS[family]
        jittered = [
            float(np.clip(x * rng.uniform(0.8, 1.25), lo, hi))
            for x, (lo, hi) in zip(params, bounds)
        ]
        starts.append((family, jittered))

    best_val = -math.inf
    best_family = None
    best_params = None
    for family, params in starts:
        params = list(params)
        bounds = _FAMILY_BOUNDS[family]
        val = objective(family, params)
        for _ in range(opts.sweeps):
            for dim, (lo, hi) in enumerate(bounds):

                def line(x, dim=dim):
                    trial = list(params)
                    trial[dim] = x
                    return objective(family, trial)

                x, fx = _golden_max(line, lo, hi, opts.golden_iters)
                if fx > val:
                    params[dim] = x
                    val = fx
        if val > best_val:
            best_val = val
            best_family = family
            best_params = params

    if not math.isfinite(best_val):
        raise OptFailure("all radial search starts failed")
    profile = _family_profile(best_family, best_params)
    lap = laplacian_l2_sq(profile, qspec)
    return best_val, profile.scaled(1.0 / math.sqrt(lap))


# ---------------------------------------------------------------------------
# sweep report and crossover detection
# ---------------------------------------------------------------------------


def fit_loglog_slope(alphas: Sequence[float], values: Sequence[float]) -> tuple:
    """Least-squares slope of log(value) against log(alpha); returns
    (slope, max_abs_residual)."""
    x = np.log(np.asarray(alphas, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return float(slope), float(np.max(np.abs(resid)))


@dataclass(frozen=True)
class SweepRow:
    alpha: float
    bump_exact: float
    bump_paper_bound: float
    radial_max: float
    radial_profile_id: str

    def crossover_margin(self, kappa: float = CROSSOVER_KAPPA) -> float:
        """log(bumpـexact / (kappa * radial_max)); positive past crossover."""
        return math.log(self.bump_exact / (kappa * self.radial_max))


@dataclass(frozen=True)
class SweepReport:
    sigma: float
    m: int
    rows: tuple
    fitted_slopes: dict
    alpha_star: Optional[float]
    kappa: float = CROSSOVER_KAPPA
    fit_points: int = 4
    seed: int = 0

    def to_json_dict(self) -> dict:
        # emitted schema is fixed: {sigma, m, rows, fitted_slopes{bump,radial},
        # alpha_star}; fit residuals stay on the in-process report only
        return {
            "sigma": self.sigma,
            "m": self.m,
            "rows": [
                {
                    "alpha": r.alpha,
                    "bump_exact": r.bump_exact,
                    "bump_paper_bound": r.bump_paper_bound,
                    "radial_max": r.radial_max,
                    "radial_profile_id": r.radial_profile_id,
                }
                for r in self.rows
            ],
            "fitted_slopes": {
                "bump": self.fitted_slopes["bump"],
                "radial": self.fitted_slopes["radial"],
            },
            "alpha_star": self.alpha_star
            if self.alpha_star is not None
            else "not-found-on-grid",
        }

    def csv_rows(self):
        header = (
            "alpha",
            "bump_exact",
            "bump_paper_bound",
            "radial_max",
            "radial_profile_id",
        )
        rows = [
            (r.alpha, r.bump_exact, r.bump_paper_bound, r.radial_max, r.radial_profile_id)
            for r in self.rows
        ]
        return header, rows


def crossover_detect(
    p: FunctionalParams,
    alphas: Sequence[float],
    bump: BumpSpec = BumpSpec(),
    opts: SearchOptions = SearchOptions(),
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> SweepReport:
    """Sweep the grid, fit decay slopes, and locate the numerical crossover.

    alpha_star is the smallest grid alpha whose translated-bump value strictly
    exceeds kappa = 1.05 times the radial search value (both sides are lower
    bounds of their suprema, hence the safety factor and the 'numerical
    crossover' label).  Slopes are least-squares on log-log over the last
    `fit_points` grid points.
    """
    alphas = [float(a) for a in alphas]
    if len(alphas) < 4:
        raise DomainError("need at least 4 grid points")
    if any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise DomainError("alphas must be strictly increasing")
    if p.m is None or p.m < 1:
        raise DomainError("crossover concerns truncated functionals with m >= 1")
    if p.sigma > SIGMA_CAP * (1.0 + 1e-12):
        raise DomainError("sigma must stay at or below 32 pi^2")

    rows = []
    for a in alphas:
        bump_exact = translated_bump_value(a, p, bump, spec)
        bump_bound = translated_bump_paper_bound(a, p, bump, spec)
        radial_val, radial_prof = radial_max_search(a, p, opts, spec)
        rows.append(
            SweepRow(
                alpha=a,
                bump_exact=bump_exact,
                bump_paper_bound=bump_bound,
                radial_max=radial_val,
                radial_profile_id=radial_prof.description,
            )
        )

    fit_points = min(4, len(rows))
    tail = rows[-fit_points:]
    bump_slope, bump_resid = fit_loglog_slope(
        [r.alpha for r in tail], [r.bump_exact for r in tail]
    )
    radial_slope, radial_resid = fit_loglog_slope(
        [r.alpha for r in tail], [r.radial_max for r in tail]
    )

    alpha_star = None
    for r in rows:
        if r.bump_exact > CROSSOVER_KAPPA * r.radial_max:
            alpha_star = r.alpha
            break

    return SweepReport(
        sigma=p.sigma,
        m=int(p.m),
        rows=tuple(rows),
        fitted_slopes={
            "bump": bump_slope,
            "radial": radial_slope,
            "bump_max_residual": bump_resid,
            "radial_max_residual": radial_resid,
        },
        alpha_star=alpha_star,
        kappa=CROSSOVER_KAPPA,
        fit_points=fit_points,
        seed=opts.seed,
    )

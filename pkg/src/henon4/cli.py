"""Command-line runner: identity suites, threshold scans, blow-up
experiments, comparison checks, symmetry sweeps.

Commands

    verify-identities   energy identities, pointwise log bound margins,
                        weighted-norm embedding and series-bound properties
                        over the built-in corpus
    threshold-scan      per-alpha table: sharp threshold, series bound and
                        the largest corpus value of the functional
    moser-blowup        threshold-sharpness scan along an epsilon ladder
    talenti-check       rearrangement/comparison oracle on seeded profiles
    symmetry-sweep      translated-bump versus radial-search sweep report

Exit codes: 0 success, 2 invalid configuration (nothing is computed or
written), 3 numerical failure (a verdict or invariant contradicts the
expected regime).  Outputs are written once, after all computation, and are
byte-stable for a fixed configuration and seed: CSV uses '.' decimals and 17
significant digits, JSON is emitted with sorted keys.

sigma accepts symbolic tokens: "32pi2" (or any "<x>pi2"), "sigma_alpha",
"<x>*sigma_alpha" resolved against the given alpha, or a plain number.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import Henon4Error
from .logtransform import log_energy, sqrt_transform_energy, to_log_profile
from .moser import blowup_scan
from .profiles import (
    BoundaryKind,
    FunctionalParams,
    corpus_names,
    corpus_profile,
    embedding_bound,
    laplacian_l2_sq,
    pointwise_log_bound_margin,
    series_upper_bound,
    unit_energy,
    weighted_functional,
    weighted_lp_norm_p,
)
from .quadrature import QuadratureSpec
from .rearrangement import seeded_comparison_profiles, talenti_comparison_check
from .symmetry import BumpSpec, SearchOptions, crossover_detect

__all__ = ["RunConfig", "ConfigError", "build_config", "run", "emit", "main"]

_COMMANDS = (
    "verify-identities",
    "threshold-scan",
    "moser-blowup",
    "talenti-check",
    "symmetry-sweep",
)


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    quadrature: QuadratureSpec = QuadratureSpec()
    out_dir: Path = Path("out")
    fmt: str = "both"  # csv | json | both


@dataclass(frozen=True)
class TableReport:
    """Generic emittable table with metadata."""

    meta: dict
    header: tuple
    rows: tuple

    def csv_rows(self):
        return self.header, self.rows

    def to_json_dict(self):
        return {
            **self.meta,
            "rows": [dict(zip(self.header, row)) for row in self.rows],
        }


def _fmt_cell(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def emit(report, fmt: str, path: Path) -> None:
    """Write a report to path; byte-stable for identical inputs."""
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        header, rows = report.csv_rows()
        lines = [",".join(header)]
        lines += [",".join(_fmt_cell(c) for c in row) for row in rows]
        text = "\n".join(lines) + "\n"
    elif fmt == "json":
        text = json.dumps(report.to_json_dict(), indent=2, sort_keys=True) + "\n"
    else:
        raise ConfigError(f"unknown format {fmt!r}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def resolve_sigma(token: str, alpha: float) -> float:
    """Resolve a sigma token ("32pi2", "0.8*sigma_alpha", number) to a value."""
    tok = token.strip().lower()
    sigma_alpha = 32.0 * math.pi**2 * (1.0 + alpha / 4.0)
    factor = 1.0
    if "*" in tok:
        head, tok = tok.split("*", 1)
        try:
            factor = float(head)
        except ValueError as exc:
            raise ConfigError(f"bad sigma factor in {token!r}") from exc
    if tok == "sigma_alpha":
        return factor * sigma_alpha
    if tok.endswith("pi2"):
        try:
            base = float(tok[:-3])
        except ValueError as exc:
            raise ConfigError(f"bad sigma token {token!r}") from exc
        return factor * base * math.pi**2
    try:
        return factor * float(tok)
    except ValueError as exc:
        raise ConfigError(f"bad sigma token {token!r}") from exc


def parse_epsilons(token: str) -> list:
    """Parse "start:end:decade" / "start:end:<k>decade" ladders or comma lists."""
    tok = token.strip()
    if ":" in tok:
        parts = tok.split(":")
        if len(parts) != 3:
            raise ConfigError(f"epsilon ladder must be start:end:mode, got {token!r}")
        start, end, mode = float(parts[0]), float(parts[1]), parts[2].strip().lower()
        if not (0.0 < end < start):
            raise ConfigError("epsilon ladder needs 0 < end < start")
        if mode == "decade":
            k = 1
        elif mode.endswith("decade") and mode[:-6].isdigit():
            k = int(mode[:-6])
            if k < 1:
                raise ConfigError("decade step must be >= 1")
        else:
            raise ConfigError(f"unknown epsilon step mode {mode!r}")
        out = []
        e = start
        while e > end * (1.0 - 1e-12):
            out.append(e)
            e *= 10.0 ** (-k)
        return out
    out = [float(x) for x in tok.split(",") if x.strip()]
    if not out:
        raise ConfigError("empty epsilon list")
    if any(b >= a for a, b in zip(out, out[1:])):
        raise ConfigError("epsilons must be strictly decreasing")
    return out


def parse_alphas(token: str) -> list:
    try:
        out = [float(x) for x in token.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad alphas list {token!r}") from exc
    if not out:
        raise ConfigError("empty alphas list")
    if any(b <= a for a, b in zip(out, out[1:])):
        raise ConfigError("alphas must be strictly increasing")
    return out


_ALLOWED_KEYS = {
    "alpha",
    "sigma",
    "beta",
    "m",
    "epsilons",
    "alphas",
    "bump",
    "bc",
    "seed",
    "count",
    "out_dir",
    "format",
    "rel_tol",
    "max_subdiv",
}


def build_config(argv: Sequence[str]) -> RunConfig:
    parser = argparse.ArgumentParser(
        prog="henon4",
        description="weighted exponential functionals on the 4-ball: "
        "verification suites and experiments",
    )
    parser.add_argument("command", choices=_COMMANDS)
    parser.add_argument("--alpha", type=float, default=None)
    parser.add_argument("--sigma", type=str, default=None)
    parser.add_argument("--beta", type=float, default=None)
    parser.add_argument("--m", type=int, default=None)
    parser.add_argument("--epsilons", type=str, default=None)
    parser.add_argument("--alphas", type=str, default=None)
    parser.add_argument("--bump", type=str, default=None)
    parser.add_argument("--bc", type=str, default=None, choices=["navier", "dirichlet"])
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--count", type=int, default=None)
    parser.add_argument("--out-dir", type=str, default=None)
    parser.add_argument("--format", type=str, default=None, choices=["csv", "json", "both"])
    parser.add_argument("--config", type=str, default=None)
    parser.add_argument("--rel-tol", type=float, default=None)
    parser.add_argument("--max-subdiv", type=int, default=None)
    ns = parser.parse_args(argv)

    params: dict = {}
    if ns.config is not None:
        try:
            loaded = json.loads(Path(ns.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(loaded) - _ALLOWED_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        params.update(loaded)

    for key in (
        "alpha",
        "sigma",
        "beta",
        "m",
        "epsilons",
        "alphas",
        "bump",
        "bc",
        "seed",
        "count",
    ):
        val = getattr(ns, key)
        if val is not None:
            params[key] = val

    rel_tol = ns.rel_tol if ns.rel_tol is not None else params.pop("rel_tol", None)
    max_subdiv = (
        ns.max_subdiv if ns.max_subdiv is not None else params.pop("max_subdiv", None)
    )
    try:
        quadrature = QuadratureSpec(
            rel_tol=float(rel_tol) if rel_tol is not None else 1e-10,
            max_subdivisions=int(max_subdiv) if max_subdiv is not None else 2000,
        )
    except Henon4Error as exc:
        raise ConfigError(str(exc)) from exc

    out_dir = (
        ns.out_dir
        if ns.out_dir is not None
        else params.pop("out_dir", None) or os.environ.get("HENON4_OUT_DIR", "out")
    )
    fmt = ns.format if ns.format is not None else params.pop("format", "both")
    if fmt not in ("csv", "json", "both"):
        raise ConfigError(f"unknown format {fmt!r}")

    cfg = RunConfig(
        command=ns.command,
        params=params,
        quadrature=quadrature,
        out_dir=Path(out_dir),
        fmt=fmt,
    )
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    """Range checks before any computation; raises ConfigError."""
    p = cfg.params
    alpha = float(p.get("alpha", 0.0))
    if alpha < 0.0:
        raise ConfigError("alpha must be >= 0")
    if "m" in p and p["m"] is not None and int(p["m"]) < 0:
        raise ConfigError("m must be >= 0")
    if "sigma" in p:
        sigma = resolve_sigma(str(p["sigma"]), alpha)
        if sigma <= 0.0:
            raise ConfigError("sigma must resolve to a positive value")
    if cfg.command == "moser-blowup":
        beta = float(p.get("beta", 1.2))
        if beta <= 0.0:
            raise ConfigError("beta must be > 0")
        eps = parse_epsilons(str(p.get("epsilons", "1e-2:1e-10:decade")))
        bc = BoundaryKind(p.get("bc", "navier"))
        emax = math.exp(-2.0)
        for e in eps:
            if not 0.0 < e < emax:
                raise ConfigError(f"epsilon {e:g} outside (0, e^-2)")
            if bc is BoundaryKind.DIRICHLET and math.log(-math.log(e)) <= 2.0:
                raise ConfigError(
                    f"epsilon {e:g} too large for the Dirichlet member "
                    "(needs 1/log|log eps| < 1/2)"
                )
    if cfg.command == "symmetry-sweep":
        alphas = parse_alphas(str(p.get("alphas", "16,32,64,128,256,512")))
        if len(alphas) < 4:
            raise ConfigError("symmetry sweep needs at least 4 alphas")
        if min(alphas) < 4.0:
            raise ConfigError("translated bump requires alpha >= 4")
        m = int(p.get("m", 1))
        if m < 1:
            raise ConfigError("symmetry sweep requires m >= 1")
        sigma = resolve_sigma(str(p.get("sigma", "32pi2")), 0.0)
        if sigma > 32.0 * math.pi**2 * (1.0 + 1e-12):
            raise ConfigError("symmetry sweep requires sigma <= 32pi2")
        if p.get("bump", "poly4") not in ("poly4", "cos2"):
            raise ConfigError(f"unknown bump kind {p.get('bump')!r}")
    if cfg.command == "talenti-check":
        if int(p.get("count", 10)) < 1:
            raise ConfigError("count must be >= 1")


# ---------------------------------------------------------------------------
# command bodies
# ---------------------------------------------------------------------------


def _print(line: str) -> None:
    sys.stdout.write(line + "\n")


def _verify_identities(cfg: RunConfig):
    spec = cfg.quadrature
    alpha = float(cfg.params.get("alpha", 16.0))
    gammas = (1.0, 4.0, alpha + 4.0)
    rows = []
    failures = 0

    for name in corpus_names():
        u = corpus_profile(name)
        radial = laplacian_l2_sq(u, spec)
        sqrt_form = sqrt_transform_energy(u, spec)
        worst = abs(sqrt_form - radial) / radial
        for gamma in gammas:
            log_form = log_energy(to_log_profile(u, gamma), spec)
            worst = max(worst, abs(log_form - radial) / radial)
        ok = worst <= 1e-8
        failures += not ok
        rows.append(("energy-identity", name, worst, ok))

    for name in corpus_names():
        u = unit_energy(corpus_profile(name), spec)
        margin = pointwise_log_bound_margin(u, spec)
        ok = margin <= 1.0 + 1e-9
        failures += not ok
        rows.append(("log-bound-margin", name, margin, ok))

    for name in corpus_names():
        u = corpus_profile(name)
        lap = math.sqrt(laplacian_l2_sq(u, spec))
        worst = 0.0
        for pexp in (2.0, 4.0, 6.0):
            for a in (0.0, 1.0, 4.0, 16.0):
                lhs = weighted_lp_norm_p(u, pexp, a, spec)
                rhs = embedding_bound(pexp, a, lap)
                worst = max(worst, lhs / rhs if rhs > 0 else 0.0)
        ok = worst <= 1.0 + 1e-8
        failures += not ok
        rows.append(("embedding-bound", name, worst, ok))

    for name in corpus_names():
        u = unit_energy(corpus_profile(name), spec)
        worst = 0.0
        for a in (0.0, 1.0, 4.0, 16.0):
            sigma = 0.9 * FunctionalParams(a, 1.0, None).sigma_alpha()
            for m in (None, 0, 1, 2):
                params = FunctionalParams(a, sigma, m)
                val = weighted_functional(u, params, spec)
                bound = series_upper_bound(params, 1.0)
                worst = max(worst, val / bound)
        ok = worst <= 1.0 + 1e-8
        failures += not ok
        rows.append(("series-bound", name, worst, ok))

    for kind, name, val, ok in rows:
        _print(f"[{'PASS' if ok else 'FAIL'}] {kind:18s} {name:22s} {val:.6g}")
    report = TableReport(
        meta={"suite": "verify-identities", "alpha": alpha},
        header=("check", "profile", "worst_ratio", "ok"),
        rows=tuple(rows),
    )
    return report, (0 if failures == 0 else 3), f"{failures} failure(s)"


def _threshold_scan(cfg: RunConfig):
    spec = cfg.quadrature
    alphas = parse_alphas(str(cfg.params.get("alphas", "0,1,4,16")))
    sigma_token = str(cfg.params.get("sigma", "0.9*sigma_alpha"))
    rows = []
    failures = 0
    for a in alphas:
        params = FunctionalParams(a, resolve_sigma(sigma_token, a), None)
        bound = series_upper_bound(params, 1.0)
        worst = 0.0
        for name in corpus_names():
            u = unit_energy(corpus_profile(name), spec)
            worst = max(worst, weighted_functional(u, params, spec))
        ok = worst <= bound * (1.0 + 1e-8)
        failures += not ok
        rows.append((a, params.sigma_alpha(), bound, worst))
        _print(
            f"[{'PASS' if ok else 'FAIL'}] alpha={a:g} sigma_alpha={params.sigma_alpha():.6g} "
            f"bound={bound:.6g} max_corpus={worst:.6g}"
        )
    report = TableReport(
        meta={"suite": "threshold-scan", "sigma": sigma_token},
        header=("alpha", "sigma_alpha", "series_bound", "max_corpus_value"),
        rows=tuple(rows),
    )
    return report, (0 if failures == 0 else 3), f"{failures} violation(s)"


def _moser_blowup(cfg: RunConfig):
    spec = cfg.quadrature
    p = cfg.params
    alpha = float(p.get("alpha", 0.0))
    beta = float(p.get("beta", 1.2))
    eps = parse_epsilons(str(p.get("epsilons", "1e-2:1e-10:decade")))
    m = int(p["m"]) if "m" in p and p["m"] is not None else None
    bc = BoundaryKind(p.get("bc", "navier"))
    ex = blowup_scan(alpha, beta, eps, m=m, spec=spec, bc=bc)
    header, rows = ex.csv_rows()
    for row in rows:
        _print(
            f"eps={row[0]:<8g} norm_sq={row[1]:.8f} value={row[2]:.6g} "
            f"log={row[3]:+.4f} floor={row[4]:+.4f}"
        )
    _print(f"verdict: {ex.verdict}")
    report = TableReport(
        meta={
            "suite": "moser-blowup",
            "alpha": alpha,
            "beta": beta,
            "bc": bc.value,
            "m": m,
            "verdict": ex.verdict,
        },
        header=header,
        rows=tuple(rows),
    )
    if beta > 1.0 and ex.verdict != "Diverging":
        return report, 3, f"expected Diverging at beta={beta}, got {ex.verdict}"
    if beta < 1.0 and ex.verdict != "Bounded":
        return report, 3, f"expected Bounded at beta={beta}, got {ex.verdict}"
    return report, 0, ex.verdict


def _talenti_check(cfg: RunConfig):
    spec = cfg.quadrature
    count = int(cfg.params.get("count", 10))
    seed = int(cfg.params.get("seed", 20240807))
    rows = []
    failures = 0
    profiles = seeded_comparison_profiles(count, seed)
    for v in profiles:
        rep = talenti_comparison_check(v, spec)
        ok = rep.holds and rep.v_sq_integral <= rep.u_sq_integral + 1e-8
        failures += not ok
        rows.append(
            (v.description, rep.min_gap, rep.l2_rel_err, rep.v_sq_integral, rep.u_sq_integral, ok)
        )
        _print(
            f"[{'PASS' if ok else 'FAIL'}] {v.description:20s} min_gap={rep.min_gap:+.3e} "
            f"l2_rel={rep.l2_rel_err:.3e}"
        )
    report = TableReport(
        meta={"suite": "talenti-check", "count": count, "seed": seed},
        header=("profile", "min_gap", "l2_rel_err", "v_sq", "u_sq", "ok"),
        rows=tuple(rows),
    )
    return report, (0 if failures == 0 else 3), f"{failures} failure(s)"


def _symmetry_sweep(cfg: RunConfig):
    spec = cfg.quadrature
    p = cfg.params
    alphas = parse_alphas(str(p.get("alphas", "16,32,64,128,256,512")))
    m = int(p.get("m", 1))
    sigma = resolve_sigma(str(p.get("sigma", "32pi2")), 0.0)
    bump = BumpSpec(str(p.get("bump", "poly4")))
    opts = SearchOptions(seed=int(p.get("seed", 0)))
    params = FunctionalParams(0.0, sigma, m)
    report = crossover_detect(params, alphas, bump, opts, spec)
    for r in report.rows:
        _print(
            f"alpha={r.alpha:<6g} bump={r.bump_exact:.6e} bound={r.bump_paper_bound:.6e} "
            f"radial={r.radial_max:.6e} margin={r.crossover_margin():+.3f} [{r.radial_profile_id}]"
        )
    slopes = report.fitted_slopes
    _print(f"fitted slopes: bump={slopes['bump']:.4f} radial={slopes['radial']:.4f}")
    star = report.alpha_star if report.alpha_star is not None else "not-found-on-grid"
    _print(f"alpha_star: {star}")
    return report, 0, f"alpha_star={star}"


def run(config: RunConfig) -> int:
    """Execute the configured command; write outputs; return the exit code."""
    t0 = time.time()
    body = {
        "verify-identities": _verify_identities,
        "threshold-scan": _threshold_scan,
        "moser-blowup": _moser_blowup,
        "talenti-check": _talenti_check,
        "symmetry-sweep": _symmetry_sweep,
    }[config.command]
    report, code, note = body(config)

    stem = config.command.replace("-", "_")
    if config.command == "symmetry-sweep":
        stem = "sweep_report"
    wrote = []
    if config.fmt in ("csv", "both"):
        path = config.out_dir / f"{stem}.csv"
        emit(report, "csv", path)
        wrote.append(str(path))
    if config.fmt in ("json", "both"):
        path = config.out_dir / f"{stem}.json"
        emit(report, "json", path)
        wrote.append(str(path))
    _print(f"{config.command}: {note} ({time.time() - t0:.1f}s) -> {', '.join(wrote)}")
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = build_config(argv)
    except ConfigError as exc:
        sys.stderr.write(f"configuration error: {exc}\n")
        return 2
    try:
        return run(cfg)
    except Henon4Error as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return 3
    except Exception as exc:  # contract: never a bare traceback on bad input
        sys.stderr.write(f"internal error: {type(exc).__name__}: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())

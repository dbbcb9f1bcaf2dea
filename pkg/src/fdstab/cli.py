"""Command-line front end.

Every command loads a scheme file (a path or the name of a bundled scheme),
runs one analysis and writes a JSON report.  The exit status is 0 when every
check passes, 1 when a check fails, 2 for configuration errors and 3 when a
numerical hypothesis is violated.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .cauchy import balance_check_cauchy, run_cauchy, torus_energy, TorusState
from .errors import ConfigError, DegenerateEdgeSymbol, HypothesisViolation
from .forms import DEFAULT_EPSILON, PSD_TOL, certify, forms_for_poly
from .ibvp import (SWEEP_SPREAD, default_extent, estimate_sweep, random_sources,
                   run_halfspace, superposition_solve, transport_levels, write_series_csv, IBVPSources)
from .poly import DEFAULT_CLUSTER_RADIUS
from .scheme import UNIT_TOL, INSIDE_TOL, check_assumption2, classify_assumption1, dispersion_poly, power_bound_scan
from .schemefile import resolve_scheme
from .trace import (DEFAULT_R0, MARGIN_THRESHOLD, central_margin_scan, companions, gauss_lucas_check,
                    stable_decay, trace_scan, z_samples)

SCHEMA_VERSION = 1
COMMANDS = ("analyze", "forms", "cauchy", "ibvp", "aux", "trace", "superpose")
BALANCE_TOL = 1e-10
PROJECTOR_TOL = 1e-10
HULL_TOL = 1e-9
POWER_GROWTH_TOL = 2.0
DOUBLING_TOL = 2.0
SUPERPOSITION_TOL = 1e-10
EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_HYPOTHESIS = 0, 1, 2, 3


@dataclass
class RunConfig:
    command: str
    scheme: str
    grid: int = 256
    steps: Optional[int] = None
    gamma: list = field(default_factory=lambda: [0.5, 2.0])
    dt: list = field(default_factory=lambda: [1 / 50, 1 / 100, 1 / 200, 1 / 400])
    epsilon: float = DEFAULT_EPSILON
    cluster_radius: float = DEFAULT_CLUSTER_RADIUS
    p1: int = 5
    r0: float = DEFAULT_R0
    seed: int = 0
    theta: list = field(default_factory=lambda: [0.0])
    samples: int = 1000
    trace_samples: int = 10000
    instances: int = 20
    out: Optional[str] = None
    csv: Optional[str] = None
    timing: bool = False

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.grid < 4:
            raise ConfigError("--grid must be at least 4")
        if self.steps is not None and self.steps < 1:
            raise ConfigError("--steps must be positive")
        if not self.gamma or any(g <= 0 for g in self.gamma):
            raise ConfigError("--gamma values must be positive")
        if not self.dt or any(d <= 0 for d in self.dt):
            raise ConfigError("--dt values must be positive")
        if not 0 < self.epsilon <= 0.25:
            raise ConfigError("--epsilon must lie in (0, 1/4]")
        if not 0 < self.cluster_radius < 1:
            raise ConfigError("--cluster-radius must lie in (0, 1)")
        if self.p1 < 0:
            raise ConfigError("--p1 must be nonnegative")
        if self.r0 <= 1:
            raise ConfigError("--r0 must exceed 1")
        for name in ("samples", "trace_samples", "instances"):
            if getattr(self, name) < 1:
                raise ConfigError(f"--{name.replace('_', '-')} must be positive")

    def echo(self) -> dict:
        data = asdict(self)
        for key in ("out", "csv", "timing"):
            data.pop(key)
        return data


def _check(name: str, value, tolerance, passed: bool, relation: str) -> dict:
    return {"name": name, "value": value, "tolerance": tolerance, "relation": relation,
            "verdict": "pass" if passed else "fail"}


def _c(z: complex) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def _matrix(m: np.ndarray) -> dict:
    return {"re": np.real(m).tolist(), "im": np.imag(m).tolist()}


def _finite(x: float):
    return x if math.isfinite(x) else None


# -- commands ----------------------------------------------------------------

def cmd_analyze(scheme, cfg: RunConfig) -> tuple[list, dict]:
    cls = classify_assumption1(scheme, cfg.grid, cfg.cluster_radius)
    power = power_bound_scan(scheme, min(cfg.grid, 128), cfg.steps or 200)
    checks = [
        _check("roots_in_closed_disk", cls.max_modulus, 1 + UNIT_TOL, cls.all_in_closed_disk, "<="),
        _check("unit_circle_roots_simple", cls.boundary_roots_simple, True, cls.boundary_roots_simple, "=="),
        _check("power_growth_ratio", _finite(power.growth_ratio), POWER_GROWTH_TOL,
               power.growth_ratio <= POWER_GROWTH_TOL, "<="),
    ]
    try:
        edge = check_assumption2(scheme)
        worst = max(max(c.max_modulus, c.max_deriv_modulus) for c in edge.checks)
        checks.append(_check("edge_symbol_roots_inside", worst, 1 - INSIDE_TOL, edge.verdict, "<"))
    except DegenerateEdgeSymbol as exc:
        checks.append(_check("edge_symbol_roots_inside", None, 1 - INSIDE_TOL, False, "<") | {"error": str(exc)})
    data = {
        "crossings": [
            {"theta": list(c.theta), "gap": c.gap, "continuity": c.continuity,
             "groups": [{"value": _c(g.value), "multiplicity": g.multiplicity} for g in c.groups]}
            for c in cls.crossings
        ],
        "has_interior_multiple_root": cls.has_interior_multiple,
        "power_bound": {"max_norm": _finite(power.max_norm), "n_max": power.n_max, "grid": power.grid_size},
    }
    return checks, data


def _theta_point(scheme, cfg: RunConfig) -> np.ndarray:
    theta = list(cfg.theta)
    if len(theta) == 1:
        theta = theta * scheme.d
    if len(theta) != scheme.d:
        raise ConfigError(f"--theta needs {scheme.d} values")
    return np.array(theta, dtype=float)


def cmd_forms(scheme, cfg: RunConfig) -> tuple[list, dict]:
    theta = _theta_point(scheme, cfg)
    p = dispersion_poly(scheme, theta)
    pair = forms_for_poly(p, cfg.epsilon, cfg.cluster_radius)
    cert = certify(pair, seed=cfg.seed)
    checks = [
        _check("qe_min_eigenvalue", cert.qe_min_eig, 0.0, cert.qe_min_eig > 0, ">"),
        _check("qd_min_eigenvalue", cert.qd_min_eig, -PSD_TOL, cert.qd_min_eig >= -PSD_TOL, ">="),
        _check("balance_residual", cert.residual, BALANCE_TOL, cert.residual <= BALANCE_TOL, "<="),
    ]
    data = {"theta": theta.tolist(), "regime": pair.regime, "polynomial": [_c(c) for c in p.coeffs],
            "qe": _matrix(pair.qe), "qd": _matrix(pair.qd)}
    return checks, data


def cmd_cauchy(scheme, cfg: RunConfig) -> tuple[list, dict]:
    rng = np.random.default_rng(cfg.seed)
    shape = (cfg.grid,) * scheme.d
    steps = cfg.steps or 500
    levels = rng.standard_normal((scheme.s + 1,) + shape)
    run = run_cauchy(scheme, levels, steps, epsilon=cfg.epsilon, cluster_radius=cfg.cluster_radius)
    if cfg.csv:
        run.series.to_csv(cfg.csv)
    state = TorusState.create(scheme, levels)
    residual = max(balance_check_cauchy(scheme, rng.standard_normal((scheme.s + 2,) + shape), cfg.epsilon,
                                        state.cell_volume, cfg.cluster_radius) for _ in range(20))
    te = torus_energy(scheme, shape, cfg.epsilon, cfg.cluster_radius)
    checks = [
        _check("balance_residual", residual, BALANCE_TOL, residual <= BALANCE_TOL, "<="),
        _check("energy_coercivity", te.coercivity, 0.0, te.coercivity > 0, ">"),
        _check("dissipation_floor", te.dissipation_floor, -PSD_TOL, te.dissipation_floor >= -PSD_TOL, ">="),
        _check("max_energy_increase", run.max_increase, 1e-12, run.max_increase <= 1e-12, "<="),
    ]
    data = {"steps": steps, "grid": list(shape), "energy_drift": run.energy_drift,
            "sup_ratio": _finite(run.sup_ratio), "max_energy_ratio": _finite(run.max_energy_ratio),
            "regimes": te.regime_counts()}
    return checks, data


def cmd_halfspace(scheme, cfg: RunConfig) -> tuple[list, dict]:
    kind = cfg.command
    watch = ("semigroup", "full") if kind == "ibvp" else ("semigroup", "aux_estimate")
    sweep = estimate_sweep(scheme, cfg.dt, cfg.gamma, kind, P1=cfg.p1, watch=watch)
    checks = [_check(f"spread[{name}]", value, SWEEP_SPREAD, value <= SWEEP_SPREAD, "<=")
              for name, value in sorted(sweep.spreads.items())]
    if cfg.csv:
        dt = cfg.dt[0]
        n_steps, J = default_extent(scheme, dt, 1.5)
        f = transport_levels(scheme, dt, 1 - scheme.r[0], J)
        run = run_halfspace(scheme, IBVPSources(f), n_steps, dt, J, kind)
        write_series_csv(run, cfg.gamma[0], cfg.csv, cfg.p1, scheme.r[0])
    return checks, {"sweep": sweep.to_dict()}


def cmd_trace(scheme, cfg: RunConfig) -> tuple[list, dict]:
    zs = z_samples(cfg.samples, cfg.r0, cfg.seed)
    margin = central_margin_scan(scheme, zs, threshold=MARGIN_THRESHOLD)
    deltas = [stable_decay(companions(scheme, z))[1] for z in zs[:64]]
    hull = gauss_lucas_check(scheme)
    scan = trace_scan(scheme, 2 * cfg.trace_samples, cfg.p1, cfg.r0, cfg.seed)
    finite = math.isfinite(scan.max_ratio)
    checks = [
        _check("central_margin", margin.min_margin, MARGIN_THRESHOLD, margin.verdict, ">"),
        _check("projector_residual", margin.max_projector_residual, PROJECTOR_TOL,
               margin.max_projector_residual <= PROJECTOR_TOL, "<="),
        _check("stable_decay_rate", max(deltas), 1.0, max(deltas) < 1, "<"),
        _check("gauss_lucas_hull_distance", hull, HULL_TOL, hull <= HULL_TOL, "<="),
        _check("trace_max_finite", _finite(scan.max_ratio), None, finite, "finite"),
        _check("trace_doubling_factor", _finite(scan.doubling_factor), DOUBLING_TOL,
               finite and scan.doubling_factor <= DOUBLING_TOL, "<="),
    ]
    data = {
        "margin": {"worst_z": _c(margin.worst_z), "max_condition": margin.max_condition,
                   "samples": margin.n_samples},
        "trace": {"max_ratio": _finite(scan.max_ratio), "half_sample_max": scan.prefix_max,
                  "worst_z": _c(scan.worst_z), "samples": scan.n_samples, "P1": scan.P1, "R0": scan.R0},
    }
    return checks, data


def cmd_superpose(scheme, cfg: RunConfig) -> tuple[list, dict]:
    rng = np.random.default_rng(cfg.seed)
    steps = cfg.steps or 40
    support = 12
    J = support + steps * (scheme.r[0] + scheme.p[0]) + 10
    dt = cfg.dt[0]
    devs = []
    for _ in range(cfg.instances):
        sources = random_sources(scheme, steps, J, rng, support)
        devs.append(superposition_solve(scheme, sources, steps, dt, J).max_deviation)
    worst = max(devs)
    checks = [_check("superposition_deviation", worst, SUPERPOSITION_TOL, worst <= SUPERPOSITION_TOL, "<=")]
    return checks, {"instances": cfg.instances, "steps": steps, "J": J, "deviations": devs}


HANDLERS = {
    "analyze": cmd_analyze,
    "forms": cmd_forms,
    "cauchy": cmd_cauchy,
    "ibvp": cmd_halfspace,
    "aux": cmd_halfspace,
    "trace": cmd_trace,
    "superpose": cmd_superpose,
}


def run(cfg: RunConfig) -> tuple[dict, int]:
    """Execute one command; returns the report and the exit status."""
    cfg.validate()
    scheme = resolve_scheme(cfg.scheme)
    start = time.perf_counter()
    checks, data = HANDLERS[cfg.command](scheme, cfg)
    passed = all(c["verdict"] == "pass" for c in checks)
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool": "fdstab",
        "version": __version__,
        "command": cfg.command,
        "scheme_name": scheme.name,
        "config": cfg.echo(),
        "checks": checks,
        "data": data,
        "verdict": "pass" if passed else "fail",
    }
    if cfg.timing:
        report["timing_seconds"] = time.perf_counter() - start
    return report, EXIT_PASS if passed else EXIT_FAIL


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _floats(text: str) -> list[float]:
    try:
        return [float(eval_fraction(x)) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}") from None


def eval_fraction(text: str) -> float:
    """Parse ``0.25`` or ``1/4``."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fdstab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"fdstab {__version__}")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--scheme", required=True, help="scheme TOML file or bundled scheme name")
    parser.add_argument("--grid", type=int, default=None, help="frequency grid or torus size")
    parser.add_argument("--steps", type=int, default=None, help="number of time steps")
    parser.add_argument("--gamma", type=_floats, default=None, help="comma-separated gamma values")
    parser.add_argument("--dt", type=_floats, default=None, help="comma-separated time steps (1/50 allowed)")
    parser.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    parser.add_argument("--cluster-radius", type=float, default=DEFAULT_CLUSTER_RADIUS)
    parser.add_argument("--p1", type=int, default=5, help="trace window end")
    parser.add_argument("--r0", type=float, default=DEFAULT_R0, help="largest |z| in trace scans")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--theta", type=_floats, default=None, help="frequency for the forms command")
    parser.add_argument("--samples", type=int, default=1000, help="z samples for the margin scan")
    parser.add_argument("--trace-samples", type=int, default=10000,
                        help="trace samples (the scan uses twice this many)")
    parser.add_argument("--instances", type=int, default=20, help="random instances for superpose")
    parser.add_argument("--out", default=None, help="JSON report path (default: stdout)")
    parser.add_argument("--csv", default=None, help="CSV time series path (cauchy, ibvp, aux)")
    parser.add_argument("--timing", action="store_true", help="include wall-clock time in the report")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=args.command, scheme=args.scheme)
    if args.grid is not None:
        cfg.grid = args.grid
    elif args.command == "cauchy":
        cfg.grid = 128
    for name in ("steps", "epsilon", "cluster_radius", "p1", "r0", "seed", "samples", "trace_samples",
                 "instances", "out", "csv", "timing"):
        setattr(cfg, name, getattr(args, name))
    for name in ("gamma", "dt", "theta"):
        if getattr(args, name) is not None:
            setattr(cfg, name, getattr(args, name))
    return cfg


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        report, status = run(cfg)
    except ConfigError as exc:
        print(f"fdstab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HypothesisViolation as exc:
        print(f"fdstab: hypothesis violated ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    text = dumps(report)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())

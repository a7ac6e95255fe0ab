"""Command-line front end: config-driven experiment orchestration.

Subcommands: simulate, control, observability, resolvent-sweep,
tensor-check, stabilize, global-control.  A JSON config file supplies all
parameters; --seed / --out / --format flags override config fields.
Exit codes: 0 success, 2 config/validation error, 3 numerical failure,
64 unknown subcommand.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .grid import FourierState, make_grid, random_state
from .hum import (GramianSpec, GramianSingularError, HUMConvergenceError,
                  lambda_min_dense, observability_constant, solve_hum,
                  drive_linear)
from .io import (state_from_json, state_to_json, write_decay_csv, write_json,
                 write_sweep_csv, write_trajectory_csv)
from .nls import (NLSParams, PicardDivergenceError, StabilizationStallError,
                  evolve, fit_decay_rate, global_control, local_control_nls)
from .resolvent import (InfeasibleResolventError, default_lambda_grid,
                        feasible_m, miller_cost_bound, sweep)
from .tensor import strip_observability_constant
from .windows import full_window, make_window


class ConfigError(ValueError):
    """Invalid configuration; the message carries the offending field path."""


def _get(cfg: dict, path: str, default=None, required: bool = False):
    node = cfg
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            if required:
                raise ConfigError(f"missing required config field: {path}")
            return default
        node = node[part]
    return node


def _build_grid(cfg):
    dim = _get(cfg, "grid.dim", 1)
    n = _get(cfg, "grid.N", required=True)
    try:
        return make_grid(int(dim), int(n))
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from exc


def _build_window(cfg, grid):
    wcfg = _get(cfg, "window")
    if wcfg is None:
        return full_window(grid)
    omega = wcfg.get("omega")
    if omega is None:
        return full_window(grid)
    kind = wcfg.get("kind", "smooth")
    width = wcfg.get("transition_width", 0.05)
    try:
        return make_window(grid, [tuple(iv) for iv in np.atleast_2d(omega)],
                           transition_width=width, kind=kind)
    except ValueError as exc:
        raise ConfigError(f"window: {exc}") from exc


def _build_gramian_spec(cfg, window):
    try:
        return GramianSpec(
            T=float(_get(cfg, "horizon.T", 1.0)),
            window=window,
            n_quad=_get(cfg, "quadrature.n_quad"),
            quad_rule=_get(cfg, "quadrature.rule", "gauss-legendre"),
        )
    except ValueError as exc:
        raise ConfigError(f"quadrature/horizon: {exc}") from exc


def _initial_state(cfg, grid, rng):
    ucfg = _get(cfg, "initial_state")
    if isinstance(ucfg, dict) and "coeffs" in ucfg:
        return state_from_json(ucfg)
    norm = float(_get(cfg, "initial_state.norm", 1.0))
    max_mode = _get(cfg, "initial_state.max_mode")
    return random_state(grid, rng, norm=norm,
                        max_mode=None if max_mode is None else int(max_mode))


def _report(args, cfg, results: dict, out_dir: Path, name: str) -> None:
    report = {"config_echo": cfg, "versions": {"torus_control": __version__,
                                               "numpy": np.__version__},
              "seed": args.seed, "results": results}
    if args.format in ("json", "both"):
        write_json(out_dir / f"{name}.json", report)


def _cmd_simulate(args, cfg, rng, out_dir):
    grid = _build_grid(cfg)
    window = _build_window(cfg, grid)
    damping = window if _get(cfg, "nls.damped", False) else None
    params = NLSParams(sigma=int(_get(cfg, "nls.sigma", -1)),
                       dt=float(_get(cfg, "nls.dt", 1e-3)),
                       damping=damping,
                       dealias=bool(_get(cfg, "nls.dealias", True)))
    u0 = _initial_state(cfg, grid, rng)
    T = float(_get(cfg, "horizon.T", 1.0))
    final, record = evolve(u0, T, params)
    if args.format in ("csv", "both"):
        write_decay_csv(out_dir / "simulate.csv", record)
    results = {"final_mass": record.mass[-1], "initial_mass": record.mass[0],
               "final_energy": record.energy[-1]}
    _report(args, cfg, results, out_dir, "simulate")
    return 0


def _cmd_control(args, cfg, rng, out_dir):
    grid = _build_grid(cfg)
    window = _build_window(cfg, grid)
    spec = _build_gramian_spec(cfg, window)
    u0 = _initial_state(cfg, grid, rng)
    sol = solve_hum(spec, u0, tol=float(_get(cfg, "solver.tol", 1e-8)),
                    max_iter=int(_get(cfg, "solver.max_iter", 5000)))
    record, residual = drive_linear(u0, spec, sol.phi0)
    if args.format in ("csv", "both"):
        write_trajectory_csv(out_dir / "control_trajectory.csv",
                             record.times, record.mass, record.observed_mass)
    results = {"residual": residual, "iterations": sol.iterations,
               "n_quad": spec.n_quad, "phi0": state_to_json(sol.phi0)}
    _report(args, cfg, results, out_dir, "control")
    return 0


def _cmd_observability(args, cfg, rng, out_dir):
    grid = _build_grid(cfg)
    window = _build_window(cfg, grid)
    spec = _build_gramian_spec(cfg, window)
    c_t = observability_constant(spec)
    results = {"C_T": c_t, "lambda_min": 1.0 / c_t, "n_quad": spec.n_quad,
               "T": spec.T, "N": grid.modes_per_axis}
    _report(args, cfg, results, out_dir, "observability")
    return 0


def _cmd_resolvent_sweep(args, cfg, rng, out_dir):
    grid = _build_grid(cfg)
    window = _build_window(cfg, grid)
    scfg = _get(cfg, "sweep", {})
    m = scfg.get("m")
    if m is None:
        m = feasible_m(window, grid)
    n_points = int(scfg.get("n_points", 512))
    if "lambda_min" in scfg and "lambda_max" in scfg:
        grid_lam = np.linspace(float(scfg["lambda_min"]), float(scfg["lambda_max"]),
                               n_points)
    else:
        grid_lam = default_lambda_grid(grid, n_points)
    result = sweep(grid_lam, float(m), window, grid)
    if args.format in ("csv", "both"):
        write_sweep_csv(out_dir / "resolvent_sweep.csv", result)
    results = {"m": result.m_fixed, "M_sup": result.M_sup,
               "miller_time": result.miller_time,
               "grid_spec": {"n_points": len(grid_lam),
                             "lambda_min": float(grid_lam[0]),
                             "lambda_max": float(grid_lam[-1])}}
    # Miller-loop cross-check: observability at T slightly above the Miller time
    if scfg.get("cross_check", False):
        T = 1.05 * result.miller_time
        spec = GramianSpec(T=T, window=window, n_quad=_get(cfg, "quadrature.n_quad"))
        c_t = observability_constant(spec)
        bound = miller_cost_bound(result.M_sup, result.m_fixed, T)
        results["cross_check"] = {"T": T, "C_T": c_t, "miller_bound": bound,
                                  "within_slack": bool(c_t <= 1.5 * bound)}
    _report(args, cfg, results, out_dir, "resolvent_sweep")
    return 0


def _cmd_tensor_check(args, cfg, rng, out_dir):
    grid = _build_grid(cfg)
    if grid.dim != 1:
        raise ConfigError("grid.dim: tensor-check expects the 1D base grid")
    window = _build_window(cfg, grid)
    spec = _build_gramian_spec(cfg, window)
    c_2d, c_1d = strip_observability_constant(
        spec, n_quad_2d=_get(cfg, "quadrature.n_quad_2d"))
    results = {"C_1d": c_1d, "C_2d": c_2d,
               "relative_gap": abs(c_2d - c_1d) / c_1d,
               "N_per_axis": grid.modes_per_axis, "T": spec.T}
    _report(args, cfg, results, out_dir, "tensor_check")
    return 0


def _cmd_stabilize(args, cfg, rng, out_dir):
    grid = _build_grid(cfg)
    window = _build_window(cfg, grid)
    params = NLSParams(sigma=int(_get(cfg, "nls.sigma", -1)),
                       dt=float(_get(cfg, "nls.dt", 1e-3)),
                       damping=window,
                       dealias=bool(_get(cfg, "nls.dealias", True)))
    u0 = _initial_state(cfg, grid, rng)
    T = float(_get(cfg, "horizon.T", 10.0))
    final, record = evolve(u0, T, params, record_stride=10)
    gamma = fit_decay_rate(record)
    record.gamma_fit = gamma
    if args.format in ("csv", "both"):
        write_decay_csv(out_dir / "stabilize.csv", record)
    results = {"gamma_fit": gamma, "initial_mass": record.mass[0],
               "final_mass": record.mass[-1]}
    _report(args, cfg, results, out_dir, "stabilize")
    return 0


def _cmd_global_control(args, cfg, rng, out_dir):
    grid = _build_grid(cfg)
    window = _build_window(cfg, grid)
    spec = _build_gramian_spec(cfg, window)
    u0 = _initial_state(cfg, grid, rng)
    t_norm = float(_get(cfg, "target.norm", 0.0))
    if t_norm > 0.0:
        u1 = random_state(grid, rng, norm=t_norm,
                          max_mode=_get(cfg, "target.max_mode"))
    else:
        u1 = FourierState(grid, np.zeros(grid.shape, dtype=complex))
    schedule = global_control(
        u0, u1, spec, sigma=int(_get(cfg, "nls.sigma", -1)),
        mass_threshold=float(_get(cfg, "nls.mass_threshold", 0.05)),
        tol=float(_get(cfg, "solver.tol", 1e-8)),
        dt=float(_get(cfg, "nls.dt", 1e-3)))
    phases = [{"phase": i, "type": ph.kind, "t_start": ph.t_start,
               "t_end": ph.t_end,
               "phi0": state_to_json(ph.phi0) if ph.phi0 is not None else None,
               "conjugate_reversed": ph.conjugate_reversed}
              for i, ph in enumerate(schedule.phases)]
    results = {"phases": phases,
               "endpoint_error_to_zero": schedule.endpoint_error_to_zero,
               "endpoint_error_to_target": schedule.endpoint_error_to_target}
    _report(args, cfg, results, out_dir, "global_control")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "control": _cmd_control,
    "observability": _cmd_observability,
    "resolvent-sweep": _cmd_resolvent_sweep,
    "tensor-check": _cmd_tensor_check,
    "stabilize": _cmd_stabilize,
    "global-control": _cmd_global_control,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="torus-control")
    parser.add_argument("subcommand")
    parser.add_argument("--config", type=Path, required=True)
    parser.add_argument("--out", type=Path, default=Path("."))
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--format", choices=["csv", "json", "both"], default="both")
    args = parser.parse_args(argv)

    if args.subcommand not in _COMMANDS:
        print(f"unknown subcommand: {args.subcommand}", file=sys.stderr)
        return 64
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return 2
    if args.seed is None:
        args.seed = int(_get(cfg, "seed", 0))
    rng = np.random.default_rng(args.seed)
    out_dir = args.out
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.subcommand](args, cfg, rng, out_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (GramianSingularError, HUMConvergenceError, InfeasibleResolventError,
            PicardDivergenceError, StabilizationStallError) as exc:
        write_json(out_dir / "error.json",
                   {"error": type(exc).__name__, "message": str(exc)})
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

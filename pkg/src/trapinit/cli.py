"""Command-line front end: static, perturb, verify, sweep and plot.

Exit codes: 0 success, 1 numerical failure (or a failed clause under
`verify`), 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import logging
import math
import sys
from pathlib import Path

from . import __version__, io
from .config import OUT_DIR_ENV, ConfigError, RunConfig, build_config, config_dict
from .ef_frame import to_ef
from .initial_data import Perturbation, build_initial_data, theorem_constants, verify_theorem
from .model import FluidModel
from .oracle import singular_density_coefficient
from .static_star import StaticSolveError, fit_asymptotics, solve_static
from .svg import Chart
from .sweep import SWEEP_COLUMNS, GridParams, grid_points, run_bisection, run_sweep, sweep_fits

log = logging.getLogger("trapinit")

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2

_RUN_FLAGS = (
    ("--k", "sound speed k in (0, 1)"),
    ("--rho0", "central density (default 1)"),
    ("--r-min", "series start radius [L] (default 1e-6)"),
    ("--r-max", "outer radius [L] (default 1e3)"),
    ("--tolerance", "integrator relative tolerance (default 1e-10)"),
    ("--points-per-decade", "output nodes per decade in the tail (default 400)"),
    ("--r-star", "band center [L] (default 2)"),
    ("--delta", "band half-width [L] (default Delta/10)"),
    ("--h", "perturbation strength; 'inf' for none"),
    ("--Delta", "annulus width [L] (default r-star/2)"),
    ("--k-values", "sweep list: a,b,c or logspace:lo:hi:n"),
    ("--r-star-values", "sweep list [L]"),
    ("--delta-values", "sweep list [L]"),
    ("--h-values", "sweep list"),
    ("--mode", "sweep mode: grid or bisect"),
    ("--window-lo", "asymptotic window start [L] (default 1e2)"),
    ("--window-hi", "asymptotic window end [L] (default 1e3)"),
    ("--workers", "worker processes for sweeps (default 1)"),
)


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value configuration file; flags override it")
    for flag, text in _RUN_FLAGS:
        p.add_argument(flag, default=argparse.SUPPRESS, help=text)
    p.add_argument("--at-threshold", action="store_const", const=True, default=argparse.SUPPRESS,
                   help="choose h so that delta/h = 1/C1")
    p.add_argument("--plot", action="store_const", const=True, default=argparse.SUPPRESS,
                   help="also write SVG figures")
    p.add_argument("--out-dir", default=argparse.SUPPRESS, help=f"output directory (env {OUT_DIR_ENV})")
    p.add_argument("-v", "--verbose", action="store_true")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trapinit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("static", "solve a static star; write profile CSV and asymptotics JSON"),
        ("perturb", "build perturbed initial data; write CSV and theorem report"),
        ("verify", "like perturb, and exit 1 unless every clause holds"),
        ("sweep", "sweep (k, r*, delta, h); write aggregate CSV and fits JSON"),
    ):
        _add_run_flags(sub.add_parser(name, help=text))
    p = sub.add_parser("plot", help="render SVG from a CSV written by static or perturb")
    p.add_argument("--input", required=True)
    p.add_argument("--kind", required=True, choices=("static", "convergence", "a0", "av"))
    p.add_argument("--output", required=True)
    p.add_argument("--k", type=float, default=None, help="draw asymptotes for this k")
    p.add_argument("--linear-x", action="store_true")
    p.add_argument("-v", "--verbose", action="store_true")
    return parser


def _config_from_args(args) -> RunConfig:
    overrides = {
        key: value for key, value in vars(args).items()
        if key not in ("command", "config", "verbose") and value is not None
    }
    for key in ("at_threshold", "plot"):
        if key in overrides:
            overrides[key] = True
    return build_config(args.config, overrides)


def _grid(cfg: RunConfig) -> GridParams:
    return GridParams(cfg.r_min, cfg.r_max, cfg.tolerance, cfg.points_per_decade)


def _write_manifest(out: Path, command: str, cfg: RunConfig, files) -> None:
    io.write_json(out / "manifest.json", {
        "command": command,
        "argv": sys.argv[1:],
        "version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "config": config_dict(cfg),
        "files": [Path(f).name for f in files],
    })


def _solve(cfg: RunConfig):
    model = FluidModel(cfg.k, cfg.rho0)
    L = model.length_scale
    profile = solve_static(
        model, r_min=cfg.r_min * L, r_max=cfg.r_max * L,
        rtol=cfg.tolerance, points_per_decade=cfg.points_per_decade,
    )
    return model, profile


def cmd_static(cfg: RunConfig) -> int:
    cfg.validate()
    if cfg.window_hi > cfg.r_max:
        raise ConfigError("asymptotic window extends past r-max")
    out = cfg.output_dir()
    model, profile = _solve(cfg)
    L = model.length_scale
    rep = fit_asymptotics(profile, (cfg.window_lo * L, cfg.window_hi * L))
    c = singular_density_coefficient(model.k)
    p = 2 * model.k2 / (1 + model.k2)
    summary = rep.to_dict()
    summary.update({
        "k": model.k,
        "rho0": model.rho0,
        "alpha": model.alpha,
        "length_scale": L,
        "window_L": [cfg.window_lo, cfg.window_hi],
        "a_limit_expected": 1 - model.alpha,
        "rho_coeff_expected": c,
        "b_exponent_expected": p,
        "b_coeff_singular_normalization": (model.rho0 / c) ** model.nu_exponent / math.sqrt(1 - model.alpha),
    })
    files = [
        io.write_profile_csv(out / "profile.csv", profile),
        io.write_ef_csv(out / "ef_fields.csv", to_ef(profile)),
        io.write_json(out / "asymptotics.json", summary),
    ]
    if cfg.plot:
        files.append(_plot_static(profile.r / L, profile.a, model.k, cfg.log_x, out / "static.svg"))
        files.append(_plot_convergence(profile.r / L, profile.a, profile.rho, profile.r, model.k, out / "convergence.svg"))
    _write_manifest(out, "static", cfg, files)
    print(f"k={model.k:g} alpha={model.alpha:.12g} L={L:.12g} nodes={len(profile.grid)}")
    print(f"a_limit_est={rep.a_limit_est:.10g} (1-alpha={1 - model.alpha:.10g})")
    print(f"rho_coeff_est={rep.rho_coeff_est:.10g} (c={c:.10g})")
    print(f"b_exponent_est={rep.b_exponent_est:.10g} (2k^2/(1+k^2)={p:.10g}) b_coeff_est={rep.b_coeff_est:.10g}")
    print(f"wrote {', '.join(str(f) for f in files)}")
    return EXIT_OK


def _perturbation(cfg: RunConfig, fields):
    L = fields.model.length_scale
    r_star, delta, Delta = cfg.r_star * L, cfg.delta_value * L, cfg.Delta_value * L
    if cfg.at_threshold:
        consts = theorem_constants(fields, Perturbation(r_star, delta, 1.0, Delta))
        return Perturbation(r_star, delta, consts.C1 * delta, Delta)
    if cfg.h is None:
        raise ConfigError("give --h or --at-threshold")
    return Perturbation(r_star, delta, cfg.h, Delta)


def _run_perturb(cfg: RunConfig, command: str):
    cfg.validate()
    out = cfg.output_dir()
    model, profile = _solve(cfg)
    fields = to_ef(profile)
    pert = _perturbation(cfg, fields)
    data = build_initial_data(fields, pert)
    report = verify_theorem(data)
    L = model.length_scale
    payload = report.to_dict()
    payload["length_scale"] = L
    payload["a0_static_gap"] = float(abs(data.a0 - data.a_static).max())
    files = [
        io.write_initial_data_csv(out / "initial_data.csv", data),
        io.write_json(out / "theorem_report.json", payload),
    ]
    if cfg.plot:
        files.append(_plot_a0(data.r / L, data.a0, data.a_static, model.k, cfg.log_x, out / "a0.svg"))
        files.append(_plot_av(data.r / L, data.av, cfg.log_x, out / "av.svg"))
    _write_manifest(out, command, cfg, files)
    print(f"k={model.k:g} r*={pert.r_star:.10g} ({pert.r_star / L:g} L) delta={pert.delta:.10g} h={pert.h:.10g}")
    print(f"C1={report.C1:.10g} delta/h={pert.delta_over_h:.10g} 1/C1={1 / report.C1:.10g} "
          f"hypothesis_met={str(report.hypothesis_met).lower()}")
    print(f"min_a0={report.min_a0:.10g} at r={report.min_a0_radius:.10g} tail_bound={report.tail_bound:.10g}")
    return report, files


def cmd_perturb(cfg: RunConfig) -> int:
    _, files = _run_perturb(cfg, "perturb")
    print(f"wrote {', '.join(str(f) for f in files)}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    report, _ = _run_perturb(cfg, "verify")
    for c in report.clauses:
        where = "" if c.ok or c.witness_radius is None else f" (first offending r={c.witness_radius:.10g})"
        print(f"{'PASS' if c.ok else 'FAIL'} {c.name}{where}")
    return EXIT_OK if report.all_ok else EXIT_NUMERIC


def cmd_sweep(cfg: RunConfig) -> int:
    cfg.validate(need_k=not cfg.k_values)
    out = cfg.output_dir()
    k_values = cfg.k_values or (cfg.k,)
    r_stars = cfg.r_star_values or (cfg.r_star,)
    deltas = cfg.delta_values or (cfg.delta_value,)
    grid = _grid(cfg)
    if cfg.mode == "bisect":
        rows = run_bisection(k_values, cfg.rho0, r_stars, deltas, cfg.Delta, grid, cfg.workers)
        header = ("k", "rho0", "r_star", "delta", "h_critical", "critical_delta_over_h", "C1", "inverse_C1", "conservative")
        files = [
            io.write_rows(out / "critical.csv", header, rows),
            io.write_json(out / "fits.json", {"critical_ratios": rows,
                                              "all_conservative": all(r["conservative"] for r in rows)}),
        ]
        for r in rows:
            print(f"k={r['k']:g} r*={r['r_star']:g} delta={r['delta']:g}: critical delta/h="
                  f"{r['critical_delta_over_h']:.6g} vs 1/C1={r['inverse_C1']:.6g} "
                  f"{'ok' if r['conservative'] else 'VIOLATED'}")
    else:
        if not cfg.h_values:
            raise ConfigError("grid sweep needs --h-values")
        points = grid_points(k_values, cfg.rho0, r_stars, deltas, cfg.h_values, cfg.Delta)
        rows = run_sweep(points, grid, cfg.workers)
        files = [
            io.write_rows(out / "sweep.csv", SWEEP_COLUMNS, rows),
            io.write_json(out / "fits.json", sweep_fits(rows)),
        ]
        bad = sum(not r["all_clauses_ok"] for r in rows)
        print(f"{len(rows)} sweep points, {bad} with failed clauses")
    _write_manifest(out, "sweep", cfg, files)
    print(f"wrote {', '.join(str(f) for f in files)}")
    return EXIT_OK


def _plot_static(r_L, a, k, log_x, path):
    chart = Chart("static metric function a(r)", "r / L", "a", log_x=log_x)
    chart.add("a(r) = 1 - 2m/r", r_L, a)
    if k is not None:
        chart.hline(1 - FluidModel(k).alpha, "1 - alpha")
    return chart.save(path)


def _plot_convergence(r_L, a, rho, r, k, path):
    model = FluidModel(k)
    chart = Chart("approach to the singular star", "r / L", "relative deviation", log_x=True, log_y=True)
    chart.add("|a - (1 - alpha)| / (1 - alpha)", r_L, abs(a - (1 - model.alpha)) / (1 - model.alpha))
    c = singular_density_coefficient(k)
    chart.add("|r^2 rho / c - 1|", r_L, abs(r**2 * rho / c - 1))
    return chart.save(path)


def _plot_a0(r_L, a0, a_static, k, log_x, path):
    chart = Chart("perturbed initial data", "r / L", "a", log_x=log_x)
    chart.add("static a", r_L, a_static)
    chart.add("a0", r_L, a0)
    if k is not None:
        chart.hline(1 - FluidModel(k).alpha, "1 - alpha")
    return chart.save(path)


def _plot_av(r_L, av, log_x, path):
    chart = Chart("d_v a at the initial slice", "r / L", "-d_v a", log_x=log_x, log_y=True)
    chart.add("-d_v a", r_L, -av)
    return chart.save(path)


def cmd_plot(args) -> int:
    cols = io.read_columns(args.input)
    model = FluidModel(args.k) if args.k is not None else None
    L = model.length_scale if model else 1.0
    log_x = not args.linear_x
    try:
        r = cols["r"]
        if args.kind == "static":
            _plot_static(r / L, cols["a"], args.k, log_x, args.output)
        elif args.kind == "convergence":
            if args.k is None:
                raise ConfigError("convergence plot needs --k")
            _plot_convergence(r / L, cols["a"], cols["rho"], r, args.k, args.output)
        elif args.kind == "a0":
            a_static = cols["a0"] - cols["a1"]
            _plot_a0(r / L, cols["a0"], a_static, args.k, log_x, args.output)
        else:
            _plot_av(r / L, cols["av"], log_x, args.output)
    except KeyError as exc:
        raise ConfigError(f"{args.input} lacks column {exc}") from None
    print(f"wrote {args.output}")
    return EXIT_OK


COMMANDS = {"static": cmd_static, "perturb": cmd_perturb, "verify": cmd_verify, "sweep": cmd_sweep}


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "plot":
            return cmd_plot(args)
        cfg = _config_from_args(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        parser.error(str(exc))
    except (StaticSolveError, FloatingPointError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""Parameter sweeps over (k, r*, delta, h) with order-stable parallel execution."""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

from .ef_frame import to_ef
from .initial_data import Perturbation, build_initial_data, critical_h, verify_theorem
from .model import FluidModel
from .scaling import fit_c2_c3
from .static_star import solve_static


@dataclass(frozen=True)
class GridParams:
    """Static-solve settings; radii in units of L."""

    r_min: float = 1e-6
    r_max: float = 1e3
    tolerance: float = 1e-10
    points_per_decade: int = 400


@dataclass(frozen=True)
class SweepPoint:
    """One perturbation; radii in units of L."""

    k: float
    rho0: float
    r_star: float
    delta: float
    h: float
    Delta: float | None = None


SWEEP_COLUMNS = (
    "k", "rho0", "r_star", "delta", "h", "Delta",
    "C1", "C4_prefactor", "delta_over_h", "hypothesis_met",
    "min_a0", "min_a0_radius", "tail_bound",
    "band_sup_av", "band_min_av", "annulus_sup_av", "band_bound",
    "all_clauses_ok", "failed_clauses",
)


@lru_cache(maxsize=16)
def static_fields(k: float, rho0: float, grid: GridParams):
    model = FluidModel(k, rho0)
    L = model.length_scale
    profile = solve_static(
        model, r_min=grid.r_min * L, r_max=grid.r_max * L,
        rtol=grid.tolerance, points_per_decade=grid.points_per_decade,
    )
    return to_ef(profile)


def run_point(point: SweepPoint, grid: GridParams) -> dict:
    """Build, verify and summarise one sweep point. Output radii are in units of L."""
    fields = static_fields(point.k, point.rho0, grid)
    L = fields.model.length_scale
    Delta = None if point.Delta is None else point.Delta * L
    h = point.h
    pert = Perturbation(point.r_star * L, point.delta * L, h, Delta)
    report = verify_theorem(build_initial_data(fields, pert))
    return {
        "k": point.k,
        "rho0": point.rho0,
        "r_star": point.r_star,
        "delta": point.delta,
        "h": point.h,
        "Delta": pert.Delta / L,
        "C1": report.C1,
        "C4_prefactor": report.constants.C4_prefactor,
        "delta_over_h": pert.delta_over_h,
        "hypothesis_met": report.hypothesis_met,
        "min_a0": report.min_a0,
        "min_a0_radius": report.min_a0_radius / L,
        "tail_bound": report.tail_bound,
        "band_sup_av": report.band_sup_av,
        "band_min_av": report.band_min_av,
        "annulus_sup_av": report.annulus_sup_av,
        "band_bound": report.constants.band_bound,
        "all_clauses_ok": report.all_ok,
        "failed_clauses": ";".join(c.name for c in report.clauses if not c.ok),
    }


def _run_star(args):
    return run_point(*args)


def _map(fn, items, workers: int):
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map yields in submission order whatever the completion order
        return list(pool.map(fn, items, chunksize=1))


def grid_points(k_values, rho0, r_star_values, delta_values, h_values, Delta=None):
    return [
        SweepPoint(k, rho0, r_star, delta, h, Delta)
        for k, r_star, delta, h in itertools.product(k_values, r_star_values, delta_values, h_values)
    ]


def run_sweep(points, grid: GridParams = GridParams(), workers: int = 1) -> list:
    return _map(_run_star, [(p, grid) for p in points], workers)


def sweep_fits(rows) -> dict:
    """Scaling fits per (k, r*) group; groups too small to fit record the reason."""
    out = {}
    keyfn = lambda r: (r["k"], r["r_star"])  # noqa: E731
    for key, group in itertools.groupby(sorted(rows, key=keyfn), key=keyfn):
        label = f"k={key[0]!r},r_star={key[1]!r}"
        try:
            out[label] = fit_c2_c3(list(group))
        except ValueError as exc:
            out[label] = {"error": str(exc)}
    return out


def _critical_star(args):
    k, rho0, r_star, delta, Delta, grid = args
    fields = static_fields(k, rho0, grid)
    L = fields.model.length_scale
    res = critical_h(fields, r_star * L, delta * L, None if Delta is None else Delta * L)
    out = res.to_dict()
    out["r_star"] = r_star
    out["delta"] = delta
    out["rho0"] = rho0
    return out


def run_bisection(k_values, rho0, r_star_values, delta_values, Delta=None,
                  grid: GridParams = GridParams(), workers: int = 1) -> list:
    """Critical delta/h for every (k, r*, delta); h_critical is dimensionless."""
    items = [
        (k, rho0, r_star, delta, Delta, grid)
        for k, r_star, delta in itertools.product(k_values, r_star_values, delta_values)
    ]
    return _map(_critical_star, items, workers)


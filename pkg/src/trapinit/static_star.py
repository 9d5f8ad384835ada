"""Static stars with p = k^2 rho: TOV integration from a regular center and tail asymptotics.

Units are geometric (G = c = 1). The mass function obeys m' = 4 pi r^2 rho
and the pressure p' = -(rho + p)(m + 4 pi r^3 p) / (r (r - 2m)).

Inside r = 10 L the system is integrated in r with state (m, rho). Beyond
that the independent variable becomes x = ln r and the state becomes
(mu, ln w) with mu = m/r and w = 4 pi r^2 rho. In those variables the
equations are autonomous with the singular solution as the fixed point
mu = w = alpha/2, so decades of tail cost a constant number of steps.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .model import FluidModel, RadialGrid, StaticProfile, deficit_angle
from .oracle import center_series, singular_density_coefficient
from .quadrature import simpson

__all__ = [
    "AsymptoticsReport",
    "StaticSolveError",
    "deficit_angle",
    "fit_asymptotics",
    "profile_invariants",
    "singular_density_coefficient",
    "solve_static",
]

log = logging.getLogger(__name__)

DEFAULT_RTOL = 1e-10
LOG_SWITCH = 10.0  # in units of L


class StaticSolveError(RuntimeError):
    """Integrator failure or loss of 1 - 2m/r > 0."""


@dataclass(frozen=True)
class _TovSolution:
    """Callable (rho, m) interpolant stitched from the two integration phases."""

    model: FluidModel
    r_start: float
    r_switch: float
    inner: object
    outer: object = field(default=None)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        flat = np.atleast_1d(r).ravel()
        rho = np.empty_like(flat)
        m = np.empty_like(flat)

        core = flat < self.r_start
        if np.any(core):
            series = center_series(self.model)
            rho[core] = series.rho(flat[core])
            m[core] = series.mass(flat[core])

        mid = (~core) & (flat <= self.r_switch)
        if np.any(mid):
            y = self.inner(flat[mid])
            m[mid] = y[0]
            rho[mid] = y[1]

        tail = flat > self.r_switch
        if np.any(tail):
            if self.outer is None:
                raise ValueError("radius beyond the integrated range")
            x = np.log(flat[tail])
            y = self.outer(x)
            m[tail] = y[0] * flat[tail]
            rho[tail] = np.exp(y[1]) / (4.0 * math.pi * flat[tail] ** 2)
        return rho.reshape(r.shape), m.reshape(r.shape)


def _inner_rhs(model: FluidModel):
    k2 = model.k2
    four_pi = 4.0 * math.pi

    def rhs(r, y):
        m, rho = y
        dm = four_pi * r * r * rho
        drho = -(1.0 + k2) * rho * (m + four_pi * k2 * r**3 * rho) / (k2 * r * (r - 2.0 * m))
        return [dm, drho]

    return rhs


def _outer_rhs(model: FluidModel):
    k2 = model.k2

    def rhs(x, y):
        mu, log_w = y
        w = math.exp(log_w)
        dmu = w - mu
        dlog_w = 2.0 - (1.0 + k2) * (mu + k2 * w) / (k2 * (1.0 - 2.0 * mu))
        return [dmu, dlog_w]

    return rhs


def _horizon_event(r, y):
    return 0.5 * r - y[0]


_horizon_event.terminal = True


def _log_horizon_event(x, y):
    return 1.0 - 2.0 * y[0]


_log_horizon_event.terminal = True


def _integrate(model: FluidModel, r_min: float, r_max: float, rtol: float) -> _TovSolution:
    L = model.length_scale
    series = center_series(model)
    r_switch = min(LOG_SWITCH * L, r_max)
    y0 = [float(series.mass(r_min)), float(series.rho(r_min))]
    atol = [rtol * 1e-6 * model.rho0 * L**3 * (r_min / L) ** 3, rtol * 1e-6 * model.rho0]
    inner = solve_ivp(
        _inner_rhs(model), (r_min, r_switch), y0, method="RK45",
        rtol=rtol, atol=atol, dense_output=True, events=_horizon_event,
    )
    if inner.status != 0:
        raise StaticSolveError(f"inner integration stopped at r={inner.t[-1]:.6g}: {inner.message}")
    if np.any(inner.y[1] <= 0.0):
        raise StaticSolveError("density lost positivity during inner integration")
    log.debug("inner phase: %d steps, %d rhs evaluations", inner.t.size, inner.nfev)

    outer_sol = None
    if r_max > r_switch:
        m_s, rho_s = inner.y[:, -1]
        y1 = [m_s / r_switch, math.log(4.0 * math.pi * r_switch**2 * rho_s)]
        outer = solve_ivp(
            _outer_rhs(model), (math.log(r_switch), math.log(r_max)), y1, method="RK45",
            rtol=rtol, atol=rtol * 1e-3, dense_output=True, events=_log_horizon_event,
        )
        if outer.status != 0:
            raise StaticSolveError(f"tail integration stopped at r={math.exp(outer.t[-1]):.6g}: {outer.message}")
        log.debug("tail phase: %d steps, %d rhs evaluations", outer.t.size, outer.nfev)
        outer_sol = outer.sol
    return _TovSolution(model, r_min, r_switch, inner.sol, outer_sol)


def solve_static(
    model: FluidModel,
    r_min: float | None = None,
    r_max: float | None = None,
    rtol: float = DEFAULT_RTOL,
    points_per_decade: int = 400,
    grid: RadialGrid | None = None,
) -> StaticProfile:
    """Integrate the static star outward and sample it.

    Radii are geometric. Defaults: r_min = 1e-6 L, r_max = 1e3 L, and a
    sinh-spaced output grid (see `RadialGrid.sinh_spaced`). An explicit
    `grid` overrides r_min, r_max and points_per_decade.
    """
    L = model.length_scale
    if grid is not None:
        r_min, r_max = grid.r_min, grid.r_max
    r_min = 1e-6 * L if r_min is None else float(r_min)
    r_max = 1e3 * L if r_max is None else float(r_max)
    if not (0.0 < r_min < r_max):
        raise ValueError("need 0 < r_min < r_max")
    if r_min > 1e-2 * L:
        raise ValueError(f"r_min={r_min:g} is too far from the center for the series start (max 1e-2 L)")
    if grid is None:
        grid = RadialGrid.sinh_spaced(r_min, r_max, L, points_per_decade)

    solution = _integrate(model, r_min, r_max, rtol)
    rho, m = solution(grid.nodes)
    if np.any(2.0 * m >= grid.nodes):
        raise StaticSolveError("1 - 2m/r lost positivity")
    return StaticProfile.from_density_mass(model, grid, rho, m, solution)


@dataclass(frozen=True)
class AsymptoticsReport:
    """Log-window tail estimates over `window` = (r_lo, r_hi)."""

    a_limit_est: float
    b_exponent_est: float
    rho_coeff_est: float
    b_coeff_est: float
    window: tuple
    residuals: dict

    def to_dict(self) -> dict:
        return {
            "a_limit_est": self.a_limit_est,
            "b_exponent_est": self.b_exponent_est,
            "rho_coeff_est": self.rho_coeff_est,
            "b_coeff_est": self.b_coeff_est,
            "window": list(self.window),
            "residuals": dict(self.residuals),
        }


def _log_mean(x, y):
    return simpson(x, y) / (x[-1] - x[0])


def fit_asymptotics(profile: StaticProfile, window) -> AsymptoticsReport:
    """Tail estimates of a(r), d log b / d log r, r^2 rho and r^-p b (p the fitted exponent).

    Averages are taken over ln r so the damped oscillation about the
    singular star averages out instead of aliasing into a point sample.
    Residuals are RMS deviations from the mean (or from the fitted line).
    """
    r_lo, r_hi = float(window[0]), float(window[1])
    if not (r_hi / r_lo >= 10.0 - 1e-12):
        raise ValueError("asymptotic window must span at least one decade")
    r = profile.r
    if r_lo < r[0] or r_hi > r[-1]:
        raise ValueError("asymptotic window outside the profile grid")
    if profile.solution is not None:
        n = max(200, int(200 * math.log10(r_hi / r_lo)))
        rs = np.geomspace(r_lo, r_hi, n)
        rho, m = profile.evaluate(rs)
    else:
        sel = (r >= r_lo) & (r <= r_hi)
        if sel.sum() < 8:
            raise ValueError("too few nodes inside the asymptotic window")
        rs, rho, m = r[sel], profile.rho[sel], profile.m[sel]
    x = np.log(rs)
    a = 1.0 - 2.0 * m / rs
    log_b = -0.5 * np.log(a) + profile.model.nu_exponent * np.log(profile.model.rho0 / rho)
    coeff = rs**2 * rho

    a_mean = _log_mean(x, a)
    c_mean = _log_mean(x, coeff)
    slope, intercept = np.polyfit(x, log_b, 1)
    fit_res = log_b - (slope * x + intercept)
    b_coeff = math.exp(_log_mean(x, log_b - slope * x))

    def rms(v):
        return float(math.sqrt(_log_mean(x, v * v)))

    return AsymptoticsReport(
        a_limit_est=float(a_mean),
        b_exponent_est=float(slope),
        rho_coeff_est=float(c_mean),
        b_coeff_est=b_coeff,
        window=(r_lo, r_hi),
        residuals={
            "a_limit": rms(a - a_mean),
            "b_exponent": rms(fit_res),
            "rho_coeff": rms(coeff - c_mean),
        },
    )


def profile_invariants(profile: StaticProfile) -> dict:
    """Node-wise checks of the properties expected of a regular static star."""
    a = profile.a
    alpha = profile.model.alpha
    return {
        "rho_decreasing": bool(np.all(np.diff(profile.rho) < 0.0)),
        "rho_bounded": bool(np.all(profile.rho > 0.0) and profile.rho[0] <= profile.model.rho0),
        "a_in_unit_interval": bool(np.all((a > 0.0) & (a <= 1.0))),
        "a_above_one_minus_alpha": bool(np.all(a > 1.0 - alpha)),
        "a_nonincreasing": bool(np.all(np.diff(a) <= 0.0)),
        "min_a": float(a.min()),
        "min_a_radius": float(profile.r[int(np.argmin(a))]),
    }

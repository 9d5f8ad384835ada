"""Independent reference computations.

Nothing in here shares a code path with the production solver or the
production quadrature: the center data come from a hand-derived power
series, the singular star is closed form, and the reference integrals use
Gauss-Legendre panels rather than Simpson weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import FluidModel, RadialGrid, StaticProfile


@dataclass(frozen=True)
class CenterSeries:
    """rho(r) = rho0 + rho2 r^2 + rho4 r^4 and the matching odd mass series."""

    model: FluidModel
    rho0: float
    rho2: float
    rho4: float

    @property
    def m3(self) -> float:
        return 4.0 * math.pi * self.rho0 / 3.0

    @property
    def m5(self) -> float:
        return 4.0 * math.pi * self.rho2 / 5.0

    @property
    def m7(self) -> float:
        return 4.0 * math.pi * self.rho4 / 7.0

    def rho(self, r):
        r2 = np.asarray(r, dtype=float) ** 2
        return self.rho0 + r2 * (self.rho2 + r2 * self.rho4)

    def mass(self, r):
        r = np.asarray(r, dtype=float)
        r2 = r * r
        return r2 * r * (self.m3 + r2 * (self.m5 + r2 * self.m7))

    def drho(self, r):
        r = np.asarray(r, dtype=float)
        return r * (2.0 * self.rho2 + 4.0 * self.rho4 * r * r)

    def log_b(self, r):
        # lambda + nu to leading order: b'/b = 4 pi (1+k^2) r rho / a
        r = np.asarray(r, dtype=float)
        return 2.0 * math.pi * (1.0 + self.model.k2) * self.rho0 * r * r

    def lambda_minus_nu(self, r):
        r = np.asarray(r, dtype=float)
        return 2.0 * math.pi / 3.0 * (1.0 - 3.0 * self.model.k2) * self.rho0 * r * r


def center_series(model: FluidModel) -> CenterSeries:
    k2 = model.k2
    if k2 == 0.0:
        raise ValueError("center series degenerates for k = 0")
    rho0 = model.rho0
    rho2 = -2.0 * math.pi / (3.0 * k2) * (1.0 + k2) * (1.0 + 3.0 * k2) * rho0**2
    rho4 = (
        4.0 * math.pi**2 * rho0**3 * (1.0 + k2) * (1.0 + 3.0 * k2)
        * (15.0 * k2 * k2 + 9.0 * k2 + 4.0) / (45.0 * k2 * k2)
    )
    return CenterSeries(model, rho0, rho2, rho4)


def tov_residual(model: FluidModel, r, rho, drho, m, dm):
    """Pointwise residuals of m' = 4 pi r^2 rho and the hydrostatic equation for p = k^2 rho.

    Both are returned relative to the size of their largest term.
    """
    k2 = model.k2
    r = np.asarray(r, dtype=float)
    res_m = (dm - 4.0 * math.pi * r**2 * rho) / np.maximum(abs(dm), 4.0 * math.pi * r**2 * abs(rho))
    lhs = k2 * drho * r * (r - 2.0 * m)
    rhs = -(1.0 + k2) * rho * (m + 4.0 * math.pi * k2 * r**3 * rho)
    res_p = (lhs - rhs) / np.maximum(abs(lhs), abs(rhs))
    return res_m, res_p


def singular_density_coefficient(k: float) -> float:
    """c with rho = c / r^2 an exact static solution; satisfies 8 pi c = alpha."""
    if not (0.0 < k <= 1.0):
        raise ValueError(f"k must lie in (0, 1], got {k!r}")
    k2 = k * k
    return k2 / (2.0 * math.pi * ((1.0 + k2) ** 2 + 4.0 * k2))


def singular_profile(model: FluidModel, grid: RadialGrid) -> StaticProfile:
    """rho = c/r^2, m = (alpha/2) r on `grid`; nu keeps the rho0 normalization of `model`."""
    r = grid.nodes
    c = singular_density_coefficient(model.k)
    rho = c / r**2
    m = 0.5 * model.alpha * r

    def solution(x):
        x = np.asarray(x, dtype=float)
        return c / x**2, 0.5 * model.alpha * x

    return StaticProfile.from_density_mass(model, grid, rho, m, solution)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


def reference_quadrature(f, a: float, b: float, splits=(), panels: int = 64) -> float:
    """Integral of the callable `f` over [a, b] on 20-point Gauss-Legendre panels.

    `splits` are interior points where `f` may jump; panels never straddle one.
    `f` must accept an array of abscissae.
    """
    edges = [a] + sorted(s for s in splits if a < s < b) + [b]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        cuts = np.linspace(lo, hi, panels + 1)
        half = 0.5 * np.diff(cuts)
        mid = 0.5 * (cuts[:-1] + cuts[1:])
        x = mid[:, None] + half[:, None] * _GL_NODES[None, :]
        vals = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
        total += float(np.sum(half * (vals @ _GL_WEIGHTS)))
    return total


def reference_cumulative(f, nodes, splits=(), panels: int = 8) -> np.ndarray:
    """Running integral of `f` from nodes[0] to every node, panel-wise Gauss-Legendre."""
    nodes = np.asarray(nodes, dtype=float)
    out = np.zeros_like(nodes)
    for i in range(1, nodes.size):
        out[i] = out[i - 1] + reference_quadrature(f, nodes[i - 1], nodes[i], splits, panels)
    return out

"""Core value types shared by the solver, the EF transform and the oracles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


def deficit_angle(k: float) -> float:
    """Conical deficit angle 4k^2 / ((1+k^2)^2 + 4k^2) of the asymptotic geometry."""
    if not (0.0 <= k <= 1.0) or math.isnan(k):
        raise ValueError(f"sound speed k must lie in [0, 1], got {k!r}")
    k2 = k * k
    return 4.0 * k2 / ((1.0 + k2) ** 2 + 4.0 * k2)


@dataclass(frozen=True)
class FluidModel:
    """Linear equation of state p = k^2 rho with central density rho0 (G = c = 1)."""

    k: float
    rho0: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.k < 1.0):
            raise ValueError(f"k must lie in (0, 1), got {self.k!r}")
        if not (self.rho0 > 0.0) or math.isinf(self.rho0):
            raise ValueError(f"rho0 must be positive and finite, got {self.rho0!r}")

    @property
    def k2(self) -> float:
        return self.k * self.k

    @property
    def alpha(self) -> float:
        return deficit_angle(self.k)

    @property
    def length_scale(self) -> float:
        """L = (4 pi rho0)^(-1/2); the natural radius unit of the static problem."""
        return 1.0 / math.sqrt(4.0 * math.pi * self.rho0)

    @property
    def nu_exponent(self) -> float:
        # e^nu = (rho0/rho)^(k^2/(1+k^2))
        return self.k2 / (1.0 + self.k2)


@dataclass(frozen=True, eq=False)
class RadialGrid:
    nodes: np.ndarray

    def __post_init__(self):
        nodes = _frozen(self.nodes)
        if nodes.ndim != 1 or nodes.size < 3:
            raise ValueError("grid needs at least three nodes")
        if nodes[0] <= 0.0:
            raise ValueError("grid must exclude r = 0")
        if np.any(np.diff(nodes) <= 0.0):
            raise ValueError("grid nodes must be strictly increasing")
        object.__setattr__(self, "nodes", nodes)

    @property
    def r_min(self) -> float:
        return float(self.nodes[0])

    @property
    def r_max(self) -> float:
        return float(self.nodes[-1])

    def __len__(self) -> int:
        return self.nodes.size

    @classmethod
    def sinh_spaced(
        cls,
        r_min: float,
        r_max: float,
        scale: float,
        points_per_decade: int = 400,
    ) -> "RadialGrid":
        """Nodes r = scale*sinh(u), u uniform: evenly spaced inside `scale`, geometric beyond it.

        `points_per_decade` counts nodes per factor of ten in the geometric tail.
        """
        if not (0.0 < r_min < r_max):
            raise ValueError("need 0 < r_min < r_max")
        u0 = math.asinh(r_min / scale)
        u1 = math.asinh(r_max / scale)
        du = math.log(10.0) / points_per_decade
        n = max(int(math.ceil((u1 - u0) / du)), 2) + 1
        nodes = scale * np.sinh(np.linspace(u0, u1, n))
        nodes[0], nodes[-1] = r_min, r_max
        return cls(nodes)

    def with_band(self, lo: float, hi: float, min_cells: int = 8) -> "RadialGrid":
        """Replace the nodes in [lo, hi] by a uniform run with lo and hi as exact nodes.

        The run is at least as fine as the surrounding grid and has at least
        `min_cells` cells.
        """
        nodes = np.asarray(self.nodes, dtype=float)
        if not (nodes[0] < lo < hi < nodes[-1]):
            raise ValueError(f"band [{lo}, {hi}] must lie strictly inside the grid")
        i = int(np.searchsorted(nodes, lo))
        spacing = nodes[i] - nodes[i - 1]
        cells = max(min_cells, int(math.ceil((hi - lo) / spacing)))
        pad = 0.3 * spacing
        keep = (nodes < lo - pad) | (nodes > hi + pad)
        keep[0] = keep[-1] = True
        band = np.linspace(lo, hi, cells + 1)
        band[0], band[-1] = lo, hi
        return RadialGrid(np.union1d(nodes[keep], band))


@dataclass(frozen=True, eq=False)
class StaticProfile:
    """A static star sampled on a grid: density, mass function and metric exponents.

    `solution`, when present, evaluates (rho, m) at arbitrary radii with the
    integrator's own interpolant so the profile can be resampled without
    degrading accuracy.
    """

    model: FluidModel
    grid: RadialGrid
    rho: np.ndarray
    m: np.ndarray
    lam: np.ndarray
    nu: np.ndarray
    solution: Optional[Callable[[np.ndarray], tuple]] = field(default=None, repr=False)

    def __post_init__(self):
        n = len(self.grid)
        for name in ("rho", "m", "lam", "nu"):
            arr = _frozen(getattr(self, name))
            if arr.shape != (n,):
                raise ValueError(f"{name} has shape {arr.shape}, expected ({n},)")
            object.__setattr__(self, name, arr)

    @property
    def r(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def a(self) -> np.ndarray:
        return np.exp(-2.0 * self.lam)

    @property
    def b(self) -> np.ndarray:
        return np.exp(self.lam + self.nu)

    @classmethod
    def from_density_mass(cls, model, grid, rho, m, solution=None) -> "StaticProfile":
        r = grid.nodes
        rho = np.asarray(rho, dtype=float)
        m = np.asarray(m, dtype=float)
        lam = -0.5 * np.log1p(-2.0 * m / r)
        nu = model.nu_exponent * np.log(model.rho0 / rho)
        return cls(model, grid, rho, m, lam, nu, solution)

    def evaluate(self, r):
        """(rho, m) at arbitrary radii, through the solver interpolant if available."""
        r = np.asarray(r, dtype=float)
        if self.solution is not None:
            return self.solution(r)
        rho = np.exp(np.interp(r, self.r, np.log(self.rho)))
        m = np.interp(r, self.r, self.m)
        return rho, m

    def b_at(self, r) -> np.ndarray:
        rho, m = self.evaluate(r)
        r = np.asarray(r, dtype=float)
        lam = -0.5 * np.log1p(-2.0 * m / r)
        nu = self.model.nu_exponent * np.log(self.model.rho0 / rho)
        return np.exp(lam + nu)

    def resample(self, grid: RadialGrid) -> "StaticProfile":
        if self.solution is None:
            raise ValueError("profile carries no interpolant; cannot resample")
        rho, m = self.solution(grid.nodes)
        return StaticProfile.from_density_mass(self.model, grid, rho, m, self.solution)

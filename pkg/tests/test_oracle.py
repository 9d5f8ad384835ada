import math

import numpy as np
import pytest

from trapinit import FluidModel, RadialGrid
from trapinit.oracle import (
    center_series,
    reference_quadrature,
    singular_density_coefficient,
    singular_profile,
    tov_residual,
)


def test_center_series_leading_coefficients():
    s = center_series(FluidModel(0.5, 2.0))
    assert s.m3 == pytest.approx(4 * math.pi / 3 * 2.0, rel=1e-15)
    assert s.rho0 == 2.0


def test_rho2_hand_value_k1():
    # k = 1 sits outside FluidModel's open interval, so build the series by hand
    model = FluidModel(0.5)
    object.__setattr__(model, "k", 1.0)
    assert center_series(model).rho2 == pytest.approx(-16 * math.pi / 3, rel=1e-15)


def test_center_series_rejects_dust():
    model = FluidModel(0.5)
    object.__setattr__(model, "k", 0.0)
    with pytest.raises(ValueError):
        center_series(model)


@pytest.mark.parametrize("k", [0.2, 0.5, 0.8])
def test_series_plug_back(k):
    model = FluidModel(k)
    s = center_series(model)
    r = 1e-4 * model.length_scale
    # m' from the series is exactly 4 pi r^2 rho by construction
    dm = 4 * math.pi * r**2 * s.rho(r)
    res_m, res_p = tov_residual(model, r, s.rho(r), s.drho(r), s.mass(r), dm)
    assert abs(res_m) < 1e-15
    assert abs(res_p) < 1e-12


@pytest.mark.parametrize("k", [0.2, 0.5, 0.8])
def test_series_residual_shrinks_like_r4(k):
    # truncated drho is O(r^5) off against p' ~ r, so halving r cuts the residual ~16x;
    # a wrong rho4 would leave an O(r^2) residual and a ratio near 4
    model = FluidModel(k)
    s = center_series(model)
    L = model.length_scale
    res = []
    for r in (0.02 * L, 0.01 * L):
        dm = 4 * math.pi * r**2 * s.rho(r)
        res.append(abs(tov_residual(model, r, s.rho(r), s.drho(r), s.mass(r), dm)[1]))
    assert 14 < res[0] / res[1] < 18


def test_singular_coefficient_values():
    assert singular_density_coefficient(1.0) == pytest.approx(1 / (16 * math.pi), rel=1e-15)
    assert singular_density_coefficient(1e-8) < 1e-16
    with pytest.raises(ValueError):
        singular_density_coefficient(0.0)


@pytest.mark.parametrize("k", [0.1, 0.3, 0.6, 0.9, 0.99])
def test_singular_coefficient_ties_to_alpha(k):
    assert 8 * math.pi * singular_density_coefficient(k) == pytest.approx(FluidModel(k).alpha, rel=1e-14)


@pytest.mark.parametrize("k", [0.3, 0.7])
def test_singular_profile_exact(k):
    model = FluidModel(k)
    grid = RadialGrid(np.geomspace(1e-3, 1e4, 50))
    prof = singular_profile(model, grid)
    np.testing.assert_allclose(prof.a, 1 - model.alpha, rtol=1e-14)
    r = grid.nodes
    c = singular_density_coefficient(k)
    res_m, res_p = tov_residual(model, r, prof.rho, -2 * c / r**3, prof.m, np.full_like(r, 0.5 * model.alpha))
    assert np.max(np.abs(res_m)) < 1e-13
    assert np.max(np.abs(res_p)) < 1e-13


def test_reference_quadrature_polynomial():
    assert reference_quadrature(lambda s: s**2, 0.0, 1.0) == pytest.approx(1 / 3, abs=1e-14)


def test_reference_quadrature_split_jump():
    f = lambda s: np.where((s >= 0.3) & (s <= 0.7), 2.0, 1.0) * np.cos(s)  # noqa: E731
    exact = math.sin(1.0) + (math.sin(0.7) - math.sin(0.3))
    assert reference_quadrature(f, 0.0, 1.0, splits=(0.3, 0.7)) == pytest.approx(exact, abs=1e-14)

import math

import numpy as np
import pytest
from scipy.special import erf

from trapinit import FluidModel, RadialGrid, static_constraint_residual, to_ef
from trapinit.ef_frame import EfStaticFields, ef_invariants, integral_a, metric_determinant, velocity_factor
from trapinit.oracle import reference_cumulative, reference_quadrature

from conftest import ef, solved


def test_pointwise_identities(k):
    f = ef(k)
    prof = f.profile
    np.testing.assert_array_equal(f.V, -0.5 * f.a)
    np.testing.assert_allclose(f.rho, prof.rho, rtol=1e-14)
    np.testing.assert_allclose(f.a, 1 - 2 * prof.m / prof.r, rtol=1e-13)
    inv = ef_invariants(f)
    assert inv["a_in_unit_interval"] and inv["b_at_least_one"] and inv["b_increasing"]
    assert inv["v_shift_increasing"] and inv["velocity_is_minus_half_a"]


def test_v_shift_increments(k):
    f = ef(k)
    prof = f.profile
    L = prof.model.length_scale

    # e^(lambda - nu) = e^(2 lambda) / b = 1 / (a b)
    def e_lam_minus_nu(s):
        rho, m = prof.evaluate(s)
        return 1.0 / ((1 - 2 * m / s) * prof.b_at(s))

    r = f.r
    for lo_L, hi_L in ((0.01, 1.0), (1.0, 30.0)):
        i, j = np.searchsorted(r, [lo_L * L, hi_L * L])
        ref = reference_quadrature(e_lam_minus_nu, r[i], r[j])
        assert f.v_shift[j] - f.v_shift[i] == pytest.approx(ref, rel=1e-9)
    assert f.v_shift[0] == pytest.approx(r[0], rel=1e-9)


def test_b_log_derivative(k):
    # ln b(r2) - ln b(r1) = int 4 pi (1 + k^2) s rho / a ds
    prof = solved(k)
    K = prof.model.k2
    L = prof.model.length_scale

    def dlog_b(s):
        rho, m = prof.evaluate(s)
        return 4 * math.pi * (1 + K) * s * rho / (1 - 2 * m / s)

    for r1, r2 in ((0.01 * L, 1.0 * L), (1.0 * L, 100.0 * L)):
        lb = np.log(prof.b_at(np.array([r1, r2])))
        assert lb[1] - lb[0] == pytest.approx(reference_quadrature(dlog_b, r1, r2), rel=1e-9)


def test_a0_form_is_an_identity(k):
    res = static_constraint_residual(ef(k), "a0")
    assert res.max_abs < 1e-8


def test_aint1_form_is_not(k):
    # the (2 k^2 |V| + 1) weighting does not reproduce the static a
    res = static_constraint_residual(ef(k), "aint1")
    assert res.max_abs > 1e-2


def test_velocity_factor_forms():
    m = FluidModel(0.5)
    assert velocity_factor(m, "aint1") == pytest.approx(0.5)
    assert velocity_factor(m, "a0") == pytest.approx(2 * 0.75 / 1.25)
    with pytest.raises(ValueError):
        velocity_factor(m, "other")


def test_flat_data_gives_unit_a():
    grid = RadialGrid(np.linspace(0.01, 5.0, 101))
    n = len(grid)
    one, zero = np.ones(n), np.zeros(n)
    flat = EfStaticFields(FluidModel(0.5), grid, one, one, zero, -0.5 * one, grid.nodes.copy())
    np.testing.assert_array_equal(integral_a(flat, "a0"), one)
    np.testing.assert_array_equal(integral_a(flat, "aint1"), one)


def _gaussian_fields(n):
    # rho = rho0 exp(-s^2), analytic m, b from b'/b = 4 pi (1 + k^2) s rho / a
    model = FluidModel(0.5, 0.05)
    K = model.k2
    r = np.linspace(1e-3, 3.0, n + 1)

    def rho(s):
        return model.rho0 * np.exp(-s * s)

    def mass(s):
        return 4 * math.pi * model.rho0 * (math.sqrt(math.pi) / 4 * erf(s) - 0.5 * s * np.exp(-s * s))

    def dlog_b(s):
        return 4 * math.pi * (1 + K) * s * rho(s) / (1 - 2 * mass(s) / s)

    a = 1 - 2 * mass(r) / r
    b = np.exp(reference_cumulative(dlog_b, r, panels=2))
    M = rho(r) / a
    return EfStaticFields(model, RadialGrid(r), a, b, M, -0.5 * a, np.zeros_like(r))


def test_manufactured_density_fourth_order():
    # the center cell adds an h^5 term that needs spacing below ~0.04 to fade
    errs = []
    for n in (80, 160, 320):
        f = _gaussian_fields(n)
        err = np.abs(integral_a(f, "a0") - f.a)
        errs.append(err[:: n // 40].max())
    assert 12 < errs[0] / errs[1] < 20
    assert 12 < errs[1] / errs[2] < 20


def test_metric_determinant_negative(k):
    det = metric_determinant(ef(k))
    assert np.all(det < 0)
    np.testing.assert_allclose(det, -ef(k).b ** 2, rtol=0)


def test_to_ef_round_trip_through_profile(k):
    f = to_ef(solved(k))
    np.testing.assert_allclose(f.M * f.a, solved(k).rho, rtol=1e-14)

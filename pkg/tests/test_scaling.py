import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trapinit import fit_c2_c3
from trapinit.scaling import fit_power_law
from trapinit.sweep import GridParams, grid_points, run_sweep, sweep_fits


def _design():
    d, h = np.meshgrid([0.01, 0.02, 0.05, 0.1], [1.0, 3.0, 10.0, 30.0])
    return d.ravel(), h.ravel()


def test_exact_power_law_recovered():
    d, h = _design()
    fit = fit_power_law(d, h, -2.5 * d / h**3)
    assert fit.p_delta == pytest.approx(1.0, abs=1e-12)
    assert fit.p_h == pytest.approx(-3.0, abs=1e-12)
    assert np.exp(fit.log_coeff) == pytest.approx(2.5, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 2**31 - 1))
def test_confidence_intervals_cover_truth(pd, ph, seed):
    d, h = _design()
    noise = np.random.default_rng(seed).normal(0, 1e-3, d.size)
    fit = fit_power_law(d, h, d**pd * h**ph * np.exp(noise))
    # a 95% interval widened 3x is essentially never missed
    for (lo, hi), truth in ((fit.ci_delta, pd), (fit.ci_h, ph)):
        mid, half = 0.5 * (lo + hi), 1.5 * (hi - lo)
        assert mid - half <= truth <= mid + half


def test_degenerate_sweeps_rejected():
    d = np.array([0.1, 0.1, 0.1, 0.1, 0.1])
    h = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    with pytest.raises(ValueError):
        fit_power_law(d, h, d / h)
    with pytest.raises(ValueError):
        fit_power_law(h / 10, h, h)  # delta proportional to h
    with pytest.raises(ValueError):
        fit_power_law([0.1, 0.2, 0.3], [1.0, 2.0, 5.0], [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        fit_c2_c3([{"delta": 0.1, "h": 1.0, "band_sup_av": -1.0, "annulus_sup_av": -1.0}] * 3)


def test_sweep_fits_annulus_exponents():
    points = grid_points([0.6], 1.0, [2.0], [0.02, 0.05, 0.1], [20.0, 50.0, 150.0, 500.0])
    rows = run_sweep(points, GridParams(points_per_decade=100))
    assert all(r["all_clauses_ok"] for r in rows)
    fits = sweep_fits(rows)
    (label, fit), = fits.items()
    assert label.startswith("k=0.6")
    # annulus sup of d_v a scales like delta / h
    assert -1.3 <= fit["annulus"]["exponent_h"] <= -0.7
    assert 0.7 <= fit["annulus"]["exponent_delta"] <= 1.3
    assert fit["C2_est"] > 0 and fit["C3_est"] > 0
    assert set(fit["band_dominant_bound"]) <= {"C2", "C4"}


def test_small_group_reports_error():
    rows = run_sweep(grid_points([0.6], 1.0, [2.0], [0.1], [10.0, 100.0]), GridParams(points_per_decade=50))
    fits = sweep_fits(rows)
    assert "error" in next(iter(fits.values()))

"""Log-log regression of measured d_v a suprema against the perturbation parameters."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats


@dataclass(frozen=True)
class PowerLawFit:
    """|y| = C * delta^p_delta * h^p_h, fitted by least squares in logs."""

    log_coeff: float
    p_delta: float
    p_h: float
    ci_delta: tuple
    ci_h: tuple
    rms_residual: float
    n: int

    def to_dict(self) -> dict:
        return {
            "coefficient": math.exp(self.log_coeff),
            "exponent_delta": self.p_delta,
            "exponent_h": self.p_h,
            "ci95_delta": list(self.ci_delta),
            "ci95_h": list(self.ci_h),
            "rms_log_residual": self.rms_residual,
            "n": self.n,
        }


def fit_power_law(delta, h, y, confidence: float = 0.95) -> PowerLawFit:
    delta = np.asarray(delta, dtype=float)
    h = np.asarray(h, dtype=float)
    y = np.abs(np.asarray(y, dtype=float))
    if not (delta.size == h.size == y.size):
        raise ValueError("delta, h and y must have equal length")
    if np.any(y <= 0.0) or np.any(delta <= 0.0) or np.any(h <= 0.0) or not np.all(np.isfinite(h)):
        raise ValueError("power-law fit needs positive finite data")
    X = np.column_stack([np.ones_like(delta), np.log(delta), np.log(h)])
    n = X.shape[0]
    if n < 4 or np.linalg.matrix_rank(X) < 3:
        raise ValueError("degenerate sweep: delta and h must vary independently")
    ly = np.log(y)
    coef, *_ = np.linalg.lstsq(X, ly, rcond=None)
    resid = ly - X @ coef
    dof = n - 3
    s2 = float(resid @ resid) / dof
    cov = s2 * np.linalg.inv(X.T @ X)
    t = stats.t.ppf(0.5 + 0.5 * confidence, dof)
    se = np.sqrt(np.diag(cov))
    ci = [(float(c - t * e), float(c + t * e)) for c, e in zip(coef, se)]
    return PowerLawFit(
        float(coef[0]), float(coef[1]), float(coef[2]), ci[1], ci[2],
        float(math.sqrt(float(resid @ resid) / n)), n,
    )


MIN_SWEEP_POINTS = 8


def fit_c2_c3(rows) -> dict:
    """Scaling exponents of the band and annulus suprema of d_v a over a (delta, h) sweep.

    `rows` are mappings with keys delta, h, band_sup_av and annulus_sup_av
    (plus C4_prefactor for the bound comparison). The band supremum is
    fitted against delta and h to test the -C2 delta/h^3 and -C4/h^2
    shapes; the annulus supremum against delta/h. The largest constants
    consistent with every sweep point are reported as C2_est and C3_est.
    """
    rows = [r for r in rows if math.isfinite(r["h"])]
    if len(rows) < MIN_SWEEP_POINTS:
        raise ValueError(f"need at least {MIN_SWEEP_POINTS} finite-h sweep points")
    delta = np.array([r["delta"] for r in rows])
    h = np.array([r["h"] for r in rows])
    band = np.array([r["band_sup_av"] for r in rows])
    ann = np.array([r["annulus_sup_av"] for r in rows], dtype=float)
    if np.any(band >= 0.0) or np.any(ann >= 0.0):
        raise ValueError("suprema must be negative to fit magnitudes")
    band_fit = fit_power_law(delta, h, band)
    ann_fit = fit_power_law(delta, h, ann)
    c2 = float(np.min(np.abs(band) * h**3 / delta))
    c3 = float(np.min(np.abs(ann) * h / delta))
    out = {
        "band": band_fit.to_dict(),
        "annulus": ann_fit.to_dict(),
        "C2_est": c2,
        "C3_est": c3,
    }
    if all("C4_prefactor" in r for r in rows):
        c4 = np.array([r["C4_prefactor"] for r in rows])
        c2_bound = c2 * delta / h**3
        c4_bound = c4 / h**2
        out["band_dominant_bound"] = ["C2" if a > b else "C4" for a, b in zip(c2_bound, c4_bound)]
    return out

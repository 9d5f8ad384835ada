"""Static stars in generalized Eddington-Finkelstein form.

With v = t + int_0^r e^(lambda - nu) ds the static metric becomes
-a b^2 dv^2 + 2 b dv dr + r^2 dOmega^2, where a = e^(-2 lambda) and
b = e^(lambda + nu). The fluid enters the initial-data construction only
through the normalized mass M = rho / a and velocity V = -a / 2.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .model import FluidModel, RadialGrid, StaticProfile, _frozen
from .oracle import center_series
from .quadrature import cell_integrals

log = logging.getLogger(__name__)

VELOCITY_FORMS = ("aint1", "a0")


@dataclass(frozen=True, eq=False)
class EfStaticFields:
    model: FluidModel
    grid: RadialGrid
    a: np.ndarray
    b: np.ndarray
    M: np.ndarray
    V: np.ndarray
    v_shift: np.ndarray
    profile: Optional[StaticProfile] = field(default=None, repr=False)

    def __post_init__(self):
        for name in ("a", "b", "M", "V", "v_shift"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    @property
    def r(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def rho(self) -> np.ndarray:
        return self.M * self.a


def to_ef(profile: StaticProfile) -> EfStaticFields:
    r = profile.r
    a = np.exp(-2.0 * profile.lam)
    b = np.exp(profile.lam + profile.nu)
    M = profile.rho / a
    V = -0.5 * a

    series = center_series(profile.model)
    r0 = r[0]
    # int_0^{r_min} e^(lambda - nu) ds with e^(lambda - nu) = 1 + c2 s^2 + ...
    c2 = float(series.lambda_minus_nu(1.0))
    first = r0 + c2 * r0**3 / 3.0
    v_shift = first + np.concatenate([[0.0], np.cumsum(cell_integrals(r, np.exp(profile.lam - profile.nu)))])
    return EfStaticFields(profile.model, profile.grid, a, b, M, V, v_shift, profile)


def velocity_factor(model: FluidModel, form: str):
    """Coefficient q in the integrand factor (q |V| + 1) of the two printed integral forms."""
    k2 = model.k2
    if form == "aint1":
        return 2.0 * k2
    if form == "a0":
        return 2.0 * (1.0 - k2) / (1.0 + k2)
    raise ValueError(f"unknown form {form!r}; expected one of {VELOCITY_FORMS}")


def integral_a(fields: EfStaticFields, form: str = "a0", abs_v=None) -> np.ndarray:
    """a(r) = 1 - 4 pi (1+k^2)/(r b(r)) int_0^r b M (q |V| + 1) s^2 ds at every node.

    b(r) is factored out of the integral so one running sum serves all r.
    The cell [0, r_min] takes the integrand as (its value at r_min) * (s/r_min)^2,
    the leading behaviour of a regular center.
    """
    model = fields.model
    q = velocity_factor(model, form)
    r = fields.r
    abs_v = np.abs(fields.V) if abs_v is None else np.asarray(abs_v, dtype=float)
    integrand = fields.b * fields.M * (q * abs_v + 1.0) * r**2
    head = integrand[0] * r[0] / 3.0
    running = head + np.concatenate([[0.0], np.cumsum(cell_integrals(r, integrand))])
    return 1.0 - 4.0 * math.pi * (1.0 + model.k2) * running / (r * fields.b)


@dataclass(frozen=True)
class ConstraintResidual:
    form: str
    residual: np.ndarray
    max_abs: float
    argmax_radius: float


def static_constraint_residual(fields: EfStaticFields, form: str = "a0") -> ConstraintResidual:
    """a(r) minus the integral representation evaluated on the static (M, V, b)."""
    res = fields.a - integral_a(fields, form)
    i = int(np.argmax(np.abs(res)))
    log.info("constraint residual (%s form): max %.3e at r=%.6g", form, abs(res[i]), fields.r[i])
    return ConstraintResidual(form, _frozen(res), float(abs(res[i])), float(fields.r[i]))


def ef_invariants(fields: EfStaticFields) -> dict:
    a, b = fields.a, fields.b
    return {
        "a_in_unit_interval": bool(np.all((a > 0.0) & (a <= 1.0))),
        "a_nonincreasing": bool(np.all(np.diff(a) <= 0.0)),
        "b_at_least_one": bool(np.all(b >= 1.0)),
        "b_increasing": bool(np.all(np.diff(b) > 0.0)),
        "v_shift_increasing": bool(np.all(np.diff(fields.v_shift) > 0.0)),
        "velocity_is_minus_half_a": bool(np.array_equal(fields.V, -0.5 * a)),
    }


def metric_determinant(fields: EfStaticFields) -> np.ndarray:
    """det of the (v, r) block: g_rr = 0, so it is -g_vr^2 = -b^2 whatever a is."""
    return -fields.b**2

"""(r*, delta, h)-perturbed initial data and checks of the admissibility estimates.

The perturbation multiplies the static velocity by (1 + 1/h) on the closed
band [r* - delta, r* + delta]. Because M and b are unchanged, the new metric
function splits as a0 = a_static + a1 where

    a1(r) = -4 pi (1 - k^2) / (h r b(r)) * int_{r*-delta}^{min(r, r*+delta)} b rho s^2 ds,

which vanishes identically inside the band's inner edge and decays like
1/(r b) beyond its outer edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .ef_frame import EfStaticFields, to_ef, velocity_factor
from .model import FluidModel, RadialGrid, _frozen
from .quadrature import cumulative_simpson, cumulative_simpson_split


@dataclass(frozen=True)
class Perturbation:
    r_star: float
    delta: float
    h: float
    Delta: float | None = None

    def __post_init__(self):
        if self.Delta is None:
            object.__setattr__(self, "Delta", 0.5 * self.r_star)
        r_star, delta, Delta, h = self.r_star, self.delta, self.Delta, self.h
        if not (r_star > 0.0):
            raise ValueError("r_star must be positive")
        if not (0.0 < Delta < r_star):
            raise ValueError("need 0 < Delta < r_star")
        if not (0.0 < delta < Delta):
            raise ValueError("need 0 < delta < Delta")
        if delta > 0.5 * r_star:
            raise ValueError("need delta <= r_star / 2")
        if not (h > 0.0):
            raise ValueError("h must be positive (inf means no perturbation)")

    @property
    def band(self) -> tuple:
        return self.r_star - self.delta, self.r_star + self.delta

    @property
    def inv_h(self) -> float:
        return 0.0 if math.isinf(self.h) else 1.0 / self.h

    @property
    def band_factor(self) -> float:
        """(2h + 1)/h^2, written so h = inf gives 0."""
        inv = self.inv_h
        return 2.0 * inv + inv * inv

    @property
    def delta_over_h(self) -> float:
        return self.delta * self.inv_h


@dataclass(frozen=True, eq=False)
class InitialDataSet:
    model: FluidModel
    pert: Perturbation
    grid: RadialGrid
    chi: np.ndarray
    a_static: np.ndarray
    M0: np.ndarray
    V0: np.ndarray
    a0: np.ndarray
    b0: np.ndarray
    a1: np.ndarray
    a0_quad: np.ndarray
    av: np.ndarray | None = field(default=None)
    av_expanded: np.ndarray | None = field(default=None)
    fields: EfStaticFields | None = field(default=None, repr=False)

    def __post_init__(self):
        for name in ("chi", "a_static", "M0", "V0", "a0", "b0", "a1", "a0_quad", "av", "av_expanded"):
            val = getattr(self, name)
            if val is not None:
                object.__setattr__(self, name, _frozen(val))

    @property
    def r(self) -> np.ndarray:
        return self.grid.nodes


BAND_MIN_CELLS = 8


def _aligned_fields(fields: EfStaticFields, pert: Perturbation) -> EfStaticFields:
    r = fields.r
    lo, hi = pert.band
    if lo <= r[0] or hi >= r[-1]:
        raise ValueError(f"perturbation band [{lo:g}, {hi:g}] lies outside the grid [{r[0]:g}, {r[-1]:g}]")
    if np.any(r == lo) and np.any(r == hi):
        return fields
    if fields.profile is None or fields.profile.solution is None:
        raise ValueError("band edges are not grid nodes and the fields cannot be resampled")
    return to_ef(fields.profile.resample(fields.grid.with_band(lo, hi, BAND_MIN_CELLS)))


def build_initial_data(fields: EfStaticFields, pert: Perturbation) -> InitialDataSet:
    """Perturbed fields on the static grid with the band edges inserted as nodes.

    a0 is the static a plus the band integral a1. a0_quad independently
    evaluates the full perturbed integral from the center, split at the
    band edges, and should agree with a0 to quadrature accuracy.
    """
    fields = _aligned_fields(fields, pert)
    model = fields.model
    r = fields.r
    lo, hi = pert.band
    i_lo = int(np.flatnonzero(r == lo)[0])
    i_hi = int(np.flatnonzero(r == hi)[0])
    chi = np.zeros(r.size)
    chi[i_lo:i_hi + 1] = 1.0
    inv_h = pert.inv_h

    V0 = fields.V * (1.0 + chi * inv_h)
    if not np.all(V0 < 0.0):
        raise ValueError("perturbed velocity must stay negative")

    # a1: running band integral, frozen past the outer edge
    band_r = r[i_lo:i_hi + 1]
    band_int = cumulative_simpson(band_r, (fields.b * fields.M * fields.a)[i_lo:i_hi + 1] * band_r**2)
    running = np.zeros(r.size)
    running[i_lo:i_hi + 1] = band_int
    running[i_hi + 1:] = band_int[-1]
    a1 = -4.0 * math.pi * (1.0 - model.k2) * inv_h * running / (r * fields.b)
    a0 = fields.a + a1

    # full integral with one-sided integrand values on each piece
    q = velocity_factor(model, "a0")
    base = fields.b * fields.M * r**2

    def piece(weight):
        return lambda idx: base[idx] * (1.0 + 0.5 * q * (1.0 + weight * inv_h) * fields.a[idx])

    head = float(piece(0.0)(np.array([0]))[0]) * r[0] / 3.0
    total = cumulative_simpson_split(r, [piece(0.0), piece(1.0), piece(0.0)], [i_lo, i_hi], initial=head)
    a0_quad = 1.0 - 4.0 * math.pi * (1.0 + model.k2) * total / (r * fields.b)

    data = InitialDataSet(
        model=model, pert=pert, grid=fields.grid, chi=chi, a_static=fields.a,
        M0=fields.M, V0=V0, a0=a0, b0=fields.b, a1=a1, a0_quad=a0_quad, fields=fields,
    )
    direct, expanded = compute_av(data, fields)
    return replace(data, av=direct, av_expanded=expanded)


def compute_av(data: InitialDataSet, fields: EfStaticFields | None = None):
    """d_v a at v0: the direct form 2 pi r b M (a0^2 - 4 V0^2) and its expanded rewrite.

    `fields` must live on the data's grid; it defaults to the aligned static
    fields the data were built from.
    """
    fields = data.fields if fields is None else fields
    r = data.r
    if fields.r.shape != r.shape:
        raise ValueError("static fields and initial data live on different grids")
    pref = 2.0 * math.pi * r * fields.b * fields.M
    two_v = 2.0 * np.abs(data.V0)
    # factored difference of squares: squaring first loses ~log10(a/a1) digits in the tail
    direct = pref * (data.a0 - two_v) * (data.a0 + two_v)
    # a0 - a is exact in floating point (Sterbenz), so both forms see the same perturbation
    a1 = data.a0 - fields.a
    expanded = pref * (a1 * (data.a0 + fields.a) - data.chi * fields.a**2 * data.pert.band_factor)
    return direct, expanded


@dataclass(frozen=True)
class TrapVerdict:
    no_trapped: bool
    min_a0: float
    witness_radius: float
    tail_bound: float


def tail_floor(data: InitialDataSet) -> float:
    """Lower bound for the static a beyond the grid.

    The static a oscillates about 1 - alpha with decaying amplitude, so the
    smaller of 1 - alpha and the minimum over the last two decades of the
    grid bounds it from below past r_max (one oscillation spans well under
    two decades in r).
    """
    r = data.r
    tail = data.a_static[r >= r[-1] / 100.0]
    return float(min(1.0 - data.model.alpha, tail.min()))


def check_no_trapped(data: InitialDataSet) -> TrapVerdict:
    """No sphere with a0 < 0: positivity on the grid plus a bound for r > r_max.

    Past the band a1 = -(const)/(r b), and r b increases, so a0 > floor + a1(r_max)
    for every r beyond the grid.
    """
    i = int(np.argmin(data.a0))
    min_a0 = float(data.a0[i])
    bound = tail_floor(data) + float(data.a1[-1])
    return TrapVerdict(min_a0 > 0.0 and bound > 0.0, min_a0, float(data.r[i]), bound)


@dataclass(frozen=True)
class TheoremConstants:
    C1: float
    C4_prefactor: float
    C4_absorbed: float | None  # C4_prefactor * (2h + 1); None when h = inf
    band_bound: float  # C4_prefactor * (2h + 1) / h^2


def theorem_constants(fields: EfStaticFields, pert: Perturbation) -> TheoremConstants:
    """C1 from the positivity estimate and the band-bound prefactor C4.

    C1 = 52 pi (1 - k^2)/3 * rho0 r* b(3 r*/2) / (1 - alpha);
    C4 = 2 pi (r* - delta) rho(r* + delta) (1 - alpha), entering as -C4 (2h+1)/h^2.
    """
    model = fields.model
    r_star, delta = pert.r_star, pert.delta
    if 1.5 * r_star > fields.r[-1]:
        raise ValueError("grid must extend past 3 r*/2")
    if fields.profile is not None:
        b_far = float(fields.profile.b_at(1.5 * r_star))
        rho_edge = float(fields.profile.evaluate(r_star + delta)[0])
    else:
        b_far = float(np.exp(np.interp(1.5 * r_star, fields.r, np.log(fields.b))))
        rho_edge = float(np.exp(np.interp(r_star + delta, fields.r, np.log(fields.rho))))
    one_minus_alpha = 1.0 - model.alpha
    C1 = 52.0 * math.pi * (1.0 - model.k2) / 3.0 * model.rho0 * r_star * b_far / one_minus_alpha
    C4 = 2.0 * math.pi * (r_star - delta) * rho_edge * one_minus_alpha
    absorbed = None if math.isinf(pert.h) else C4 * (2.0 * pert.h + 1.0)
    return TheoremConstants(C1, C4, absorbed, C4 * pert.band_factor)


@dataclass(frozen=True)
class Clause:
    name: str
    ok: bool
    witness_radius: float | None = None
    offending: tuple = ()
    note: str = ""

    def to_dict(self) -> dict:
        out = {"name": self.name, "ok": self.ok, "witness_radius": self.witness_radius}
        if self.offending:
            out["offending"] = list(self.offending)
        if self.note:
            out["note"] = self.note
        return out


@dataclass(frozen=True)
class TheoremReport:
    model: FluidModel
    pert: Perturbation
    constants: TheoremConstants
    hypothesis_met: bool
    min_a0: float
    min_a0_radius: float
    tail_bound: float
    clauses: tuple
    band_sup_av: float
    band_min_av: float
    annulus_sup_av: float | None
    max_abs_a1_outer: float
    fits: dict = field(default_factory=dict)

    @property
    def C1(self) -> float:
        return self.constants.C1

    @property
    def delta_over_h(self) -> float:
        return self.pert.delta_over_h

    @property
    def all_ok(self) -> bool:
        return all(c.ok for c in self.clauses)

    def clause(self, name: str) -> Clause:
        for c in self.clauses:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        c = self.constants
        return {
            "C1": c.C1,
            "C4_prefactor": c.C4_prefactor,
            "C4_absorbed": c.C4_absorbed,
            "band_bound": c.band_bound,
            "delta_over_h": self.delta_over_h,
            "hypothesis_met": self.hypothesis_met,
            "min_a0": self.min_a0,
            "min_a0_radius": self.min_a0_radius,
            "tail_bound": self.tail_bound,
            "band_sup_av": self.band_sup_av,
            "band_min_av": self.band_min_av,
            "annulus_sup_av": self.annulus_sup_av,
            "max_abs_a1_outer": self.max_abs_a1_outer,
            "k": self.model.k,
            "rho0": self.model.rho0,
            "r_star": self.pert.r_star,
            "delta": self.pert.delta,
            "h": self.pert.h,
            "Delta": self.pert.Delta,
            "clauses": [cl.to_dict() for cl in self.clauses],
            "fits": dict(self.fits),
        }


_MAX_OFFENDERS = 20


def _clause(name, bad_mask, r, note="", witness=None) -> Clause:
    bad = np.flatnonzero(bad_mask)
    if bad.size:
        return Clause(name, False, float(r[bad[0]]), tuple(float(x) for x in r[bad[:_MAX_OFFENDERS]]), note)
    return Clause(name, True, witness, (), note)


def verify_theorem(
    data: InitialDataSet,
    fields: EfStaticFields | None = None,
    pert: Perturbation | None = None,
) -> TheoremReport:
    """Machine-check each conclusion of the admissibility estimate on one data set.

    Clauses: a0 positive (grid and tail); a0 <= a_static; d_v a = 0 before the
    band; d_v a < 0 from the band on; d_v a below the band bound
    -C4 (2h+1)/h^2 and below -C4/h^2 on the band; the two d_v a formulas
    agree; |a1| <= 1 - alpha past the inner edge when the hypothesis holds.
    The run is never refused when delta/h > 1/C1; `hypothesis_met` flags it.
    """
    fields = data.fields if fields is None else fields
    pert = data.pert if pert is None else pert
    r = data.r
    lo, hi = pert.band
    consts = theorem_constants(fields, pert)
    # slack absorbs the rounding of h = C1 * delta
    hypothesis = pert.delta_over_h <= (1.0 + 1e-12) / consts.C1
    verdict = check_no_trapped(data)
    av = data.av
    inner = r < lo
    outer = r > lo
    band = data.chi > 0.0
    annulus = (r > hi) & (r <= pert.r_star + pert.Delta)
    unperturbed = pert.inv_h == 0.0

    clauses = [
        Clause(
            "a0_positive", verdict.no_trapped,
            verdict.witness_radius,
            () if verdict.min_a0 > 0.0 else tuple(float(x) for x in r[data.a0 <= 0.0][:_MAX_OFFENDERS]),
            f"grid min {verdict.min_a0:.6g}, tail bound {verdict.tail_bound:.6g}",
        ),
        _clause("a0_le_static", data.a0 > data.a_static, r),
        _clause("av_zero_inner", inner & (av != 0.0), r),
    ]
    if unperturbed:
        clauses.append(_clause("av_negative_outer", outer & (av != 0.0), r, note="h = inf: av vanishes identically"))
    else:
        clauses.append(_clause("av_negative_outer", outer & ~(av < 0.0), r))
    clauses.append(_clause("band_bound", band & (av > -consts.band_bound), r, note="av <= -C4 (2h+1)/h^2"))
    clauses.append(
        _clause("band_bound_h2", band & (av > -consts.C4_prefactor * pert.inv_h**2), r, note="av <= -C4/h^2")
    )
    scale = np.maximum(np.abs(av), np.abs(data.av_expanded))
    tiny = np.finfo(float).tiny
    mismatch = np.abs(av - data.av_expanded) > 1e-8 * np.maximum(scale, tiny)
    clauses.append(_clause("av_forms_agree", mismatch & (scale > 0.0), r, note="relative 1e-8"))
    a1_outer = np.abs(data.a1[r >= lo])
    max_a1 = float(a1_outer.max())
    if hypothesis:
        clauses.append(_clause("a1_within_one_minus_alpha", (r >= lo) & (np.abs(data.a1) > 1.0 - data.model.alpha), r))

    band_av = av[band]
    ann_av = av[annulus]
    return TheoremReport(
        model=data.model,
        pert=pert,
        constants=consts,
        hypothesis_met=bool(hypothesis),
        min_a0=verdict.min_a0,
        min_a0_radius=verdict.witness_radius,
        tail_bound=verdict.tail_bound,
        clauses=tuple(clauses),
        band_sup_av=float(band_av.max()),
        band_min_av=float(band_av.min()),
        annulus_sup_av=float(ann_av.max()) if ann_av.size else None,
        max_abs_a1_outer=max_a1,
    )


@dataclass(frozen=True)
class CriticalRatio:
    k: float
    r_star: float
    delta: float
    h_critical: float
    C1: float

    @property
    def delta_over_h(self) -> float:
        return self.delta / self.h_critical

    @property
    def conservative(self) -> bool:
        return self.delta_over_h >= 1.0 / self.C1

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "r_star": self.r_star,
            "delta": self.delta,
            "h_critical": self.h_critical,
            "critical_delta_over_h": self.delta_over_h,
            "C1": self.C1,
            "inverse_C1": 1.0 / self.C1,
            "conservative": self.conservative,
        }


def critical_h(
    fields: EfStaticFields,
    r_star: float,
    delta: float,
    Delta: float | None = None,
    rel_tol: float = 1e-10,
    max_iter: int = 200,
) -> CriticalRatio:
    """Bisect in log h for the strength at which min a0 (grid and tail) reaches zero.

    The perturbation weakens as h grows, so min a0 increases with h. The
    bracket starts at h = C1 * delta (admissible) and shrinks h until a0 goes
    negative.
    """

    def margin(h):
        data = build_initial_data(fields, Perturbation(r_star, delta, h, Delta))
        v = check_no_trapped(data)
        return min(v.min_a0, v.tail_bound)

    consts = theorem_constants(fields, Perturbation(r_star, delta, 1.0, Delta))
    hi = consts.C1 * delta
    if margin(hi) <= 0.0:
        raise ValueError("a0 is not positive at delta/h = 1/C1; no admissible bracket")
    lo = hi
    for _ in range(200):
        lo *= 0.5
        if margin(lo) <= 0.0:
            break
    else:
        raise ValueError("could not make a0 negative by strengthening the perturbation")
    for _ in range(max_iter):
        mid = math.sqrt(lo * hi)
        if margin(mid) > 0.0:
            hi = mid
        else:
            lo = mid
        if hi / lo - 1.0 < rel_tol:
            break
    return CriticalRatio(fields.model.k, r_star, delta, hi, consts.C1)

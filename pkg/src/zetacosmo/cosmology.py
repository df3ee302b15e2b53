"""Friedmann model with scale factor R(t) = |Z(t)|.

With the coupling written as ``g`` (the 𝒢 of the field equations) the two
Friedmann equations read

    g c^2 rho / 3 = (R'/R)^2 + k c^2 / R^2
    g p           = -2 R''/R - (R'/R)^2 - k c^2 / R^2

and between zeros R'/R = Z'/Z and R''/R = Z''/Z, so everything is a
function of Z, Z', Z''. Adding them gives

    p + c^2 rho = (2/g) [ -(Z'/Z)' + k c^2 / Z^2 ],

which is what the positivity scans evaluate. All operations refuse points
within 1e-6 of a zero, where R has a cusp.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AtZeroOfZ, ConfigError, InsufficientTable, NotPositiveAtCenter
from .explicit_formula import zero_sums
from .riemann_siegel import DEFAULT_CONFIG, EvalConfig, z_values
from .zero_engine import CriticalPoint, ZeroTable

ZERO_GUARD = 1e-6
THRESHOLD_MIN_T = math.e**math.e
INTERVAL_SAMPLES = 64
_EDGE_GRID = 33
_BISECT_STEPS = 30
# p must clear this to count as positive on an interval; well above the
# rounding noise of p near the interval edges
PRESSURE_FLOOR = 1e-8


@dataclass(frozen=True)
class PhysicalConstants:
    c: float = 1.0
    g_coupling: float = 1.0
    k: int = 1

    def __post_init__(self):
        if not (self.c > 0 and math.isfinite(self.c)):
            raise ConfigError(f"c must be positive, got {self.c!r}")
        if not (self.g_coupling > 0 and math.isfinite(self.g_coupling)):
            raise ConfigError(f"g_coupling must be positive, got {self.g_coupling!r}")
        if self.k not in (-1, 0, 1):
            raise ConfigError(f"k must be -1, 0 or 1, got {self.k!r}")


MODEL_UNITS = PhysicalConstants()


@dataclass(frozen=True)
class CosmoState:
    t: float
    r: float
    dr_over_r: float
    rho: float
    p: float
    p_plus_c2rho: float
    p_plus_c2rho_paper: float = math.nan
    threshold: float = math.nan

    def as_row(self) -> dict:
        return {
            "t": self.t,
            "r": self.r,
            "rho": self.rho,
            "p": self.p,
            "p_plus_c2rho": self.p_plus_c2rho,
            "p_plus_c2rho_paper": self.p_plus_c2rho_paper,
            "threshold": self.threshold,
        }


@dataclass(frozen=True)
class Discrepancy:
    """direct - alternative for p + c^2 rho, split into its three sources.

    ``sum_weight``: the alternative carries the zero sum with weight 4/g
    where the direct route effectively has 2/g. ``curvature_sign``: +c^2/Z^2
    versus -1/(c^2 Z^2). ``remainder``: the O(1/t) gap between
    -(Z'/Z)' and the zero sum.
    """

    t: float
    total: float
    sum_weight: float
    curvature_sign: float
    remainder: float


@dataclass(frozen=True)
class IntervalResult:
    t0: float
    delta: float
    p_min_on_interval: float
    bound_value: float


@dataclass(frozen=True)
class EmpiricalConstant:
    name: str
    value: float
    range_measured: tuple[float, float]
    direction: str
    argument: float = math.nan

    def __post_init__(self):
        if self.name not in ("A1", "A2", "A", "C1"):
            raise ConfigError(f"unknown constant {self.name!r}")
        if self.direction not in ("inf", "sup"):
            raise ConfigError(f"direction must be inf or sup, got {self.direction!r}")


@dataclass
class StateEquationReport:
    t: float
    rho: float
    p: float
    c1: float
    lower_ok: bool
    upper_ok: bool
    radiation_residual: float
    rho_positive: bool
    p_nonnegative: bool

    @property
    def in_band(self) -> bool:
        return self.lower_ok and self.upper_ok


@dataclass
class Theorem1Scan:
    states: list[CosmoState]
    a1: EmpiricalConstant
    all_positive: bool
    discrepancies: list[Discrepancy] = field(default_factory=list)


def threshold(t):
    """(log log log t)^2 for t > e^e, NaN below (undefined there)."""
    t = np.asarray(t, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        v = np.where(t > THRESHOLD_MIN_T, np.log(np.log(np.log(np.maximum(t, THRESHOLD_MIN_T)))) ** 2, np.nan)
    return float(v) if v.ndim == 0 else v


# ---------------------------------------------------------------------------
# pointwise quantities
# ---------------------------------------------------------------------------

def _ratios(ts, cfg: EvalConfig):
    """Z, Z'/Z and Z''/Z, refusing points where Z is effectively zero."""
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    z, dz, d2z = z_values(ts, cfg)
    # |Z| <= guard * |Z'| means a zero lies within ~guard of t
    bad = np.abs(z) <= ZERO_GUARD * np.maximum(np.abs(dz), 1e-300)
    if bad.any():
        raise AtZeroOfZ(float(ts[np.argmax(bad)]))
    return z, dz / z, d2z / z


def _rho_p(z, u, v, constants: PhysicalConstants):
    c2 = constants.c**2
    g = constants.g_coupling
    curv = constants.k * c2 / (z * z)
    rho = 3.0 / (g * c2) * (curv + u * u)
    p = -2.0 * v / g - c2 * rho / 3.0
    return rho, p


def densities(ts, constants: PhysicalConstants = MODEL_UNITS, cfg: EvalConfig = DEFAULT_CONFIG):
    """Vectorised (rho, p) at the given times."""
    z, u, v = _ratios(ts, cfg)
    return _rho_p(z, u, v, constants)


def density(t: float, constants: PhysicalConstants = MODEL_UNITS, cfg: EvalConfig = DEFAULT_CONFIG) -> float:
    """rho = 3/(g c^2) [k c^2/Z^2 + (Z'/Z)^2]."""
    return float(densities([t], constants, cfg)[0][0])


def pressure(t: float, constants: PhysicalConstants = MODEL_UNITS, cfg: EvalConfig = DEFAULT_CONFIG) -> float:
    """p = -2 Z''/(g Z) - c^2 rho / 3."""
    return float(densities([t], constants, cfg)[1][0])


def pressure_raw_form(t: float, constants: PhysicalConstants = MODEL_UNITS, cfg: EvalConfig = DEFAULT_CONFIG) -> float:
    """p from the second field equation written with R, R', R'' directly."""
    z, u, v = (float(x[0]) for x in _ratios([t], cfg))
    r = abs(z)
    return (-2.0 * v - u * u - constants.k * constants.c**2 / (r * r)) / constants.g_coupling


def friedmann_residuals(t: float, constants: PhysicalConstants = MODEL_UNITS, cfg: EvalConfig = DEFAULT_CONFIG):
    """Substitute (R, R', R'', rho, p) back into both field equations.

    R = |Z| is rebuilt with its own derivatives (sign(Z) Z', sign(Z) Z'')
    so the check does not reuse the ratios that produced rho and p.
    Returns the two residuals in model units.
    """
    t = float(t)
    z, dz, d2z = (float(x[0]) for x in z_values(np.array([t]), cfg))
    rho, p = densities([t], constants, cfg)
    rho, p = float(rho[0]), float(p[0])
    s = 1.0 if z > 0 else -1.0
    r, dr, d2r = s * z, s * dz, s * d2z
    c2, g, k = constants.c**2, constants.g_coupling, constants.k
    first = g * c2 * rho / 3.0 - (dr / r) ** 2 - k * c2 / r**2
    second = g * p + 2.0 * d2r / r + (dr / r) ** 2 + k * c2 / r**2
    return first, second


def _require_closed(constants: PhysicalConstants):
    if constants.k != 1:
        raise ConfigError("the |Z| model is defined for k = +1 only")


def _states(ts, constants, table, cfg):
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    z, u, v = _ratios(ts, cfg)
    rho, p = _rho_p(z, u, v, constants)
    c2, g = constants.c**2, constants.g_coupling
    direct = p + c2 * rho
    if table is not None:
        sums = zero_sums(ts, table)
        zero_form = 2.0 / g * (2.0 * sums - 1.0 / (c2 * z * z))
    else:
        sums = np.full_like(ts, np.nan)
        zero_form = np.full_like(ts, np.nan)
    thr = threshold(np.abs(ts))
    states = [
        CosmoState(
            t=float(t), r=float(abs(zz)), dr_over_r=float(uu), rho=float(a), p=float(b),
            p_plus_c2rho=float(d), p_plus_c2rho_paper=float(pp), threshold=float(th),
        )
        for t, zz, uu, a, b, d, pp, th in zip(ts, z, u, rho, p, direct, zero_form, np.atleast_1d(thr))
    ]
    disc = []
    if table is not None:
        lemma_lhs = u * u - v  # -(Z'/Z)'
        for t, zz, s, lh, d, pp in zip(ts, z, sums, lemma_lhs, direct, zero_form):
            disc.append(Discrepancy(
                t=float(t),
                total=float(d - pp),
                sum_weight=float(-2.0 / g * s),
                curvature_sign=float(2.0 / g * (c2 + 1.0 / c2) / (zz * zz)),
                remainder=float(2.0 / g * (lh - s)),
            ))
    return states, disc


def p_plus_c2rho(t: float, constants: PhysicalConstants = MODEL_UNITS, table: ZeroTable | None = None,
                 cfg: EvalConfig = DEFAULT_CONFIG) -> CosmoState:
    """Full state at t with both expressions for p + c^2 rho.

    ``p_plus_c2rho`` is the field-equation value; ``p_plus_c2rho_paper`` is
    (2/g)[2 S - 1/(c^2 Z^2)] with S the zero sum, and is NaN when no table
    is supplied.
    """
    _require_closed(constants)
    return _states([t], constants, table, cfg)[0][0]


def discrepancy(t: float, table: ZeroTable, constants: PhysicalConstants = MODEL_UNITS,
                cfg: EvalConfig = DEFAULT_CONFIG) -> Discrepancy:
    _require_closed(constants)
    return _states([t], constants, table, cfg)[1][0]


# ---------------------------------------------------------------------------
# scans
# ---------------------------------------------------------------------------

def midpoints_in(table: ZeroTable, t_lo: float, t_hi: float) -> np.ndarray:
    g = table.ordinates
    mids = 0.5 * (g[:-1] + g[1:])
    return mids[(mids >= t_lo) & (mids <= t_hi)]


def theorem1_scan(t_lo: float, t_hi: float, constants: PhysicalConstants = MODEL_UNITS,
                  table: ZeroTable | None = None, cfg: EvalConfig = DEFAULT_CONFIG,
                  with_paper_form: bool = True) -> Theorem1Scan:
    """p + c^2 rho at every gap midpoint in [t_lo, t_hi] and its empirical A1.

    A1 is the infimum of (p + c^2 rho) / threshold over midpoints where the
    threshold is defined and positive.
    """
    _require_closed(constants)
    if table is None:
        raise InsufficientTable(2.0 * t_hi, 0.0)
    if not table.covers(t_hi) or (with_paper_form and not table.covers(2.0 * t_hi)):
        raise InsufficientTable(2.0 * t_hi if with_paper_form else t_hi, table.h_max)
    mids = midpoints_in(table, t_lo, t_hi)
    states, disc = _states(mids, constants, table if with_paper_form else None, cfg)
    vals = np.array([s.p_plus_c2rho for s in states])
    thr = np.array([s.threshold for s in states])
    ok = np.isfinite(thr) & (thr > 0)
    if ok.any():
        ratio = vals[ok] / thr[ok]
        j = int(np.argmin(ratio))
        a1 = EmpiricalConstant("A1", float(ratio[j]), (float(t_lo), float(t_hi)), "inf", float(mids[ok][j]))
    else:
        a1 = EmpiricalConstant("A1", math.nan, (float(t_lo), float(t_hi)), "inf")
    return Theorem1Scan(states=states, a1=a1, all_positive=bool(np.all(vals > 0)), discrepancies=disc)


def _enclosing(table: ZeroTable, t0: np.ndarray):
    g = table.ordinates
    i = np.searchsorted(g, t0)
    if np.any(i == 0) or np.any(i == g.size):
        raise InsufficientTable(float(t0.max()), table.h_max)
    return g[i - 1], g[i]


def _p_batch(ts, constants, cfg):
    ts = np.asarray(ts, dtype=float)
    z, dz, d2z = z_values(ts.ravel(), cfg)
    with np.errstate(divide="ignore", invalid="ignore"):
        rho, p = _rho_p(z, dz / z, d2z / z, constants)
    p = np.where(np.isfinite(p), p, -np.inf)
    return p.reshape(ts.shape)


def _sampled_min(t0, delta, constants, cfg):
    frac = np.linspace(-1.0, 1.0, INTERVAL_SAMPLES)
    pts = t0[:, None] + delta[:, None] * frac[None, :]
    return _p_batch(pts, constants, cfg).min(axis=1)


def corollary_intervals(t0s, constants: PhysicalConstants = MODEL_UNITS, table: ZeroTable | None = None,
                        cfg: EvalConfig = DEFAULT_CONFIG, a1: float | None = None) -> list[IntervalResult]:
    """Largest symmetric neighbourhoods with p > 0 around each center.

    delta is capped by the distance to the enclosing zeros. For each center
    the positive run of p on a coarse grid of the gap gives a starting
    radius; each side is bisected onto the sign change of p, and the result
    is accepted only once p > PRESSURE_FLOOR at all 64 samples of [t0 - delta, t0 + delta]
    (otherwise delta is halved until it is).
    """
    _require_closed(constants)
    if table is None:
        raise InsufficientTable(float(np.max(t0s)), 0.0)
    t0 = np.atleast_1d(np.asarray(t0s, dtype=float))
    if t0.size == 0:
        return []
    p0 = _p_batch(t0, constants, cfg)
    if np.any(p0 <= PRESSURE_FLOOR):
        j = int(np.argmax(p0 <= PRESSURE_FLOOR))
        raise NotPositiveAtCenter(float(t0[j]), float(p0[j]))
    lo, hi = _enclosing(table, t0)
    cap = np.minimum(t0 - lo, hi - t0) * (1.0 - 1e-9)

    # coarse grid of radii, shared by both sides
    frac = np.linspace(0.0, 1.0, _EDGE_GRID)[1:]
    radii = cap[:, None] * frac[None, :]
    both = (_p_batch(t0[:, None] - radii, constants, cfg) > PRESSURE_FLOOR) & (
        _p_batch(t0[:, None] + radii, constants, cfg) > PRESSURE_FLOOR
    )
    first_bad = np.where(both.all(axis=1), both.shape[1], np.argmin(both, axis=1))
    good_r = np.where(first_bad > 0, radii[np.arange(t0.size), np.maximum(first_bad - 1, 0)], 0.0)
    bad_r = np.where(first_bad < both.shape[1], radii[np.arange(t0.size), np.minimum(first_bad, both.shape[1] - 1)], cap)
    open_ = first_bad < both.shape[1]
    for _ in range(_BISECT_STEPS):
        if not open_.any():
            break
        mid = 0.5 * (good_r + bad_r)
        pair = _p_batch(np.stack([t0 - mid, t0 + mid], axis=1), constants, cfg)
        ok = (pair > PRESSURE_FLOOR).all(axis=1)
        good_r = np.where(open_ & ok, mid, good_r)
        bad_r = np.where(open_ & ~ok, mid, bad_r)
    delta = np.where(open_, good_r, cap)

    pmin = _sampled_min(t0, delta, constants, cfg)
    for _ in range(60):
        fail = pmin <= PRESSURE_FLOOR
        if not fail.any():
            break
        delta = np.where(fail, 0.5 * delta, delta)
        pmin = np.where(fail, _sampled_min(t0, delta, constants, cfg), pmin)
    bound = threshold(t0) if a1 is None else a1 * threshold(t0)
    return [
        IntervalResult(t0=float(a), delta=float(d), p_min_on_interval=float(m), bound_value=float(b))
        for a, d, m, b in zip(t0, delta, pmin, np.atleast_1d(bound))
    ]


def corollary_interval(t0: float, constants: PhysicalConstants = MODEL_UNITS, table: ZeroTable | None = None,
                       cfg: EvalConfig = DEFAULT_CONFIG, a1: float | None = None) -> IntervalResult:
    return corollary_intervals([t0], constants, table, cfg, a1)[0]


def positive_pressure_centers(stationary: list[CriticalPoint], t_lo: float, t_hi: float,
                              constants: PhysicalConstants = MODEL_UNITS, cfg: EvalConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Stationary points in [t_lo, t_hi] at which p > 0."""
    ts = np.array([c.t0 for c in stationary if t_lo <= c.t0 <= t_hi])
    if ts.size == 0:
        return ts
    return ts[_p_batch(ts, constants, cfg) > PRESSURE_FLOOR]


def disjoint_intervals(results: list[IntervalResult]) -> list[IntervalResult]:
    """Greedy left-to-right selection of pairwise disjoint closed intervals."""
    chosen = []
    edge = -math.inf
    for r in sorted(results, key=lambda r: r.t0 + r.delta):
        if r.delta > 0 and r.t0 - r.delta > edge:
            chosen.append(r)
            edge = r.t0 + r.delta
    return chosen


def state_equation_check(t: float, c1: float, constants: PhysicalConstants = MODEL_UNITS,
                         cfg: EvalConfig = DEFAULT_CONFIG) -> StateEquationReport:
    """Whether c1 rho < p <= c^2 rho / 3 holds at t, with rho > 0 and p >= 0."""
    if not c1 > 0:
        raise ConfigError(f"c1 must be positive, got {c1!r}")
    rho, p = densities([t], constants, cfg)
    return band_report(float(t), float(rho[0]), float(p[0]), c1, constants)


def band_report(t: float, rho: float, p: float, c1: float, constants: PhysicalConstants = MODEL_UNITS) -> StateEquationReport:
    upper = constants.c**2 * rho / 3.0
    return StateEquationReport(
        t=t, rho=rho, p=p, c1=c1,
        lower_ok=c1 * rho < p,
        upper_ok=p <= upper,
        radiation_residual=p - upper,
        rho_positive=rho > 0,
        p_nonnegative=p >= 0,
    )


__all__ = [
    "PhysicalConstants",
    "MODEL_UNITS",
    "CosmoState",
    "Discrepancy",
    "IntervalResult",
    "EmpiricalConstant",
    "StateEquationReport",
    "Theorem1Scan",
    "threshold",
    "density",
    "densities",
    "pressure",
    "pressure_raw_form",
    "friedmann_residuals",
    "p_plus_c2rho",
    "discrepancy",
    "midpoints_in",
    "theorem1_scan",
    "corollary_interval",
    "corollary_intervals",
    "positive_pressure_centers",
    "disjoint_intervals",
    "state_equation_check",
    "band_report",
]

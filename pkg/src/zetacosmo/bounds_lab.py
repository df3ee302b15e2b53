"""Empirical probes of the classical inputs.

Three measurements, none of which proves anything asymptotic:

* consecutive-zero gaps scaled by log log log of the lower ordinate,
* running maxima of |Z| on a fine grid, compared with a2 * exp(log^beta t),
* stationary points of Z whose |Z| beats the same bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._parallel import ordered_map
from .cosmology import EmpiricalConstant
from .errors import ConfigError
from .riemann_siegel import DEFAULT_CONFIG, EvalConfig, z_values
from .zero_engine import CriticalPoint, ZeroTable, bracketed_newton

GAP_MIN_ORDINATE = 16.0
OMEGA_STEP = 0.05
REFINE_FACTOR = 8
DEFAULT_BETAS = (0.1, 0.25, 0.4, 0.49)
DEFAULT_ALPHA = 1.0
_CHUNK_POINTS = 20000


@dataclass(frozen=True)
class GapStatistic:
    gamma_lo: float
    gamma_hi: float
    gap: float
    normalized: float | None


@dataclass(frozen=True)
class OmegaRecord:
    t: float
    abs_z: float
    kind: str
    implied_beta: float
    exceeds_bound: bool
    exceeds_alpha_form: bool


@dataclass
class MoserReport:
    beta: float
    a2: float
    alpha: float
    total: int
    points: list[CriticalPoint] = field(default_factory=list)
    alpha_count: int = 0
    max_abs_z: float = math.nan
    t_at_max: float = math.nan

    @property
    def count(self) -> int:
        return len(self.points)

    @property
    def fraction(self) -> float:
        return self.count / self.total if self.total else math.nan


def omega_bound(t, beta: float, a2: float):
    """a2 * exp(log(t) ** beta)."""
    return a2 * np.exp(np.log(t) ** beta)


def implied_beta(t, abs_z):
    """log log |Z| / log log t where both are defined, NaN elsewhere."""
    t = np.asarray(t, dtype=float)
    abs_z = np.asarray(abs_z, dtype=float)
    ok = (abs_z > 1.0) & (t > math.e)
    with np.errstate(divide="ignore", invalid="ignore"):
        v = np.where(ok, np.log(np.log(np.where(ok, abs_z, math.e))) / np.log(np.log(np.where(ok, t, math.e ** math.e))), np.nan)
    return float(v) if v.ndim == 0 else v


def _check_beta(beta: float, a2: float):
    if not 0 < beta < 0.5:
        raise ConfigError(f"beta must lie in (0, 1/2), got {beta!r}")
    if not a2 > 0:
        raise ConfigError(f"a2 must be positive, got {a2!r}")


# ---------------------------------------------------------------------------
# gaps
# ---------------------------------------------------------------------------

def littlewood_gap_stat(table: ZeroTable) -> tuple[list[GapStatistic], EmpiricalConstant | None]:
    """Gaps of consecutive ordinates and the sup of gap * log log log gamma'.

    The normalized value is reported only for gamma' > 16; the constant is
    None when no gap qualifies.
    """
    g = table.ordinates
    if g.size < 2:
        raise ConfigError("gap statistics need at least two ordinates")
    lo, hi = g[:-1], g[1:]
    gaps = hi - lo
    ok = lo > GAP_MIN_ORDINATE
    norm = np.full_like(gaps, np.nan)
    norm[ok] = gaps[ok] * np.log(np.log(np.log(lo[ok])))
    stats = [
        GapStatistic(float(a), float(b), float(d), float(n) if m else None)
        for a, b, d, n, m in zip(lo, hi, gaps, norm, ok)
    ]
    if not ok.any():
        return stats, None
    j = int(np.nanargmax(norm))
    const = EmpiricalConstant("A", float(norm[j]), (float(lo[0]), float(hi[-1])), "sup", float(lo[j]))
    return stats, const


# ---------------------------------------------------------------------------
# omega scan
# ---------------------------------------------------------------------------

def _abs_z_chunk(ts, cfg):
    return np.abs(z_values(ts, cfg)[0])


def _refine_peak(t: float, step: float, cfg: EvalConfig) -> tuple[float, float, str]:
    """Locate the |Z| maximum near a grid peak: 8x sub-grid, then Newton on Z'."""
    fine = np.linspace(t - step, t + step, 2 * REFINE_FACTOR + 1)
    z, dz, _ = z_values(fine, cfg)
    k = int(np.argmax(np.abs(z)))
    best_t, best = float(fine[k]), float(abs(z[k]))
    for a, b in ((k - 1, k), (k, k + 1)):
        if 0 <= a and b < fine.size and dz[a] * dz[b] < 0:

            def fun(x):
                _, d1, d2 = z_values(x, cfg)
                return d1, d2

            root = float(bracketed_newton(fun, np.array([fine[a]]), np.array([fine[b]]))[0])
            val = float(abs(z_values(np.array([root]), cfg)[0][0]))
            if val >= best:
                return root, val, "stationary"
    return best_t, best, "grid"


def omega_probe(t_lo: float, t_hi: float, beta: float = 0.49, a2: float = 1.0, cfg: EvalConfig = DEFAULT_CONFIG,
                step: float = OMEGA_STEP, alpha: float = DEFAULT_ALPHA, threads: int | None = 1) -> list[OmegaRecord]:
    """Running-maximum records of |Z| over [t_lo, t_hi].

    The grid (step <= 0.05) is scanned in chunks; every grid peak that could
    set a record is refined, and records are taken over the refined values.
    Each record carries the exp(log^beta) flag, the 1/t^alpha flag and the
    implied beta.
    """
    _check_beta(beta, a2)
    if not (0 < step <= OMEGA_STEP):
        raise ConfigError(f"grid step must lie in (0, {OMEGA_STEP}], got {step!r}")
    if not t_lo < t_hi:
        raise ConfigError(f"need t_lo < t_hi, got ({t_lo!r}, {t_hi!r})")
    n = int(math.ceil((t_hi - t_lo) / step))
    grid = np.linspace(t_lo, t_hi, n + 1)
    chunks = [grid[i : i + _CHUNK_POINTS] for i in range(0, grid.size, _CHUNK_POINTS)]
    vals = np.concatenate(ordered_map(lambda c: _abs_z_chunk(c, cfg), chunks, threads))

    # grid peaks that reach at least 90% of the running max before them
    prior = np.maximum.accumulate(np.concatenate([[0.0], vals[:-1]]))
    left = np.concatenate([[-np.inf], vals[:-1]])
    right = np.concatenate([vals[1:], [-np.inf]])
    peak = (vals >= left) & (vals >= right) & (vals >= 0.9 * prior)
    cand = np.nonzero(peak)[0]
    refined = ordered_map(lambda i: _refine_peak(float(grid[i]), step, cfg), list(cand), threads)

    records = []
    best = -math.inf
    for i, (t, v, kind) in zip(cand, refined):
        if not (t_lo <= t <= t_hi):
            t, v, kind = float(grid[i]), float(vals[i]), "grid"
        if v > best:
            best = v
            records.append((t, v, kind))
    if not records:
        return []
    ts = np.array([r[0] for r in records])
    az = np.array([r[1] for r in records])
    flags = az > omega_bound(ts, beta, a2)
    alpha_flags = az > ts ** (-alpha)
    ib = np.atleast_1d(implied_beta(ts, az))
    return [
        OmegaRecord(float(t), float(v), kind, float(b), bool(f), bool(af))
        for (t, v, kind), b, f, af in zip(records, ib, flags, alpha_flags)
    ]


# ---------------------------------------------------------------------------
# stationary points beating the bound
# ---------------------------------------------------------------------------

def moser_assumption_probe(stationary: list[CriticalPoint], beta: float = 0.25, a2: float = 1.0,
                           alpha: float = DEFAULT_ALPHA) -> MoserReport:
    """Stationary points t0 with |Z(t0)| > a2 * exp(log^beta t0)."""
    _check_beta(beta, a2)
    pts = [c for c in stationary if c.kind == "stationary"]
    report = MoserReport(beta=beta, a2=a2, alpha=alpha, total=len(pts))
    if not pts:
        return report
    ts = np.array([c.t0 for c in pts])
    az = np.abs(np.array([c.z_at for c in pts]))
    hit = az > omega_bound(ts, beta, a2)
    report.points = [c for c, h in zip(pts, hit) if h]
    report.alpha_count = int(np.sum(az > ts ** (-alpha)))
    j = int(np.argmax(az))
    report.max_abs_z = float(az[j])
    report.t_at_max = float(ts[j])
    return report


__all__ = [
    "GapStatistic",
    "OmegaRecord",
    "MoserReport",
    "DEFAULT_BETAS",
    "omega_bound",
    "implied_beta",
    "littlewood_gap_stat",
    "omega_probe",
    "moser_assumption_probe",
]

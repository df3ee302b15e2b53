"""Sums over zeros and the local identities they satisfy.

On the critical line each zero 1/2 + i*gamma pairs with its conjugate, so
"the sum over all ordinates" runs over +gamma and -gamma. The sum is
truncated at ``h_cut`` and completed by integrating the smooth zero density
``log(u / 2pi) / 2pi`` beyond the cut.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import InsufficientTable, TooCloseToZero
from .riemann_siegel import DEFAULT_CONFIG, EvalConfig, _loggamma_triplet, z_eval, zeta_on_line
from .zero_engine import ZeroTable

MIN_DISTANCE = 1e-6
LEMMA_MIN_DISTANCE = 0.05
CONVENTIONS = ("plus", "minus")


@dataclass(frozen=True)
class ZeroSumResult:
    t: float
    h_cut: float
    partial: float
    tail: float
    total: float
    nearest_gap_distance: float


@dataclass(frozen=True)
class LemmaResidual:
    t: float
    lhs: float
    rhs: float
    residual: float
    bound_scale: float


@dataclass(frozen=True)
class Lemma21Result:
    """Both sides of zeta''/zeta = sum + (+/-)(zeta'/zeta)**2 at one t.

    ``residual_plus`` uses ``+(zeta'/zeta)**2``, ``residual_minus`` the other
    sign; residuals are complex and compared by modulus.
    """

    t: float
    lhs: complex
    zero_sum: float
    log_deriv: complex
    residual_plus: complex
    residual_minus: complex
    bound_scale: float

    def residual(self, convention: str) -> complex:
        return self.residual_plus if convention == "plus" else self.residual_minus

    def passing(self, tol: float) -> tuple[str, ...]:
        return tuple(c for c in CONVENTIONS if abs(self.residual(c)) <= tol)


def lemma_tolerance(t: float) -> float:
    return max(0.05, 10.0 / abs(t))


def tail_density_integrand(u: float, t: float) -> float:
    return math.log(u / (2 * math.pi)) / (2 * math.pi) * (1.0 / (t - u) ** 2 + 1.0 / (t + u) ** 2)


def zero_sum_tail(t, h_cut):
    """Integral of the mean zero density against the kernel above h_cut.

    Closed form of the integral of log(u/2pi)/2pi * [(u-t)^-2 + (u+t)^-2]
    over (h_cut, inf); requires h_cut > |t|. Vectorised in both arguments.
    """
    t = np.abs(np.asarray(t, dtype=float))
    h = np.asarray(h_cut, dtype=float)
    lg = np.log(h / (2 * np.pi))
    minus = lg / (h - t)
    plus = lg / (h + t)
    # (1/t) [log(h+t) - log(h-t)] with a safe t -> 0 limit
    x = t / h
    with np.errstate(divide="ignore", invalid="ignore"):
        mix = np.where(t > 1e-8 * h, (np.log1p(x) - np.log1p(-x)) / np.where(t > 0, t, 1.0), 2.0 / h)
    val = (minus + plus + mix) / (2 * np.pi)
    return float(val) if val.ndim == 0 else val


def zero_sum_tail_quad(t: float, h_cut: float) -> float:
    """Quadrature version of :func:`zero_sum_tail`, kept as a cross-check."""
    val, _ = quad(tail_density_integrand, h_cut, math.inf, args=(t,), epsabs=1e-13, epsrel=1e-11, limit=200)
    return val


def _check_distance(t: float, table: ZeroTable, min_distance: float) -> float:
    gamma, dist = table.nearest(t)
    if dist <= min_distance:
        raise TooCloseToZero(t, gamma, dist)
    return dist


def zero_sum(t: float, table: ZeroTable, h_cut: float | None = None, both_signs: bool = True) -> ZeroSumResult:
    """Sum of 1/(t - gamma)**2 over +/- ordinates up to h_cut, plus the tail.

    ``h_cut`` defaults to 2|t|. ``both_signs=False`` drops the conjugate
    ordinates; it exists only to demonstrate why they are needed.
    """
    t = float(t)
    a = abs(t)
    if h_cut is None:
        h_cut = 2.0 * a
    if h_cut > table.h_max:
        raise InsufficientTable(h_cut, table.h_max)
    if h_cut < 2.0 * a:
        raise ValueError(f"h_cut={h_cut!r} must be at least 2|t|={2 * a!r}")
    dist = _check_distance(t, table, MIN_DISTANCE)
    g = table.upto(h_cut)
    partial = float(np.sum(1.0 / (a - g) ** 2))
    if both_signs:
        partial += float(np.sum(1.0 / (a + g) ** 2))
    tail = zero_sum_tail(a, h_cut) if both_signs else zero_sum_tail_one_sided(a, h_cut)
    return ZeroSumResult(t=t, h_cut=float(h_cut), partial=partial, tail=tail, total=partial + tail, nearest_gap_distance=dist)


def zero_sums(ts, table: ZeroTable, chunk: int = 256) -> np.ndarray:
    """Vectorised :func:`zero_sum` totals with h_cut = 2|t| at each point."""
    a = np.abs(np.atleast_1d(np.asarray(ts, dtype=float)))
    h = 2.0 * a
    if a.size and h.max() > table.h_max:
        raise InsufficientTable(float(h.max()), table.h_max)
    g = table.ordinates
    i = np.searchsorted(g, a)
    d_lo = np.where(i > 0, a - g[np.maximum(i - 1, 0)], np.inf)
    d_hi = np.where(i < g.size, g[np.minimum(i, g.size - 1)] - a, np.inf)
    dist = np.minimum(d_lo, d_hi)
    if a.size and dist.min() <= MIN_DISTANCE:
        j = int(np.argmin(dist))
        raise TooCloseToZero(float(a[j]), math.nan, float(dist[j]))
    out = np.empty_like(a)
    for s0 in range(0, a.size, chunk):
        aa = a[s0 : s0 + chunk, None]
        keep = g[None, :] <= 2.0 * aa
        terms = (1.0 / (aa - g[None, :]) ** 2 + 1.0 / (aa + g[None, :]) ** 2) * keep
        out[s0 : s0 + chunk] = terms.sum(axis=1)
    return out + zero_sum_tail(a, h)


def zero_sum_tail_one_sided(t: float, h_cut: float) -> float:
    f = lambda u: math.log(u / (2 * math.pi)) / (2 * math.pi) / (t - u) ** 2  # noqa: E731
    return quad(f, h_cut, math.inf, epsabs=1e-13, epsrel=1e-11, limit=200)[0]


def log_derivative_of_z_derivative(t: float, cfg: EvalConfig = DEFAULT_CONFIG) -> float:
    """-d/dt (Z'/Z) = -(Z'' Z - Z'^2) / Z^2."""
    p = z_eval(t, cfg)
    return -(p.d2z * p.z - p.dz * p.dz) / (p.z * p.z)


def lemma22_residual(t: float, table: ZeroTable, cfg: EvalConfig = DEFAULT_CONFIG) -> LemmaResidual:
    """Zero sum versus -d/dt(Z'/Z); the difference should be O(1/t)."""
    t = float(t)
    _check_distance(t, table, LEMMA_MIN_DISTANCE)
    lhs = zero_sum(t, table).total
    rhs = log_derivative_of_z_derivative(t, cfg)
    return LemmaResidual(t=t, lhs=lhs, rhs=rhs, residual=lhs - rhs, bound_scale=1.0 / abs(t))


def log_deriv_zeta(t: float, cfg: EvalConfig = DEFAULT_CONFIG, table: ZeroTable | None = None) -> complex:
    """zeta'/zeta at s = 1/2 + it, with the derivative taken in s.

    From zeta(1/2+it) = exp(-i theta) Z(t) and d/dt = i d/ds on the line:
    zeta'/zeta = -theta'(t) - i Z'(t)/Z(t).
    """
    t = float(t)
    p = z_eval(t, cfg)
    if table is not None:
        _check_distance(t, table, MIN_DISTANCE)
    elif abs(p.z) <= MIN_DISTANCE * max(abs(p.dz), 1.0):
        raise TooCloseToZero(t, math.nan, abs(p.z / p.dz) if p.dz else 0.0)
    return complex(-p.dtheta, -p.dz / p.z)


def log_deriv_candidates(t: float, cfg: EvalConfig = DEFAULT_CONFIG) -> dict[str, complex]:
    """Candidate readings of the theta'/Z'/Z relation for zeta'/zeta.

    Keys name the formula; the one matching numerical differentiation of
    log zeta is ``"-theta' - i Z'/Z"``.
    """
    p = z_eval(t, cfg)
    r = p.dz / p.z
    return {
        "theta' - Z'/Z": complex(p.dtheta - r, 0.0),
        "i (theta' - Z'/Z)": 1j * (p.dtheta - r),
        "-i (theta' - Z'/Z)": -1j * (p.dtheta - r),
        "-theta' - i Z'/Z": complex(-p.dtheta, -r),
    }


def richardson_derivative(fun, x: float, h: float, order: int = 1, levels: int = 5):
    """Central difference of ``order`` 1 or 2 with Richardson extrapolation.

    Returns (estimate, error estimate). ``fun`` may return complex values.
    """
    def central(step):
        if order == 1:
            return (fun(x + step) - fun(x - step)) / (2 * step)
        return (fun(x + step) - 2 * fun(x) + fun(x - step)) / (step * step)

    table = [[central(h / 2**i)] for i in range(levels)]
    for i in range(1, levels):
        for j in range(1, i + 1):
            f = 4.0**j
            table[i].append((f * table[i][j - 1] - table[i - 1][j - 1]) / (f - 1))
    best = table[-1][-1]
    err = abs(best - table[-1][-2]) if levels > 1 else math.inf
    return best, err


def _fd_step(dist: float, cfg: EvalConfig) -> float:
    return cfg.fd_step_scale * min(0.2 * dist, 0.05)


def numerical_log_deriv_zeta(t: float, cfg: EvalConfig = DEFAULT_CONFIG, dist: float = 0.5) -> complex:
    """zeta'/zeta from differentiating zeta(1/2+it) numerically in t (oracle route)."""
    d_dt, _ = richardson_derivative(lambda u: zeta_on_line(u, cfg), t, _fd_step(dist, cfg), order=1)
    # d/dt zeta(1/2+it) = i zeta'(s)
    return -1j * d_dt / zeta_on_line(t, cfg)


def numerical_second_log_ratio(t: float, cfg: EvalConfig = DEFAULT_CONFIG, dist: float = 0.5) -> complex:
    """zeta''/zeta (s-derivatives) from second differences of zeta along the line."""
    d2_dt, _ = richardson_derivative(lambda u: zeta_on_line(u, cfg), t, _fd_step(dist, cfg), order=2)
    # d^2/dt^2 = i^2 d^2/ds^2
    return -d2_dt / zeta_on_line(t, cfg)


def lemma21_residual(t: float, table: ZeroTable, cfg: EvalConfig = DEFAULT_CONFIG) -> Lemma21Result:
    """Evaluate zeta''/zeta against sum +/- (zeta'/zeta)**2 for both signs."""
    t = float(t)
    dist = _check_distance(t, table, LEMMA_MIN_DISTANCE)
    s = zero_sum(t, table).total
    lhs = numerical_second_log_ratio(t, cfg, dist)
    ld = log_deriv_zeta(t, cfg)
    sq = ld * ld
    return Lemma21Result(
        t=t,
        lhs=lhs,
        zero_sum=s,
        log_deriv=ld,
        residual_plus=lhs - (s + sq),
        residual_minus=lhs - (s - sq),
        bound_scale=1.0 / abs(t),
    )


def winning_convention(results, tol_fn=lemma_tolerance) -> str | None:
    """The single sign convention passing at every point, else None."""
    winners = set()
    for r in results:
        passing = r.passing(tol_fn(r.t))
        if len(passing) != 1:
            return None
        winners.add(passing[0])
    return winners.pop() if len(winners) == 1 else None


def admissible_points(t_lo: float, t_hi: float, count: int, table: ZeroTable, min_distance: float = LEMMA_MIN_DISTANCE) -> np.ndarray:
    """``count`` evenly spread points in [t_lo, t_hi], each nudged to the
    nearest gap midpoint if it sits within ``min_distance`` of a zero."""
    pts = np.linspace(t_lo, t_hi, count)
    out = []
    for p in pts:
        _, d = table.nearest(p)
        if d <= min_distance:
            g = table.ordinates
            i = int(np.searchsorted(g, p))
            lo = g[i - 1] if i > 0 else p - 1.0
            hi = g[i] if i < g.size else p + 1.0
            if p - lo < hi - p and i >= 2:
                lo, hi = g[i - 2], g[i - 1]
            elif i + 1 < g.size and hi - p <= p - lo:
                lo, hi = g[i], g[i + 1]
            p = 0.5 * (lo + hi)
        out.append(p)
    return np.array(out)


def exact_lemma22_correction(t: float) -> float:
    """The non-zero part of -(Z'/Z)' that the zero sum does not contain.

    -(d/dt)^2 log|Z| equals the full zero sum plus
    d^2/dt^2 log(t^2 + 1/4) - Re psi'(1/4 + it/2)/4 (from the Hadamard
    product of the completed zeta function); returned for diagnostics.
    """
    tg = _loggamma_triplet(0.25 + 0.5j * t)[2]
    d2log = (0.5 - 2 * t * t) / (t * t + 0.25) ** 2
    return float(d2log - 0.25 * np.real(tg))


__all__ = [
    "ZeroSumResult",
    "LemmaResidual",
    "Lemma21Result",
    "zero_sum",
    "zero_sum_tail",
    "zero_sum_tail_quad",
    "zero_sums",
    "lemma22_residual",
    "lemma21_residual",
    "log_deriv_zeta",
    "log_deriv_candidates",
    "numerical_log_deriv_zeta",
    "numerical_second_log_ratio",
    "richardson_derivative",
    "winning_convention",
    "admissible_points",
    "lemma_tolerance",
    "exact_lemma22_correction",
]

"""Evaluation of theta(t), chi(1/2+it), zeta on the critical line and Z(t).

Two independent routes are provided for Z:

* the *oracle* route sums zeta(s) by Euler-Maclaurin with a rigorous
  remainder bound and is valid at every height;
* the *fast* route uses the Riemann-Siegel main sum plus the correction
  terms C_0 .. C_k and is only trusted where its error budget is below the
  requested tolerance.

Derivatives are obtained by differentiating whichever series is active term
by term. Negative abscissae are routed through the even/odd symmetries of
Z and theta, which makes those symmetries hold bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import bernoulli

from ._rs_coeffs import MAX_ORDER, correction_polynomials_with_derivatives
from .errors import AccuracyNotAttainable, ConfigError

LOG_PI = math.log(math.pi)
TWO_PI = 2.0 * math.pi
_TWO_PI_LD = np.longdouble(2) * np.arccos(np.longdouble(-1))

THETA_SWITCH = 30.0
FAST_PATH_MIN_T = 50.0

# Published bounds |R_K(t)| <= d_K * tau**(-(2K+3)/4), valid for t >= 200.
RS_BUDGET_CONSTANTS = (0.127, 0.053, 0.011, 0.031, 0.017)
RS_BUDGET_MIN_T = 200.0
_RS_ROUNDING_FLOOR = 1e-13

# asymptotic theta(t) - (t/2)log(t/2pi) + t/2 + pi/8, coefficients of t**-(2j+1)
_THETA_SERIES = (1 / 48, 7 / 5760, 31 / 80640, 127 / 430080, 511 / 1216512)


@dataclass(frozen=True)
class EvalConfig:
    """Accuracy knobs for every evaluation in the package.

    ``rs_correction_order`` selects how many remainder terms the fast path
    carries (0..4). With ``allow_fallback`` the auto path silently uses the
    Euler-Maclaurin oracle wherever the fast path cannot meet
    ``target_abs_error``.
    """

    target_abs_error: float = 1e-10
    em_terms: int = 24
    rs_correction_order: int = 4
    fd_step_scale: float = 1.0
    allow_fallback: bool = True

    def __post_init__(self):
        if not (self.target_abs_error > 0 and math.isfinite(self.target_abs_error)):
            raise ConfigError(f"target_abs_error must be positive, got {self.target_abs_error!r}")
        if int(self.em_terms) != self.em_terms or self.em_terms < 8:
            raise ConfigError(f"em_terms must be an integer >= 8, got {self.em_terms!r}")
        if self.rs_correction_order not in range(MAX_ORDER + 1):
            raise ConfigError(f"rs_correction_order must be in 0..{MAX_ORDER}")
        if not self.fd_step_scale > 0:
            raise ConfigError("fd_step_scale must be positive")

    def digest(self) -> str:
        return (
            f"abs={self.target_abs_error!r};em={self.em_terms};rs={self.rs_correction_order};"
            f"fd={self.fd_step_scale!r};fb={int(self.allow_fallback)}"
        )


DEFAULT_CONFIG = EvalConfig()


@dataclass(frozen=True)
class ZetaPoint:
    t: float
    z: float
    dz: float
    d2z: float
    theta: float
    dtheta: float
    path: str = "oracle"


# ---------------------------------------------------------------------------
# log-gamma and theta
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _bernoulli_even(count: int) -> np.ndarray:
    """B_2, B_4, ..., B_{2*count} as floats."""
    return bernoulli(2 * count)[2::2].copy()


def _loggamma_triplet(z):
    """log Gamma(z), digamma(z), trigamma(z) for complex z with Re z > 0.

    Shifts the argument to |z| >= 16 and applies the Stirling series, so the
    principal (continuous) branch of log Gamma comes out directly.
    """
    z = np.asarray(z, dtype=complex)
    shift = 16
    w = z + shift
    b = _bernoulli_even(10)
    lg = (w - 0.5) * np.log(w) - w + 0.5 * math.log(TWO_PI)
    dg = np.log(w) - 0.5 / w
    tg = 1.0 / w + 0.5 / w**2
    winv = 1.0 / w
    for k in range(1, 11):
        b2k = b[k - 1]
        lg = lg + b2k / (2 * k * (2 * k - 1)) * winv ** (2 * k - 1)
        dg = dg - b2k / (2 * k) * winv ** (2 * k)
        tg = tg + b2k * winv ** (2 * k + 1)
    for j in range(shift):
        zj = z + j
        lg = lg - np.log(zj)
        dg = dg - 1.0 / zj
        tg = tg + 1.0 / zj**2
    return lg, dg, tg


def _theta_direct(t):
    lg, dg, tg = _loggamma_triplet(0.25 + 0.5j * np.asarray(t, dtype=float))
    th = lg.imag - 0.5 * np.asarray(t) * LOG_PI
    dth = 0.5 * dg.real - 0.5 * LOG_PI
    d2th = -0.25 * tg.imag
    return th, dth, d2th


def _theta_asymptotic(t):
    t = np.asarray(t, dtype=float)
    lt = np.log(t / TWO_PI)
    th = 0.5 * t * lt - 0.5 * t - math.pi / 8
    dth = 0.5 * lt
    d2th = 0.5 / t
    for j, a in enumerate(_THETA_SERIES):
        e = 2 * j + 1
        th = th + a * t ** (-e)
        dth = dth - a * e * t ** (-e - 1)
        d2th = d2th + a * e * (e + 1) * t ** (-e - 2)
    return th, dth, d2th


def _theta_ld(t: np.ndarray) -> np.ndarray:
    """theta(t) in extended precision for t > THETA_SWITCH (phase bookkeeping)."""
    t = np.asarray(t, dtype=np.longdouble)
    th = 0.5 * t * np.log(t / _TWO_PI_LD) - 0.5 * t - _TWO_PI_LD / 16
    for j, a in enumerate(_THETA_SERIES):
        th = th + np.longdouble(a) * t ** (-(2 * j + 1))
    return th


def _theta_nonneg(t):
    t = np.asarray(t, dtype=float)
    big = t > THETA_SWITCH
    if big.all():
        return _theta_asymptotic(t)
    if not big.any():
        return _theta_direct(t)
    out = [np.empty_like(t) for _ in range(3)]
    for part, mask in ((_theta_asymptotic, big), (_theta_direct, ~big)):
        vals = part(t[mask])
        for o, v in zip(out, vals):
            o[mask] = v
    return tuple(out)


def theta(t: float) -> tuple[float, float, float]:
    """Riemann-Siegel theta and its first two derivatives."""
    a = abs(float(t))
    th, dth, d2th = (float(v[0]) for v in _theta_nonneg(np.array([a])))
    if t < 0:
        return -th, dth, -d2th
    return th, dth, d2th


def theta_values(ts) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    ts = np.asarray(ts, dtype=float)
    a = np.abs(ts)
    th, dth, d2th = _theta_nonneg(a)
    sgn = np.where(ts < 0, -1.0, 1.0)
    return th * sgn, dth, d2th * sgn


def chi(t: float) -> complex:
    """chi(1/2+it) = pi**(it) Gamma(1/4 - it/2) / Gamma(1/4 + it/2).

    Evaluated from the Gamma quotient itself; on the line its argument is
    ``-2*theta(t)`` (mod 2pi).
    """
    t = float(t)
    lg_minus = _loggamma_triplet(0.25 - 0.5j * t)[0]
    lg_plus = _loggamma_triplet(0.25 + 0.5j * t)[0]
    return complex(np.exp(1j * t * LOG_PI + lg_minus - lg_plus))


# ---------------------------------------------------------------------------
# Euler-Maclaurin oracle
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _em_coefficients(m: int) -> np.ndarray:
    """B_{2k} / (2k)! for k = 1 .. m+1."""
    b = _bernoulli_even(m + 1)
    return np.array([b[k - 1] / math.factorial(2 * k) for k in range(1, m + 2)])


def em_cutoff(sigma: float, t: float, em_terms: int, eps: float) -> int:
    """Smallest N for which the Euler-Maclaurin remainder bound is below eps."""
    m = em_terms
    s = complex(sigma, abs(t))
    coef = abs(_em_coefficients(m)[m])
    log_prod = sum(math.log(abs(s + j)) for j in range(2 * m + 1))
    # |R_m| <= |s+2m+1|/(sigma+2m+1) * |T_{m+1}|
    log_lead = math.log(coef) + log_prod + math.log(abs(s + 2 * m + 1) / (sigma + 2 * m + 1))
    expo = sigma + 2 * m + 1
    n = math.exp((log_lead - math.log(eps)) / expo)
    return max(int(math.ceil(n)), 2)


def _em_group(sigma: float, ts: np.ndarray, n_cut: int, m: int):
    """zeta, zeta', zeta'' (d/ds) at s = sigma + i*ts for one common cutoff."""
    ts = np.asarray(ts, dtype=float)
    n = np.arange(1, n_cut, dtype=np.longdouble)
    logn_ld = np.log(n)
    logn = logn_ld.astype(float)
    phase = np.fmod(ts.astype(np.longdouble)[:, None] * logn_ld[None, :], _TWO_PI_LD).astype(float)
    cos_m = np.cos(phase)
    sin_m = np.sin(phase)
    if np.ndim(sigma) == 0:
        amp = np.exp(-sigma * logn)
        w0, w1, w2 = amp, -amp * logn, amp * logn * logn
        z0 = cos_m @ w0 - 1j * (sin_m @ w0)
        z1 = cos_m @ w1 - 1j * (sin_m @ w1)
        z2 = cos_m @ w2 - 1j * (sin_m @ w2)
    else:
        sigma = np.asarray(sigma, dtype=float)
        amp = np.exp(-sigma[:, None] * logn[None, :])
        c, s_ = cos_m * amp, sin_m * amp
        z0 = c.sum(axis=1) - 1j * s_.sum(axis=1)
        z1 = -(c @ logn) + 1j * (s_ @ logn)
        z2 = c @ (logn * logn) - 1j * (s_ @ (logn * logn))

    s = sigma + 1j * ts
    big_n = float(n_cut)
    log_n_cut_ld = np.log(np.longdouble(n_cut))
    log_n_cut = float(log_n_cut_ld)
    ph = np.fmod(ts.astype(np.longdouble) * log_n_cut_ld, _TWO_PI_LD).astype(float)
    base = big_n ** (-sigma) * np.exp(-1j * ph)  # N**(-s)

    inv = 1.0 / (s - 1.0)
    z0 = z0 + big_n * base * inv + 0.5 * base
    z1 = z1 + big_n * base * (-log_n_cut * inv - inv**2) - 0.5 * log_n_cut * base
    z2 = z2 + big_n * base * (log_n_cut**2 * inv + 2 * log_n_cut * inv**2 + 2 * inv**3) + 0.5 * log_n_cut**2 * base

    coefs = _em_coefficients(m)
    prod = s / big_n * base  # s * N**(-s-1)
    l1 = 1.0 / s
    l2 = 1.0 / s**2
    for k in range(1, m + 1):
        if k > 1:
            a, b = s + (2 * k - 3), s + (2 * k - 2)
            prod = prod * a * b / (big_n * big_n)
            l1 = l1 + 1.0 / a + 1.0 / b
            l2 = l2 + 1.0 / a**2 + 1.0 / b**2
        term = coefs[k - 1] * prod
        g = l1 - log_n_cut
        z0 = z0 + term
        z1 = z1 + term * g
        z2 = z2 + term * (g * g - l2)
    return z0, z1, z2


def zeta_derivatives(sigma: float, ts, cfg: EvalConfig = DEFAULT_CONFIG, eps: float | None = None):
    """zeta(s), zeta'(s), zeta''(s) at s = sigma + i t by Euler-Maclaurin.

    Vectorised over ``ts``; points are grouped by their cutoff so that a
    batch at similar heights shares one matrix product.
    """
    if sigma < 0:
        raise ConfigError("Euler-Maclaurin route requires sigma >= 0 here")
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    eps = cfg.target_abs_error / 100 if eps is None else eps
    out = [np.empty(ts.shape, dtype=complex) for _ in range(3)]
    cuts = np.array([em_cutoff(sigma, t, cfg.em_terms, eps) for t in ts])
    # bucket cutoffs so nearby heights share one matrix product
    buckets = np.ceil(cuts / 64.0).astype(int) * 64
    for nb in np.unique(buckets):
        idx = np.nonzero(buckets == nb)[0]
        for start in range(0, idx.size, 256):
            chunk = idx[start:start + 256]
            vals = _em_group(sigma, ts[chunk], int(nb), cfg.em_terms)
            for o, v in zip(out, vals):
                o[chunk] = v
    return tuple(out)


def zeta_values(sigmas, ts, cfg: EvalConfig = DEFAULT_CONFIG) -> np.ndarray:
    """zeta(sigma_j + i t_j) for paired arrays (sigma_j >= 0, t_j >= 0)."""
    sigmas = np.atleast_1d(np.asarray(sigmas, dtype=float))
    ts = np.broadcast_to(np.asarray(ts, dtype=float), sigmas.shape)
    eps = cfg.target_abs_error / 100
    cuts = np.array([em_cutoff(sg, t, cfg.em_terms, eps) for sg, t in zip(sigmas, ts)])
    buckets = np.ceil(cuts / 64.0).astype(int) * 64
    out = np.empty(sigmas.shape, dtype=complex)
    for nb in np.unique(buckets):
        idx = np.nonzero(buckets == nb)[0]
        out[idx] = _em_group(sigmas[idx], ts[idx], int(nb), cfg.em_terms)[0]
    return out


def zeta_on_line(t: float, cfg: EvalConfig = DEFAULT_CONFIG) -> complex:
    """zeta(1/2 + it) from the Euler-Maclaurin oracle."""
    t = float(t)
    z = complex(zeta_derivatives(0.5, [abs(t)], cfg)[0][0])
    return z.conjugate() if t < 0 else z


# ---------------------------------------------------------------------------
# Riemann-Siegel fast path
# ---------------------------------------------------------------------------

def rs_error_budget(t, order: int):
    """Upper bound on the Riemann-Siegel truncation error; inf below 200."""
    t = np.asarray(t, dtype=float)
    tau = t / TWO_PI
    with np.errstate(divide="ignore", invalid="ignore"):
        bound = RS_BUDGET_CONSTANTS[order] * tau ** (-(2 * order + 3) / 4) + _RS_ROUNDING_FLOOR
    return np.where(t >= RS_BUDGET_MIN_T, bound, np.inf)


def _rs_values(ts: np.ndarray, order: int):
    """Z, Z', Z'' from the Riemann-Siegel formula for t > THETA_SWITCH."""
    ts = np.asarray(ts, dtype=float)
    tau = ts / TWO_PI
    a = np.sqrt(tau)
    n_main = np.floor(a).astype(int)
    p = a - n_main
    th, dth, d2th = _theta_asymptotic(ts)
    th_ld = _theta_ld(ts)

    n_max = int(n_main.max())
    n = np.arange(1, n_max + 1, dtype=np.longdouble)
    logn_ld = np.log(n)
    logn = logn_ld.astype(float)
    mask = np.arange(1, n_max + 1)[None, :] <= n_main[:, None]
    phase = th_ld[:, None] - ts.astype(np.longdouble)[:, None] * logn_ld[None, :]
    phase = np.fmod(phase, _TWO_PI_LD).astype(float)
    amp = np.where(mask, 1.0 / np.sqrt(n.astype(float)), 0.0)
    c = np.cos(phase) * amp
    s = np.sin(phase) * amp
    dphi = dth[:, None] - logn[None, :]
    z = 2.0 * c.sum(axis=1)
    dz = -2.0 * (s * dphi).sum(axis=1)
    d2z = -2.0 * (c * dphi * dphi).sum(axis=1) - 2.0 * d2th * s.sum(axis=1)

    x = p - 0.5
    dp = 1.0 / (4 * math.pi * a)
    d2p = -1.0 / (16 * math.pi**2 * a**3)
    polyval = np.polynomial.polynomial.polyval
    r0 = np.zeros_like(ts)
    r1 = np.zeros_like(ts)
    r2 = np.zeros_like(ts)
    for k, (ck, dk, ddk) in enumerate(correction_polynomials_with_derivatives()[: order + 1]):
        e = -0.25 - 0.5 * k
        pw = tau**e
        dpw = e * tau ** (e - 1) / TWO_PI
        d2pw = e * (e - 1) * tau ** (e - 2) / TWO_PI**2
        cv, cd, cdd = polyval(x, ck), polyval(x, dk), polyval(x, ddk)
        r0 += cv * pw
        r1 += cd * dp * pw + cv * dpw
        r2 += (cdd * dp * dp + cd * d2p) * pw + 2 * cd * dp * dpw + cv * d2pw
    sign = np.where(n_main % 2 == 1, 1.0, -1.0)
    return z + sign * r0, dz + sign * r1, d2z + sign * r2, th, dth


# ---------------------------------------------------------------------------
# public Z evaluation
# ---------------------------------------------------------------------------

def _z_from_zeta(ts: np.ndarray, cfg: EvalConfig):
    z0, z1, z2 = zeta_derivatives(0.5, ts, cfg)
    th, dth, d2th = _theta_nonneg(ts)
    rot = np.exp(1j * th)
    # Z = e^{i theta} zeta(1/2+it); d/dt acts on zeta as i d/ds
    z = rot * z0
    dz = rot * (1j * dth * z0 + 1j * z1)
    d2z = rot * ((1j * d2th - dth * dth) * z0 - 2 * dth * z1 - z2)
    return z.real, dz.real, d2z.real, th, dth, z.imag


def _select_paths(a: np.ndarray, cfg: EvalConfig, path: str) -> np.ndarray:
    """Boolean mask: True where the fast path is used."""
    if path == "oracle":
        return np.zeros(a.shape, dtype=bool)
    budget = rs_error_budget(a, cfg.rs_correction_order)
    ok = budget <= cfg.target_abs_error
    if path == "fast":
        if not ok.all():
            bad = float(a[~ok][0])
            raise AccuracyNotAttainable(
                f"fast path budget at t={bad!r} exceeds {cfg.target_abs_error!r}"
            )
        return ok
    if path != "auto":
        raise ConfigError(f"unknown evaluation path {path!r}")
    eligible = a > FAST_PATH_MIN_T
    if not cfg.allow_fallback and (eligible & ~ok).any():
        bad = float(a[eligible & ~ok][0])
        raise AccuracyNotAttainable(
            f"fast path budget at t={bad!r} exceeds {cfg.target_abs_error!r} and fallback is disabled"
        )
    return eligible & ok


def z_values(ts, cfg: EvalConfig = DEFAULT_CONFIG, path: str = "auto"):
    """Vectorised Z, Z', Z'' on an array of abscissae."""
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    a = np.abs(ts)
    fast = _select_paths(a, cfg, path)
    z = np.empty_like(a)
    dz = np.empty_like(a)
    d2z = np.empty_like(a)
    if fast.any():
        z[fast], dz[fast], d2z[fast], _, _ = _rs_values(a[fast], cfg.rs_correction_order)
    if (~fast).any():
        z[~fast], dz[~fast], d2z[~fast], *_ = _z_from_zeta(a[~fast], cfg)
    dz = np.where(ts < 0, -dz, dz)
    return z, dz, d2z


def z_eval(t: float, cfg: EvalConfig = DEFAULT_CONFIG, path: str = "auto") -> ZetaPoint:
    """Z(t) with first and second derivatives.

    ``path`` is ``"auto"`` (fast path above t=50 where its budget allows,
    oracle otherwise), ``"oracle"`` or ``"fast"``.
    """
    t = float(t)
    a = np.array([abs(t)])
    fast = bool(_select_paths(a, cfg, path)[0])
    if fast:
        z, dz, d2z, th, dth = (float(v[0]) for v in _rs_values(a, cfg.rs_correction_order))
    else:
        z, dz, d2z, th, dth, _ = (float(v[0]) for v in _z_from_zeta(a, cfg))
    if t < 0:
        dz, th = -dz, -th
    return ZetaPoint(t=t, z=z, dz=dz, d2z=d2z, theta=th, dtheta=dth, path="fast" if fast else "oracle")


def realness_residual(t: float, cfg: EvalConfig = DEFAULT_CONFIG) -> float:
    """|Im(e^{i theta(t)} zeta(1/2+it))| from the oracle route."""
    return abs(float(_z_from_zeta(np.array([abs(float(t))]), cfg)[5][0]))

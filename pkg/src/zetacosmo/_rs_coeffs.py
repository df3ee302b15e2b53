"""Correction polynomials for the Riemann-Siegel remainder.

The remainder is expanded in powers of ``tau**-0.5`` with coefficients
``C_k(p)`` that are linear combinations of derivatives of

    Psi(p) = cos(2*pi*(p**2 - p - 1/16)) / cos(2*pi*p),

``p`` being the fractional part of ``sqrt(t / 2pi)``. ``Psi`` is entire, so
each ``C_k`` is stored as a Taylor polynomial in ``x = p - 1/2``. The
coefficients are produced once, in extended precision, by power-series
division of ``-cos(2*pi*x**2 - 5*pi/8)`` by ``cos(2*pi*x)``.
"""

from __future__ import annotations

from functools import lru_cache

import mpmath
import numpy as np

MAX_ORDER = 4
_DEGREE = 120

# (sign, denominator, power of pi, derivative order of Psi) for C_0 .. C_4
_COMBINATIONS = (
    ((1, 1, 0, 0),),
    ((-1, 96, 2, 3),),
    ((1, 64, 2, 2), (1, 18432, 4, 6)),
    ((-1, 64, 2, 1), (-1, 3840, 4, 5), (-1, 5308416, 6, 9)),
    ((1, 128, 2, 0), (19, 24576, 4, 4), (11, 5898240, 6, 8), (1, 2038431744, 8, 12)),
)


def _psi_taylor(degree: int) -> list:
    two_pi = 2 * mpmath.pi
    c58 = mpmath.cos(5 * mpmath.pi / 8)
    s58 = mpmath.sin(5 * mpmath.pi / 8)
    num = [mpmath.mpf(0)] * (degree + 1)
    den = [mpmath.mpf(0)] * (degree + 1)
    k = 0
    while 2 * k <= degree:
        den[2 * k] = (-1) ** k * two_pi ** (2 * k) / mpmath.factorial(2 * k)
        k += 1
    # cos(2 pi x^2 - 5pi/8) = cos(2 pi x^2) c58 + sin(2 pi x^2) s58
    k = 0
    while 4 * k <= degree:
        num[4 * k] -= c58 * (-1) ** k * two_pi ** (2 * k) / mpmath.factorial(2 * k)
        if 4 * k + 2 <= degree:
            num[4 * k + 2] -= s58 * (-1) ** k * two_pi ** (2 * k + 1) / mpmath.factorial(2 * k + 1)
        k += 1
    out = [mpmath.mpf(0)] * (degree + 1)
    for m in range(degree + 1):
        acc = num[m]
        for j in range(m):
            acc -= out[j] * den[m - j]
        out[m] = acc / den[0]
    return out


@lru_cache(maxsize=1)
def correction_polynomials() -> tuple[np.ndarray, ...]:
    """Ascending-power coefficients of ``C_0 .. C_4`` in ``x = p - 1/2``."""
    with mpmath.workdps(60):
        psi = _psi_taylor(_DEGREE)
        polys = []
        for combo in _COMBINATIONS:
            acc = [mpmath.mpf(0)] * (_DEGREE + 1)
            for entry in combo:
                sign, denom, pi_pow, order = entry
                scale = mpmath.mpf(sign) / (denom * mpmath.pi ** pi_pow)
                for m in range(order, _DEGREE + 1):
                    acc[m - order] += scale * psi[m] * mpmath.factorial(m) / mpmath.factorial(m - order)
            coeffs = np.array([float(v) for v in acc])
            keep = np.nonzero(np.abs(coeffs) * 0.5 ** np.arange(coeffs.size) > 1e-24)[0]
            polys.append(coeffs[: keep[-1] + 1])
    return tuple(polys)


@lru_cache(maxsize=1)
def correction_polynomials_with_derivatives() -> tuple[tuple[np.ndarray, np.ndarray, np.ndarray], ...]:
    out = []
    for c in correction_polynomials():
        d1 = np.polynomial.polynomial.polyder(c)
        d2 = np.polynomial.polynomial.polyder(c, 2)
        out.append((c, d1, d2))
    return tuple(out)

"""Limit laws: the semicircle on [-2, 2] and its images under |x| and x**2.

QUARTER has density sqrt(4 - x^2)/pi on (0, 2]; SQUARED has density
sqrt(1/x - 1/4)/pi on (0, 4] and Catalan moments.  Integrals against any of
the three are computed in the angle variable (x = 2 sin(theta) or
x = 4 sin^2(theta)), which removes both the edge square-root behaviour and
the 1/sqrt(x) pole of SQUARED at the origin.
"""
from __future__ import annotations

import cmath
import enum
import math
from typing import Callable

import numpy as np

from .combinatorics import moment_formula
from .errors import DomainError
from .quadrature import integrate

QUANTILE_TOL = 1e-12
MOMENT_TOL = 1e-10


class LimitLaw(str, enum.Enum):
    SEMICIRCLE = "semicircle"
    QUARTER = "quarter"
    SQUARED = "squared"


SUPPORT = {
    LimitLaw.SEMICIRCLE: (-2.0, 2.0),
    LimitLaw.QUARTER: (0.0, 2.0),
    LimitLaw.SQUARED: (0.0, 4.0),
}


def support(law: LimitLaw) -> tuple[float, float]:
    return SUPPORT[LimitLaw(law)]


def law_pdf(law: LimitLaw, x):
    """Density; zero outside the support.  SQUARED returns 0 at x <= 0 by convention."""
    law = LimitLaw(law)
    x = np.asarray(x, dtype=np.float64)
    if law is LimitLaw.SEMICIRCLE:
        inside = np.abs(x) <= 2.0
        val = np.sqrt(np.clip(4.0 - x * x, 0.0, None)) / (2.0 * np.pi)
    elif law is LimitLaw.QUARTER:
        inside = (x > 0.0) & (x <= 2.0)
        val = np.sqrt(np.clip(4.0 - x * x, 0.0, None)) / np.pi
    else:
        inside = (x > 0.0) & (x <= 4.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.sqrt(np.clip(1.0 / x - 0.25, 0.0, None)) / np.pi
    out = np.where(inside, val, 0.0)
    return float(out) if out.ndim == 0 else out


def _semicircle_cdf(u):
    u = np.clip(u, -2.0, 2.0)
    return 0.5 + u * np.sqrt(4.0 - u * u) / (4.0 * np.pi) + np.arcsin(u / 2.0) / np.pi


def law_cdf(law: LimitLaw, x):
    law = LimitLaw(law)
    x = np.asarray(x, dtype=np.float64)
    if law is LimitLaw.SEMICIRCLE:
        out = _semicircle_cdf(x)
    elif law is LimitLaw.QUARTER:
        out = np.where(x <= 0.0, 0.0, 2.0 * _semicircle_cdf(np.clip(x, 0.0, 2.0)) - 1.0)
    else:
        xc = np.clip(x, 0.0, 4.0)
        out = np.sqrt(xc * (4.0 - xc)) / (2.0 * np.pi) + (2.0 / np.pi) * np.arcsin(np.sqrt(xc) / 2.0)
        out = np.where(x <= 0.0, 0.0, out)
    out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def law_quantile(law: LimitLaw, u: float) -> float:
    """Bisection on the cdf to absolute tolerance 1e-12."""
    law = LimitLaw(law)
    if not 0.0 <= u <= 1.0:
        raise DomainError(f"quantile level must lie in [0, 1], got {u}")
    lo, hi = SUPPORT[law]
    if u == 0.0:
        return lo
    if u == 1.0:
        return hi
    while hi - lo > QUANTILE_TOL:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if law_cdf(law, mid) < u:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _angle_map(law: LimitLaw):
    """(theta interval, x(theta), dx/dtheta) for the change of variables."""
    if law is LimitLaw.SEMICIRCLE:
        return (-np.pi / 2, np.pi / 2), (lambda th: 2.0 * np.sin(th)), (lambda th: 2.0 * np.cos(th))
    if law is LimitLaw.QUARTER:
        return (0.0, np.pi / 2), (lambda th: 2.0 * np.sin(th)), (lambda th: 2.0 * np.cos(th))
    return (0.0, np.pi / 2), (lambda th: 4.0 * np.sin(th) ** 2), (lambda th: 4.0 * np.sin(2.0 * th))


def integrate_against(
    law: LimitLaw,
    h: Callable[[np.ndarray], np.ndarray],
    abs_tol: float = 1e-12,
    rel_tol: float = 1e-12,
) -> float | complex:
    """Integral of ``h`` against the law's density, via the angle substitution.

    The density itself is evaluated through ``law_pdf``; the node theta = 0
    of SQUARED (where the pdf is infinite) is never hit by Gauss-Kronrod.
    """
    law = LimitLaw(law)
    (a, b), xmap, jac = _angle_map(law)

    def integrand(th):
        x = xmap(th)
        return h(x) * law_pdf(law, x) * jac(th)

    val, _ = integrate(integrand, a, b, abs_tol=abs_tol, rel_tol=rel_tol)
    return val


def law_moment(law: LimitLaw, k: int):
    """k-th moment.  SQUARED returns the exact integer (1/k) C(2k, k-1)."""
    law = LimitLaw(law)
    if k < 0:
        raise DomainError(f"moment order must be >= 0, got {k}")
    if k == 0:
        return 1 if law is LimitLaw.SQUARED else 1.0
    if law is LimitLaw.SQUARED:
        return moment_formula(k)
    if law is LimitLaw.SEMICIRCLE and k % 2 == 1:
        return 0.0
    return float(integrate_against(law, lambda x: x**k, abs_tol=MOMENT_TOL, rel_tol=1e-13))


def stieltjes_squared(z: complex) -> complex:
    """s(z) = integral of dF(x)/(x - z) for the SQUARED law.

    Equals -1/2 + sqrt(1/4 - 1/z) with the principal square root: its cut
    1/4 - 1/z <= 0 is exactly z in (0, 4], and at infinity it picks the
    root with s(z) ~ -1/z.
    """
    z = complex(z)
    if z.imag == 0.0 and 0.0 <= z.real <= 4.0:
        raise DomainError(f"s(z) is undefined on the support [0, 4], got z = {z.real}")
    if not (cmath.isfinite(z)):
        raise DomainError("z must be finite")
    return -0.5 + cmath.sqrt(0.25 - 1.0 / z)


def stieltjes_residual(z: complex) -> complex:
    """z s^2 + z s + 1, which vanishes for the true transform."""
    s = stieltjes_squared(z)
    return z * s * s + z * s + 1.0


def pushforward_gap(x: float) -> float:
    """|F(x) - G(sqrt(x))|, zero when SQUARED is the square image of QUARTER."""
    return abs(law_cdf(LimitLaw.SQUARED, x) - law_cdf(LimitLaw.QUARTER, math.sqrt(x)))

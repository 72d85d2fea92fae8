"""Closed-form Gamma-function oracle for the log-power core integrals.

Every core integral met by the extremal profiles reduces, after the substitution
``y = |log r|``, to

    J(s, m) = int_1^inf exp(-s*y) * y**m dy = s**-(m+1) * Gamma(m+1, s)

so the exact weighted norms of the core segments follow from the upper
incomplete Gamma function. Nothing here touches the quadrature engine; the two
routes are meant to check each other.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass

from .errors import DivergenceError, ValidationError

__all__ = [
    "GammaValue",
    "log_gamma",
    "upper_incomplete_gamma",
    "core_integral",
    "log_core_integral",
    "grad_core_norm",
    "func_core_norm",
    "stirling_log_gamma",
]

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_TINY = sys.float_info.min / sys.float_info.epsilon


@dataclass(frozen=True)
class GammaValue:
    """A Gamma-type value kept together with its logarithm.

    ``value`` overflows to ``inf`` long before ``log_value`` stops being
    representable, so downstream code should prefer the log.
    """

    value: float
    log_value: float

    @classmethod
    def from_log(cls, log_value: float) -> "GammaValue":
        value = math.exp(log_value) if log_value < 709.7 else math.inf
        return cls(value, log_value)


def log_gamma(x: float) -> float:
    """Natural log of Gamma(x) for x > 0."""
    if not x > 0.0 or not math.isfinite(x):
        raise ValidationError(f"log_gamma needs a finite x > 0, got {x!r}")
    if x < 0.5:
        # reflection keeps the Lanczos sum in its accurate range
        return math.log(math.pi / math.sin(math.pi * x)) - log_gamma(1.0 - x)
    if x == 1.0 or x == 2.0:
        return 0.0
    z = x - 1.0
    acc = _LANCZOS_COEF[0]
    for k in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(acc)


def stirling_log_gamma(x: float) -> float:
    """Leading Stirling terms x ln x - x - ln(x)/2 + ln(2 pi)/2."""
    return x * math.log(x) - x - 0.5 * math.log(x) + _HALF_LOG_2PI


def _log_lower_series(a: float, s: float, tol: float, max_iter: int) -> float:
    # log of the regularized lower function P(a, s)
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(max_iter):
        ap += 1.0
        term *= s / ap
        total += term
        if abs(term) < abs(total) * tol:
            return math.log(total) - s + a * math.log(s) - log_gamma(a)
    raise DivergenceError(f"incomplete gamma series did not converge (a={a}, s={s})")


def _log_upper_cf(a: float, s: float, tol: float, max_iter: int) -> float:
    # modified Lentz evaluation of the continued fraction for Gamma(a, s)
    b = s + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, max_iter + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < tol:
            return math.log(h) - s + a * math.log(s)
    raise DivergenceError(f"incomplete gamma fraction did not converge (a={a}, s={s})")


def upper_incomplete_gamma(
    m_plus_1: float, s: float, tol: float = 1e-15, max_iter: int = 100_000
) -> GammaValue:
    """Gamma(m+1, s) = int_s^inf exp(-t) t**m dt.

    Series below the switchover ``s = m + 2`` (i.e. ``s < a + 1`` with
    ``a = m + 1``), continued fraction above it.
    """
    a = float(m_plus_1)
    if not (a > 0.0 and s > 0.0) or not (math.isfinite(a) and math.isfinite(s)):
        raise ValidationError(f"upper_incomplete_gamma needs positive arguments, got ({a}, {s})")
    if s < a + 1.0:
        p = math.exp(_log_lower_series(a, s, tol, max_iter))
        return GammaValue.from_log(log_gamma(a) + math.log1p(-p))
    return GammaValue.from_log(_log_upper_cf(a, s, tol, max_iter))


def log_core_integral(s: float, m: float) -> float:
    """log of int_1^inf exp(-s y) y**m dy."""
    if not s > 0.0:
        raise DivergenceError(f"core integral diverges for s = {s} <= 0")
    if m < 0.0:
        raise ValidationError(f"core integral needs m >= 0, got {m}")
    return -(m + 1.0) * math.log(s) + upper_incomplete_gamma(m + 1.0, s).log_value


def core_integral(s: float, m: float) -> float:
    """int_1^inf exp(-s y) y**m dy = s**-(m+1) Gamma(m+1, s)."""
    return math.exp(log_core_integral(s, m))


def _exponent_gap(p: float, alpha: float, d: int, unbounded: bool) -> float:
    s = p * (1.0 + alpha) - d if unbounded else d - p * (1.0 + alpha)
    if not s > 0.0:
        side = "above" if unbounded else "below"
        raise DivergenceError(
            f"p = {p} must lie strictly {side} the critical exponent {d * (1.0 + alpha)}"
        )
    return s


def _log_sphere(d: int) -> float:
    return math.log(2.0) + 0.5 * d * math.log(math.pi) - log_gamma(0.5 * d)


def grad_core_norm(p: float, params, delta: float, *, unbounded: bool = False) -> float:
    """Exact weighted gradient norm of the log-power core segment.

    Bounded case: ``| |grad u|/|x|**alpha |_p`` over ``|x| < 1/e`` for
    ``u = (-log|x|)**delta``. With ``unbounded=True`` the same quantity for the
    outer core ``(log|x|)**delta`` on ``|x| > e``.
    """
    s = _exponent_gap(p, params.alpha, params.d, unbounded)
    log_int = log_core_integral(s, p * (delta - 1.0))
    return math.exp((_log_sphere(params.d) + p * math.log(delta) + log_int) / p)


def func_core_norm(p: float, params, delta: float, *, unbounded: bool = False) -> float:
    """Exact norm ``|u/|x|**(1+alpha)|_p`` of the uncentered core segment."""
    s = _exponent_gap(p, params.alpha, params.d, unbounded)
    log_int = log_core_integral(s, p * delta)
    return math.exp((_log_sphere(params.d) + log_int) / p)

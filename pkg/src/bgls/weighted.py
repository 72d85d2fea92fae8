"""Log-power weights, weighted averages, and the p,q exponent transform."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DivergenceError, ValidationError
from .poincare import SlopeFit, default_epsilons, fit_loglog
from .psi import PsiFunction
from .quadrature import QuadratureConfig, lp_norm_weighted, radial_integral, sphere_surface
from .radial import (
    DeltaModel,
    DomainSpec,
    PoincareParams,
    RadialProfile,
    center,
    constant_profile,
    make_u_delta,
)

__all__ = [
    "SLOW_VARYING",
    "WeightSpec",
    "log_plus",
    "log_weight_exponent",
    "log_weight_ratio",
    "log_weight_scan",
    "pq_exponent",
    "nu_transform",
    "nu_search",
    "golden_section_min",
    "weighted_average_and_norm",
]

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

SLOW_VARYING: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "one": lambda z: np.ones_like(np.asarray(z, dtype=float)),
    "log1p": lambda z: np.log1p(z),
}


def log_plus(z):
    """``max(1, |log z|)`` for ``z > 0``."""
    return np.maximum(1.0, np.abs(np.log(z)))


def _log_plus_from_log(ld):
    return np.maximum(1.0, np.abs(ld))


@dataclass(frozen=True)
class WeightSpec:
    """``w = delta**delta_power * (log+ delta)**log_power * S(log+ delta)``.

    ``slow_vary`` must be positive on ``[1, inf)``; slow variation itself is
    the caller's contract and is not checked.
    """

    delta_power: float = 0.0
    log_power: float = 0.0
    slow_vary: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.log_power < 0.0:
            raise ValidationError("log_power must be >= 0")

    def log_weight(self, ld: np.ndarray) -> np.ndarray:
        lp = _log_plus_from_log(ld)
        out = self.delta_power * ld + self.log_power * np.log(lp)
        if self.slow_vary is not None:
            out = out + np.log(self.slow_vary(lp))
        return out


def log_weight_exponent(B1: float, B2: float) -> float:
    """``(1 - B2 + B1)_+``."""
    if not (B1 > 0.0 and B2 > 0.0):
        raise ValidationError(f"need B1 > 0 and B2 > 0, got ({B1}, {B2})")
    return max(0.0, 1.0 - B2 + B1)


def log_weight_ratio(
    f: RadialProfile,
    domain: DomainSpec,
    params: PoincareParams,
    p: float,
    B1: float,
    B2: float,
    S: Callable[[np.ndarray], np.ndarray] | None = None,
    quad: QuadratureConfig = QuadratureConfig(),
) -> float:
    """Left side over right side of the log-weighted Poincare bound.

    Both sides carry ``S(log+ delta)``; the right side includes the factor
    ``[p / |d - p(1+alpha)|]**(1 - B2 + B1)_+``. ``f`` must already be centered
    on the bounded domain.
    """
    expo = log_weight_exponent(B1, B2)
    lhs_w = WeightSpec(0.0, B1, S)
    rhs_w = WeightSpec(0.0, B2, S)
    lhs = lp_norm_weighted(f, domain, p, 1.0 + params.alpha, quad, log_weight=lambda t, ld: p * lhs_w.log_weight(ld))
    if lhs.diverged:
        raise DivergenceError(f"log-weighted norm diverges at p = {p}")
    if lhs.value == 0.0:
        return 0.0
    rhs = lp_norm_weighted(
        f, domain, p, params.alpha, quad, gradient=True, log_weight=lambda t, ld: p * rhs_w.log_weight(ld)
    )
    if rhs.diverged or rhs.value == 0.0:
        raise DivergenceError(f"log-weighted gradient norm is {rhs.value} at p = {p}")
    factor = (p / params.gap(p)) ** expo
    return lhs.value / (factor * rhs.value)


def log_weight_scan(
    delta: float,
    params: PoincareParams,
    B1: float,
    B2: float,
    S: Callable[[np.ndarray], np.ndarray] | None = None,
    epsilons: Sequence[float] | None = None,
    quad: QuadratureConfig = QuadratureConfig(),
) -> tuple[list[tuple[float, float]], SlopeFit]:
    """``log_weight_ratio`` for the bounded extremal at ``p = p0 - eps``, with its log-log fit."""
    domain = DomainSpec.ball(params.d, DeltaModel.ORIGIN)
    f = center(make_u_delta(delta, params.d), domain, quad)
    eps = default_epsilons() if epsilons is None else np.asarray(epsilons, dtype=float)
    rows = []
    for e in eps:
        p = params.p0 - float(e)
        rows.append((p, log_weight_ratio(f, domain, params, p, B1, B2, S, quad)))
    gaps = [params.gap(p) for p, _ in rows]
    return rows, fit_loglog(gaps, [r for _, r in rows])


def pq_exponent(p: float, q: float, alpha: float) -> float:
    """``-1 + 1/(p(1+alpha)) - 1/q`` for ``q > p(1+alpha)``."""
    if not alpha > -1.0:
        raise ValidationError(f"alpha must exceed -1, got {alpha}")
    if not q > p * (1.0 + alpha):
        raise ValidationError(f"need q > p(1+alpha), got p={p}, q={q}, alpha={alpha}")
    return -1.0 + 1.0 / (p * (1.0 + alpha)) - 1.0 / q


def golden_section_min(fn: Callable[[float], float], a: float, b: float, tol: float = 1e-12):
    """Minimize a unimodal ``fn`` on ``[a, b]``; returns ``(x, fn(x))``."""
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = fn(c), fn(d)
    while abs(b - a) > tol * max(1.0, abs(a) + abs(b)):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = fn(d)
    return (c, fc) if fc < fd else (d, fd)


def nu_search(psi: PsiFunction, alpha: float, q: float, n: int = 512) -> tuple[float, float]:
    """``(nu(q), argmin p)`` by grid search plus golden-section refinement."""
    if not alpha > -1.0:
        raise ValidationError(f"alpha must exceed -1, got {alpha}")
    lo = max(1.0, psi.interval.a)
    hi = min(q / (1.0 + alpha), psi.interval.b)
    if not hi > lo:
        raise ValidationError(f"empty admissible p-range for q={q}, alpha={alpha}")

    def objective(p: float) -> float:
        gap = q - p * (1.0 + alpha)
        if gap <= 0.0:
            return math.inf
        val = psi(p)
        if not (val > 0.0) or math.isinf(val):
            return math.inf
        return gap ** pq_exponent(p, q, alpha) * val

    start = lo
    if not math.isfinite(objective(lo)):
        start = lo + 1e-9 * (hi - lo)
    pts = start + (hi - start) * np.arange(n) / n
    vals = np.array([objective(float(p)) for p in pts])
    k = int(np.argmin(vals))
    best_p, best = float(pts[k]), float(vals[k])
    if not math.isfinite(best):
        raise DivergenceError(f"nu objective is infinite on the whole grid (q={q})")
    left = float(pts[max(k - 1, 0)])
    right = float(pts[k + 1]) if k + 1 < n else hi
    x, fx = golden_section_min(objective, left, right)
    if fx < best:
        best_p, best = x, fx
    return best, best_p


def nu_transform(psi: PsiFunction, alpha: float, q: float, n: int = 512) -> float:
    """``inf_{1 <= p < q/(1+alpha)} |q - p(1+alpha)|**pq_exponent(p, q, alpha) * psi(p)``."""
    return nu_search(psi, alpha, q, n)[0]


def weighted_average_and_norm(
    f: RadialProfile,
    domain: DomainSpec,
    w: WeightSpec,
    p: float,
    quad: QuadratureConfig = QuadratureConfig(),
) -> tuple[float, float]:
    """Weighted mean ``int f w / int w`` and norm ``(int |f|**p w)**(1/p)`` on the ball."""
    if not domain.bounded:
        raise ValidationError("weighted averages are taken on the bounded domain")
    if not p >= 1.0:
        raise ValidationError(f"p must be >= 1, got {p}")

    def lw(t, ld):
        return w.log_weight(ld)

    mass = radial_integral(constant_profile(1.0, domain), domain, p=1.0, log_weight=lw, quad=quad)
    if mass.diverged or not mass.converged:
        raise DivergenceError("weight is not integrable on the domain")
    raw = f if f.offset == 0.0 else RadialProfile(f.segments, scale=f.scale)
    top = radial_integral(raw, domain, p=1.0, signed=True, log_weight=lw, quad=quad)
    if top.diverged or not top.converged:
        raise DivergenceError("weighted integral of f did not converge")
    average = top.value / mass.value - f.offset
    integral = radial_integral(f, domain, p=p, log_weight=lw, quad=quad)
    if integral.diverged:
        raise DivergenceError("weighted norm diverges")
    if integral.sign == 0.0:
        return average, 0.0
    norm = math.exp((integral.log_abs + math.log(sphere_surface(domain.d))) / p)
    return average, norm

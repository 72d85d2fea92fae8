"""Generating functions of bilateral grand Lebesgue spaces and their norms.

A generating function ``psi`` lives on an exponent interval ``(a, b)`` with
``1 <= a < b <= inf``; the space norm of ``f`` is ``sup_p |f|_p / psi(p)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DivergenceError, ValidationError

__all__ = [
    "ExponentInterval",
    "PowerBilateral",
    "PowerTail",
    "Custom",
    "PsiFunction",
    "GridSpec",
    "BglsNorm",
    "make_power_psi",
    "make_tail_psi",
    "constant_psi",
    "solve_h",
    "transform_alpha_d",
    "bgls_norm",
]


@dataclass(frozen=True)
class ExponentInterval:
    a: float
    b: float = math.inf

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a >= 1.0):
            raise ValidationError(f"lower exponent must be finite and >= 1, got {self.a}")
        if not self.b > self.a or math.isnan(self.b):
            raise ValidationError(f"need a < b, got a={self.a}, b={self.b}")

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.b)

    def contains(self, p: float) -> bool:
        return self.a < p < self.b


@dataclass(frozen=True)
class PowerBilateral:
    beta: float
    gamma: float


@dataclass(frozen=True)
class PowerTail:
    beta: float
    gamma: float
    h: float


@dataclass(frozen=True)
class Custom:
    evaluator: Callable[[float], float] = field(compare=False)
    label: str = "custom"


@dataclass(frozen=True)
class PsiFunction:
    """A positive generating function on ``interval``.

    Call it like a function: ``psi(p)``. Values at the poles of transformed
    functions come back as ``inf``.
    """

    interval: ExponentInterval
    family: PowerBilateral | PowerTail | Custom

    def __call__(self, p: float) -> float:
        fam = self.family
        a = self.interval.a
        try:
            if isinstance(fam, PowerBilateral):
                return (p - a) ** (-fam.beta) * (self.interval.b - p) ** (-fam.gamma)
            if isinstance(fam, PowerTail):
                if p <= fam.h:
                    return (p - a) ** (-fam.beta)
                return p ** (-fam.gamma)
        except ZeroDivisionError:
            # endpoint pole
            return math.inf
        return fam.evaluator(p)

    def scaled(self, c: float) -> "PsiFunction":
        if not c > 0.0:
            raise ValidationError("psi can only be rescaled by a positive constant")
        return PsiFunction(self.interval, Custom(lambda p, f=self: c * f(p), f"{c}*psi"))

    def validate(self, n: int = 1024) -> None:
        """Check positivity on a dense sample of the open interval."""
        grid = GridSpec(n=n).points(self.interval)
        values = np.array([self(p) for p in grid])
        if np.any(np.isnan(values)) or np.any(values <= 0.0):
            raise ValidationError("psi must be positive on its interval")


def make_power_psi(a: float, b: float, beta: float, gamma: float) -> PsiFunction:
    """``psi(p) = (p - a)**-beta * (b - p)**-gamma`` on ``(a, b)``."""
    for name, v in (("a", a), ("b", b), ("beta", beta), ("gamma", gamma)):
        if not math.isfinite(v):
            raise ValidationError(f"{name} must be finite, got {v}")
    if beta < 0.0 or gamma < 0.0:
        raise ValidationError("beta and gamma must be non-negative")
    return PsiFunction(ExponentInterval(a, b), PowerBilateral(beta, gamma))


def solve_h(a: float, beta: float, gamma: float, *, max_iter: int = 400) -> float:
    """Root ``h > a`` of ``(h - a)**-beta = h**-gamma`` with ``gamma <= 0``.

    Bisection on ``x = h - a`` for ``g(x) = -beta log x + gamma log(a + x)``,
    which decreases strictly from ``+inf`` to ``-inf`` when ``beta > 0``.
    """
    if not (math.isfinite(a) and a >= 1.0):
        raise ValidationError(f"a must be finite and >= 1, got {a}")
    if beta < 0.0 or gamma > 0.0:
        raise ValidationError("need beta >= 0 and gamma <= 0")
    if beta == 0.0:
        # LHS is identically 1, so h**|gamma| = 1 forces h <= 1 <= a
        raise ValidationError(
            f"continuity equation has no root in (a, inf) for beta=0, gamma={gamma}, a={a}"
        )

    def g(x: float) -> float:
        return -beta * math.log(x) + gamma * math.log(a + x)

    lo, hi = 1.0, 1.0
    while g(lo) <= 0.0:
        lo *= 0.5
    while g(hi) >= 0.0:
        hi *= 2.0
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    x = lo if abs(g(lo)) <= abs(g(hi)) else hi
    h = a + x
    if not h > a:
        raise ValidationError(
            f"root h - a = {x:.3g} is below double resolution at a = {a}; h is not representable"
        )
    return h


def make_tail_psi(a: float, beta: float, gamma: float) -> PsiFunction:
    """Generating function on ``(a, inf)``: ``(p - a)**-beta`` up to ``h``, then ``p**|gamma|``."""
    if not gamma < 0.0:
        raise ValidationError(f"the unbounded family needs gamma < 0, got {gamma}")
    h = solve_h(a, beta, gamma)
    return PsiFunction(ExponentInterval(a, math.inf), PowerTail(beta, gamma, h))


def constant_psi(value: float, a: float, b: float = math.inf) -> PsiFunction:
    if not value > 0.0:
        raise ValidationError("constant psi must be positive")
    return PsiFunction(ExponentInterval(a, b), Custom(lambda p: value, f"const({value})"))


def transform_alpha_d(psi: PsiFunction, params) -> PsiFunction:
    """``p -> p * psi(p) / |d - p (1 + alpha)|``; ``inf`` at the critical exponent.

    ``params`` is anything with ``alpha`` and ``d`` attributes (normally a
    :class:`bgls.radial.PoincareParams`).
    """
    alpha, d = params.alpha, params.d

    def evaluate(p: float) -> float:
        gap = abs(d - p * (1.0 + alpha))
        if gap == 0.0:
            return math.inf
        return p * psi(p) / gap

    return PsiFunction(psi.interval, Custom(evaluate, f"transform(alpha={alpha}, d={d})"))


@dataclass(frozen=True)
class GridSpec:
    """Exponent grid for sup/inf searches.

    Finite intervals get ``n // 2`` points on each half, geometrically
    clustered toward the endpoint at a closest distance of ``offset`` times the
    interval length. On ``(a, inf)`` the lower half clusters toward ``a`` the
    same way (distances up to ``a``) and the upper half is log-spaced out to
    ``cap``.
    """

    n: int = 256
    offset: float = 1e-6
    cap: float = 200.0

    def __post_init__(self):
        if self.n < 4:
            raise ValidationError("grid needs at least 4 points")
        if not 0.0 < self.offset < 0.5:
            raise ValidationError("offset must lie in (0, 0.5)")

    def doubled(self) -> "GridSpec":
        return GridSpec(2 * self.n, self.offset, self.cap)

    def points(self, interval: ExponentInterval) -> np.ndarray:
        a, b = interval.a, interval.b
        half = self.n // 2
        if math.isfinite(b):
            length = b - a
            dist = np.geomspace(self.offset * length, 0.5 * length, half)
            left = a + dist
            right = b - dist[::-1]
            pts = np.concatenate([left, right[1:] if right[0] == left[-1] else right])
        else:
            if not self.cap > 2.0 * a:
                raise ValidationError(f"grid cap {self.cap} must exceed 2a = {2 * a}")
            dist = np.geomspace(self.offset * a, a, half)
            left = a + dist
            right = np.geomspace(2.0 * a, self.cap, self.n - half + 1)[1:]
            pts = np.concatenate([left, right])
        return np.unique(pts)


@dataclass(frozen=True)
class BglsNorm:
    value: float
    argmax_p: float
    grid_size: int
    infinite: bool = False


def bgls_norm(
    lp_norm: Callable[[float], float],
    psi: PsiFunction,
    grid: GridSpec | Sequence[float] = GridSpec(),
    *,
    inf_cap: float = 1e12,
    trend_points: int = 8,
) -> BglsNorm:
    """Grid approximation of ``sup_p lp_norm(p) / psi(p)``.

    Flags ``infinite`` when the ratio rises monotonically over the last
    ``trend_points`` grid points into an endpoint and exceeds ``inf_cap``
    there. ``grid`` may also be an explicit sequence of exponents.
    """
    if isinstance(grid, GridSpec):
        pts = grid.points(psi.interval)
    else:
        pts = np.unique(np.asarray(grid, dtype=float))
        if pts.size == 0 or not all(psi.interval.contains(float(p)) for p in pts):
            raise ValidationError("explicit grid points must lie inside the psi interval")
    ratios = np.empty(pts.size)
    for i, p in enumerate(pts):
        num = lp_norm(float(p))
        den = psi(float(p))
        if math.isnan(num) or math.isnan(den):
            raise DivergenceError(f"non-finite ratio at p = {p}")
        if math.isinf(num):
            raise DivergenceError(f"|f|_p is infinite at p = {p}")
        ratios[i] = 0.0 if math.isinf(den) else num / den
    k = int(np.argmax(ratios))
    value = float(ratios[k])
    infinite = False
    tail = trend_points
    if k == pts.size - 1 and pts.size > tail:
        seg = ratios[-tail:]
        infinite = bool(np.all(np.diff(seg) > 0) and value > inf_cap)
    elif k == 0 and pts.size > tail:
        seg = ratios[:tail]
        infinite = bool(np.all(np.diff(seg) < 0) and value > inf_cap)
    return BglsNorm(math.inf if infinite else value, float(pts[k]), int(pts.size), infinite)

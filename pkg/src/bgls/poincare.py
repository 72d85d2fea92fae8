"""Poincare-operator norms, the ratio V(f, p) and sharpness scans.

``V(f, p) = |f0 / delta**(1+alpha)|_p * |d - p(1+alpha)| / p / | |grad f| / delta**alpha |_p``

where ``f0`` is ``f`` minus its mean on the ball (``f`` itself outside). A
bounded ``V`` as ``p`` approaches the critical exponent ``d(1+alpha)`` (or
infinity) is what the extremal families are built to show.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DivergenceError, ValidationError
from .psi import GridSpec, PsiFunction, make_power_psi, make_tail_psi
from .quadrature import NormResult, QuadratureConfig, lp_norm_weighted
from .radial import (
    DeltaModel,
    DomainSpec,
    PoincareParams,
    RadialProfile,
    center,
    make_u_delta,
    make_v_delta,
)

__all__ = [
    "ScanCase",
    "SlopeFit",
    "ScanRow",
    "ScanResult",
    "Theorem1Report",
    "MembershipReport",
    "critical_exponent",
    "fit_loglog",
    "operator_norms",
    "poincare_ratio",
    "sharpness_scan",
    "theorem1_verify",
    "power_family_membership",
    "tail_family_report",
    "default_epsilons",
]


class ScanCase(str, enum.Enum):
    BOUNDED_BELOW = "bounded"
    UNBOUNDED_ABOVE = "unbounded"
    UNBOUNDED_INFINITY = "infinity"


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    residual: float


@dataclass(frozen=True)
class ScanRow:
    p: float
    eps: float
    num_norm: float
    den_norm: float
    V: float


@dataclass(frozen=True)
class ScanResult:
    case: ScanCase
    delta: float
    params: PoincareParams
    rows: tuple[ScanRow, ...]
    fit: SlopeFit
    num_fit: SlopeFit
    den_fit: SlopeFit
    dropped: tuple[float, ...] = ()
    meta: dict = field(default_factory=dict)

    @property
    def v_min(self) -> float:
        return min(r.V for r in self.rows)

    @property
    def v_max(self) -> float:
        return max(r.V for r in self.rows)

    @property
    def spread(self) -> float:
        return self.v_max / self.v_min


@dataclass(frozen=True)
class Theorem1Report:
    estimated_c: float
    argmax_p: float
    grid_stable: bool
    grid_size: int
    doubled_c: float
    rows: tuple[tuple[float, float], ...] = ()
    dropped: tuple[float, ...] = ()


def critical_exponent(params: PoincareParams) -> float:
    return params.p0


def default_epsilons(n: int = 12, hi: float = 0.3, lo: float = 1e-3) -> np.ndarray:
    return np.geomspace(hi, lo, n)


def fit_loglog(x: Sequence[float], y: Sequence[float]) -> SlopeFit:
    """Least-squares line through ``(log x, log y)``; residual is the RMS misfit."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    if lx.size < 2:
        raise ValidationError("a slope fit needs at least two points")
    A = np.vstack([lx, np.ones_like(lx)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, ly, rcond=None)
    rms = float(np.sqrt(np.mean((A @ np.array([slope, intercept]) - ly) ** 2)))
    return SlopeFit(float(slope), float(intercept), rms)


def operator_norms(
    f: RadialProfile,
    domain: DomainSpec,
    params: PoincareParams,
    p: float,
    quad: QuadratureConfig = QuadratureConfig(),
) -> tuple[NormResult, NormResult]:
    """``(|f / delta**(1+alpha)|_p, | |grad f| / delta**alpha |_p)`` for an already centered ``f``."""
    num = lp_norm_weighted(f, domain, p, 1.0 + params.alpha, quad)
    den = lp_norm_weighted(f, domain, p, params.alpha, quad, gradient=True)
    return num, den


def _ratio(num: NormResult, den: NormResult, params: PoincareParams, p: float) -> float:
    if num.diverged or den.diverged:
        raise DivergenceError(f"weighted norm diverges at p = {p}")
    if num.value == 0.0:
        # f0 vanishes identically: the inequality holds trivially
        return 0.0
    if den.value == 0.0:
        raise DivergenceError(f"gradient norm vanishes at p = {p} for a nonconstant f0")
    return num.value * params.gap(p) / p / den.value


def poincare_ratio(
    f: RadialProfile,
    domain: DomainSpec,
    params: PoincareParams,
    p: float,
    quad: QuadratureConfig = QuadratureConfig(),
) -> float:
    """``V(f, p)``; ``f`` must already be centered on the bounded domain."""
    if params.d != domain.d:
        raise ValidationError("params and domain disagree on the dimension")
    if p == params.p0:
        raise ValidationError("V is undefined at the critical exponent")
    num, den = operator_norms(f, domain, params, p, quad)
    return _ratio(num, den, params, p)


def _map(fn, items, workers: int):
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _scan_setup(case: ScanCase, delta: float, params: PoincareParams):
    if case is ScanCase.BOUNDED_BELOW:
        if not params.bounded_admissible:
            raise ValidationError(f"bounded case needs d(1+alpha) > 1, got {params.p0}")
        domain = DomainSpec.ball(params.d, DeltaModel.ORIGIN)
        profile = make_u_delta(delta, params.d)
    else:
        domain = DomainSpec.exterior(params.d)
        profile = make_v_delta(delta, params.d)
    return domain, profile


def sharpness_scan(
    case: ScanCase | str,
    delta: float,
    params: PoincareParams,
    quad: QuadratureConfig = QuadratureConfig(),
    epsilons: Sequence[float] | None = None,
    *,
    workers: int = 1,
) -> ScanResult:
    """Evaluate ``V`` on the extremal family as ``p`` runs into a critical end.

    ``epsilons`` are distances ``|p - p0|`` for the two critical-exponent cases
    and the ``p`` values themselves for ``infinity`` (default: 12 log-spaced
    values from 10 to 200). Rows whose norms fail to converge are dropped.
    """
    case = ScanCase(case)
    domain, profile = _scan_setup(case, delta, params)
    if domain.bounded:
        profile = center(profile, domain, quad)
    p0 = params.p0
    if case is ScanCase.UNBOUNDED_INFINITY:
        ps = np.geomspace(10.0, 200.0, 12) if epsilons is None else np.asarray(epsilons, float)
    else:
        eps = default_epsilons() if epsilons is None else np.asarray(epsilons, float)
        if np.any(eps <= 0.0):
            raise ValidationError("epsilons must be positive")
        ps = p0 - eps if case is ScanCase.BOUNDED_BELOW else p0 + eps
    if np.any(ps < 1.0):
        raise ValidationError("scan reaches exponents below 1")
    if case is not ScanCase.BOUNDED_BELOW and np.any(ps <= p0):
        raise ValidationError("unbounded scans need p > d(1+alpha)")

    def row(p):
        num, den = operator_norms(profile, domain, params, float(p), quad)
        return float(p), num, den

    results = _map(row, list(ps), workers)
    rows, dropped = [], []
    for p, num, den in results:
        if not (num.ok and den.ok) or den.value == 0.0:
            dropped.append(p)
            continue
        rows.append(ScanRow(p, abs(p - p0), num.value, den.value, _ratio(num, den, params, p)))
    rows.sort(key=lambda r: r.p)
    if len(rows) < 2:
        raise DivergenceError("fewer than two converged rows in the scan")
    gaps = [params.gap(r.p) for r in rows]
    return ScanResult(
        case=case,
        delta=float(delta),
        params=params,
        rows=tuple(rows),
        fit=fit_loglog(gaps, [r.V for r in rows]),
        num_fit=fit_loglog(gaps, [r.num_norm for r in rows]),
        den_fit=fit_loglog(gaps, [r.den_norm for r in rows]),
        dropped=tuple(sorted(dropped)),
        meta={
            "rel_tol": quad.rel_tol,
            "abs_tol": quad.abs_tol,
            "n_points": int(len(ps)),
            "domain": domain.shape.value,
            "delta_model": domain.delta_model.value,
        },
    )


def _per_p_ratios(f, domain, params, pts, quad, workers):
    keep = [float(p) for p in pts if p >= 1.0 and p != params.p0]

    def one(p):
        num, den = operator_norms(f, domain, params, p, quad)
        if not (num.ok and den.ok):
            return p, None
        return p, _ratio(num, den, params, p)

    rows, dropped = [], []
    for p, r in _map(one, keep, workers):
        (dropped.append(p) if r is None else rows.append((p, r)))
    if not rows:
        raise DivergenceError("no grid point produced finite norms")
    return rows, dropped


def theorem1_verify(
    f: RadialProfile,
    domain: DomainSpec,
    params: PoincareParams,
    psi: PsiFunction,
    grid: GridSpec = GridSpec(),
    quad: QuadratureConfig = QuadratureConfig(),
    *,
    workers: int = 1,
    stability: float = 0.05,
) -> Theorem1Report:
    """Empirical constant in the space-level Poincare bound.

    The per-exponent quotient of ``|T f|_p / psi_{alpha,d}(p)`` by
    ``|grad f|_p / psi(p)`` simplifies to ``V(f, p)``; ``psi`` only fixes the
    exponent interval. Its sup over the grid is compared with the sup over the
    doubled grid.
    """
    if domain.bounded:
        f = center(f, domain, quad)
    rows, dropped = _per_p_ratios(f, domain, params, grid.points(psi.interval), quad, workers)
    rows2, _ = _per_p_ratios(f, domain, params, grid.doubled().points(psi.interval), quad, workers)
    k = int(np.argmax([r for _, r in rows]))
    c = rows[k][1]
    c2 = max(r for _, r in rows2)
    if c == 0.0:
        stable = c2 == 0.0
    else:
        stable = abs(c2 - c) / c < stability
    return Theorem1Report(
        estimated_c=c,
        argmax_p=rows[k][0],
        grid_stable=bool(stable),
        grid_size=len(rows),
        doubled_c=c2,
        rows=tuple(rows),
        dropped=tuple(dropped),
    )


@dataclass(frozen=True)
class MembershipReport:
    K: float
    K_doubled: float
    scale: float
    grid_stable: bool


def _membership(f, domain, params, pts, psi_grad, psi_target, quad, workers):
    def one(p):
        num, den = operator_norms(f, domain, params, p, quad)
        return p, num, den

    res = [(p, n, g) for p, n, g in _map(one, [float(p) for p in pts], workers) if n.ok and g.ok]
    # rescale psi so the gradient sits inside its unit ball
    c = max(g.value / psi_grad(p) for p, _, g in res)
    K = max(n.value / (c * psi_target(p)) for p, n, _ in res)
    return K, c


def power_family_membership(
    f: RadialProfile,
    params: PoincareParams,
    beta: float,
    gamma: float,
    grid: GridSpec = GridSpec(n=64),
    quad: QuadratureConfig = QuadratureConfig(),
    *,
    workers: int = 1,
    stability: float = 0.05,
) -> MembershipReport:
    """Bounded case: gradient in ``G(1, p0; beta, gamma)`` puts ``T f`` in ``G(1, p0; beta, gamma+1)``.

    Returns the smallest ``K`` with ``|T f|_p <= K c psi_{beta,gamma+1}(p)``
    on the grid, where ``c psi_{beta,gamma}`` is the tightest rescaling
    dominating the measured gradient norms.
    """
    domain = DomainSpec.ball(params.d, DeltaModel.ORIGIN)
    f = center(f, domain, quad)
    psi = make_power_psi(1.0, params.p0, beta, gamma)
    target = make_power_psi(1.0, params.p0, beta, gamma + 1.0)
    K, c = _membership(f, domain, params, grid.points(psi.interval), psi, target, quad, workers)
    K2, _ = _membership(f, domain, params, grid.doubled().points(psi.interval), psi, target, quad, workers)
    return MembershipReport(K, K2, c, abs(K2 - K) / K < stability)


def tail_family_report(
    delta: float,
    params: PoincareParams,
    beta: float,
    gamma: float,
    grid: GridSpec = GridSpec(n=64),
    quad: QuadratureConfig = QuadratureConfig(),
    *,
    workers: int = 1,
) -> dict:
    """Exterior case: measured constants against two candidate target families.

    ``transform`` uses ``p psi(p) / |d - p(1+alpha)|``; ``shifted`` uses the
    tail family with both exponents raised by one (only when that family is
    still of tail type). Reported, not asserted.
    """
    domain = DomainSpec.exterior(params.d)
    f = make_v_delta(delta, params.d)
    psi = make_tail_psi(params.p0, beta, gamma)
    pts = grid.points(psi.interval)

    def transformed(p):
        return p * psi(p) / params.gap(p)

    K_t, c = _membership(f, domain, params, pts, psi, transformed, quad, workers)
    out = {"scale": c, "K_transform": K_t, "K_shifted": None}
    if gamma + 1.0 < 0.0:
        shifted = make_tail_psi(params.p0, beta + 1.0, gamma + 1.0)
        out["K_shifted"], _ = _membership(f, domain, params, pts, psi, shifted, quad, workers)
    return out

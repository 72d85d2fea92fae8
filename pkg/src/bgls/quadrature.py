"""Weighted L_p norms of radial profiles.

All integrals are taken in the log-radius variable ``t = log r``. With
``r**(d-1) dr = exp(d t) dt`` every power of ``r`` becomes an exponential in
``t`` and every ``|log r|`` factor a polynomial, so the log-power cores turn
into Gamma-type integrands ``y**m exp(-s y)`` and the infinite ranges decay
exponentially whenever the norm is finite.

The engine integrates ``exp(l(t))`` given the log-integrand ``l``; each
Gauss-Kronrod panel is scaled by its own maximum so values like ``y**400 *
exp(-198 y)`` never overflow. Results come back as logarithms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ValidationError
from .gamma_oracle import log_gamma

__all__ = [
    "QuadratureConfig",
    "NormResult",
    "LogIntegral",
    "sphere_surface",
    "log_integrate",
    "radial_integral",
    "lp_norm_weighted",
    "lp_norm_on_subset",
    "core_integral_quadrature",
]

LogIntegrand = Callable[[np.ndarray], "tuple[np.ndarray, np.ndarray]"]

# 15-point Kronrod extension of the 7-point Gauss rule
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
KRONROD_W = np.concatenate([_WK[:-1], _WK[::-1]])
GAUSS_W = np.zeros(15)
GAUSS_W[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])

_EPS = np.finfo(float).eps
# beyond this |t| the linear terms of a log-integrand swamp its log-power part
T_LIMIT = 1e12


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances for the adaptive engine.

    ``max_depth`` bounds both the bisection depth of a single panel and the
    number of doubling panels used to probe an infinite range; running out of
    tail panels is reported as divergence. ``tail_cap``, when given, truncates
    infinite radial ranges at that radius instead of probing.
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_depth: int = 60
    max_intervals: int = 20_000
    tail_drop: float = 60.0
    tail_cap: float | None = None

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValidationError("rel_tol and abs_tol must be positive")
        if self.max_depth < 10:
            raise ValidationError("max_depth must be at least 10")

    def refined(self, factor: float = 0.5) -> "QuadratureConfig":
        return QuadratureConfig(
            rel_tol=self.rel_tol * factor,
            abs_tol=self.abs_tol * factor,
            max_depth=self.max_depth,
            max_intervals=self.max_intervals,
            tail_drop=self.tail_drop,
            tail_cap=self.tail_cap,
        )


@dataclass(frozen=True)
class LogIntegral:
    """A signed integral stored as ``sign * exp(log_abs)``."""

    log_abs: float
    sign: float
    log_err: float
    converged: bool
    diverged: bool = False

    @property
    def value(self) -> float:
        if self.diverged:
            return math.inf
        if self.sign == 0.0:
            return 0.0
        return self.sign * math.exp(min(self.log_abs, 709.7))

    @property
    def rel_err(self) -> float:
        if self.sign == 0.0 or self.diverged:
            return 0.0 if self.sign == 0.0 else math.inf
        return math.exp(self.log_err - self.log_abs)


@dataclass(frozen=True)
class NormResult:
    value: float
    est_abs_error: float
    converged: bool
    diverged: bool = False

    @property
    def ok(self) -> bool:
        return self.converged and not self.diverged


def sphere_surface(d: int) -> float:
    """Surface measure 2 pi**(d/2) / Gamma(d/2) of the unit sphere in R^d."""
    if d < 1:
        raise ValidationError(f"dimension must be >= 1, got {d}")
    return 2.0 * math.pi ** (0.5 * d) / math.exp(log_gamma(0.5 * d))


def _gk_batch(fn: LogIntegrand, a: np.ndarray, b: np.ndarray):
    """Scaled Gauss-Kronrod sums for a batch of intervals of one integrand.

    Returns (K, S, E): the integral over each interval is ``S * exp(K)`` with
    error estimate ``E * exp(K)``.
    """
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    t = c[:, None] + h[:, None] * NODES[None, :]
    logabs, sign = fn(t)
    logabs = np.where(np.isnan(logabs), np.inf, logabs)
    with np.errstate(invalid="ignore"):
        K = np.max(np.where(sign != 0, logabs, -np.inf), axis=1)
    zero = ~np.isfinite(K) & (K < 0)
    Ksafe = np.where(zero, 0.0, K)
    with np.errstate(over="ignore", invalid="ignore"):
        v = np.where(sign != 0, sign * np.exp(logabs - Ksafe[:, None]), 0.0)
    kron = h * (v @ KRONROD_W)
    gauss = h * (v @ GAUSS_W)
    floor = 50.0 * _EPS * h * (np.abs(v) @ KRONROD_W)
    err = np.maximum(np.abs(kron - gauss), floor)
    kron = np.where(zero, 0.0, kron)
    err = np.where(zero, 0.0, err)
    return Ksafe, kron, err


def _probe_tail(fn: LogIntegrand, t0: float, direction: float, cfg: QuadratureConfig):
    """Cut ``[t0, +-inf)`` into doubling panels until the integrand has died.

    Returns (edges, diverged). The stop rule needs the log-integrand over the
    last panel to sit ``tail_drop`` below the running maximum; integrands of
    finite norms here are eventually log-concave-like in ``t`` so this is a
    safe certificate. Panels that never stop within ``max_depth`` doublings,
    or that reach ``|t| > T_LIMIT``, signal divergence.
    """
    edges = [t0]
    running_max = -np.inf
    length = 1.0
    samples = np.linspace(0.0, 1.0, 17)
    all_zero_panels = 0
    for _ in range(cfg.max_depth):
        lo = edges[-1]
        hi = lo + direction * length
        if abs(hi) > T_LIMIT:
            return edges, True
        t = lo + (hi - lo) * samples
        logabs, sign = fn(t[None, :])
        vals = np.where(sign[0] != 0, logabs[0], -np.inf)
        if np.any(np.isnan(vals)) or np.any(vals == np.inf):
            return edges, True
        edges.append(hi)
        panel_max = float(np.max(vals))
        running_max = max(running_max, panel_max)
        if running_max == -np.inf:
            all_zero_panels += 1
            if all_zero_panels >= 3:
                return edges, False
        elif np.all(vals[8:] < running_max - cfg.tail_drop) and len(edges) > 2:
            return edges, False
        length *= 2.0
    return edges, True


def log_integrate(
    pieces: Sequence[tuple[float, float, LogIntegrand]],
    cfg: QuadratureConfig = QuadratureConfig(),
    breakpoints: Sequence[Sequence[float]] | None = None,
    accept: Callable[[float, float], bool] | None = None,
) -> LogIntegral:
    """Integrate ``sign(t) * exp(logabs(t))`` over a union of pieces.

    Each piece is ``(a, b, fn)`` with ``fn(t) -> (logabs, sign)`` acting
    elementwise on arrays; ``a`` may be ``-inf`` and ``b`` may be ``+inf``.
    Error is controlled globally across all pieces. ``accept(log_total,
    log_err)`` replaces the default ``rel_tol``/``abs_tol`` test on the
    integral itself.
    """
    lo_list, hi_list, fn_list, depth_list = [], [], [], []
    fns: list[LogIntegrand] = []
    for idx, (a, b, fn) in enumerate(pieces):
        if not a < b:
            continue
        fid = len(fns)
        fns.append(fn)
        bps = sorted(x for x in (breakpoints[idx] if breakpoints else ()) if a < x < b)
        finite_lo, finite_hi = a, b
        edges_mid: list[float] = []
        if math.isinf(a) and math.isinf(b):
            raise ValidationError("doubly infinite pieces are not supported")
        if math.isinf(b):
            start = bps[-1] if bps else a
            tail, div = _probe_tail(fn, start, 1.0, cfg)
            if div:
                return LogIntegral(math.inf, 1.0, math.inf, False, True)
            edges_mid = tail[1:]
            finite_hi = start
            bps = [x for x in bps if x < start]
        elif math.isinf(a):
            start = bps[0] if bps else b
            tail, div = _probe_tail(fn, start, -1.0, cfg)
            if div:
                return LogIntegral(math.inf, 1.0, math.inf, False, True)
            edges_mid = tail[1:][::-1]
            finite_lo = start
            bps = [x for x in bps if x > start]
        edges = sorted(set([finite_lo, *bps, finite_hi, *edges_mid]))
        for lo, hi in zip(edges[:-1], edges[1:]):
            if hi > lo:
                lo_list.append(lo)
                hi_list.append(hi)
                fn_list.append(fid)
                depth_list.append(0)

    if not lo_list:
        return LogIntegral(-math.inf, 0.0, -math.inf, True)

    lo = np.array(lo_list, dtype=float)
    hi = np.array(hi_list, dtype=float)
    fid = np.array(fn_list, dtype=int)
    depth = np.array(depth_list, dtype=int)
    K = np.empty(lo.size)
    S = np.empty(lo.size)
    E = np.empty(lo.size)
    _evaluate(fns, lo, hi, fid, K, S, E, np.arange(lo.size))

    converged = False
    while True:
        Kmax = float(np.max(K))
        scale = np.exp(K - Kmax)
        total = float(np.sum(S * scale))
        errs = E * scale
        err = float(np.sum(errs))
        target = max(cfg.rel_tol * abs(total), cfg.abs_tol * math.exp(-min(Kmax, 700.0)))
        if accept is not None and total > 0.0 and err > 0.0:
            done = accept(Kmax + math.log(total), Kmax + math.log(err))
            target = err if done else min(target, 0.5 * err)
        if err <= target:
            converged = True
            break
        if lo.size >= cfg.max_intervals:
            break
        order = np.argsort(-errs)
        cum = np.cumsum(errs[order])
        n_split = int(np.searchsorted(cum, err - 0.5 * target)) + 1
        chosen = order[:n_split]
        chosen = chosen[depth[chosen] < cfg.max_depth]
        if chosen.size == 0:
            break
        mid = 0.5 * (lo[chosen] + hi[chosen])
        new_lo = mid
        new_hi = hi[chosen].copy()
        hi[chosen] = mid
        depth[chosen] += 1
        n_old = lo.size
        lo = np.concatenate([lo, new_lo])
        hi = np.concatenate([hi, new_hi])
        fid = np.concatenate([fid, fid[chosen]])
        depth = np.concatenate([depth, depth[chosen]])
        K = np.concatenate([K, np.empty(chosen.size)])
        S = np.concatenate([S, np.empty(chosen.size)])
        E = np.concatenate([E, np.empty(chosen.size)])
        redo = np.concatenate([chosen, np.arange(n_old, lo.size)])
        _evaluate(fns, lo, hi, fid, K, S, E, redo)

    if not math.isfinite(total):
        return LogIntegral(math.inf, 1.0, math.inf, False, True)
    sign = float(np.sign(total))
    log_abs = Kmax + math.log(abs(total)) if total != 0.0 else -math.inf
    log_err = Kmax + math.log(err) if err > 0.0 else -math.inf
    return LogIntegral(log_abs, sign, log_err, converged)


def _evaluate(fns, lo, hi, fid, K, S, E, idx):
    for f in np.unique(fid[idx]):
        sel = idx[fid[idx] == f]
        k, s, e = _gk_batch(fns[f], lo[sel], hi[sel])
        K[sel], S[sel], E[sel] = k, s, e


def _log_delta(domain, t: np.ndarray) -> np.ndarray:
    if domain.uses_boundary_distance:
        with np.errstate(divide="ignore"):
            return np.log(-np.expm1(t))
    return t


def radial_integral(
    profile,
    domain,
    *,
    p: float = 1.0,
    gradient: bool = False,
    signed: bool = False,
    log_weight: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None,
    r_lo: float | None = None,
    r_hi: float | None = None,
    quad: QuadratureConfig = QuadratureConfig(),
    accept: Callable[[float, float], bool] | None = None,
) -> LogIntegral:
    """Integral of ``|F(r)|**p * weight * r**(d-1) dr`` over a radial band.

    ``F`` is the profile value (or its radial derivative when ``gradient``).
    With ``signed`` the sign of ``F`` is kept (only meaningful for ``p = 1``).
    ``log_weight(t, log_delta)`` returns the log of the extra weight factor.
    The sphere measure is not included.
    """
    lo_r, hi_r = domain.radial_range
    band_lo = lo_r if r_lo is None else max(lo_r, r_lo)
    band_hi = hi_r if r_hi is None else min(hi_r, r_hi)
    if band_lo < lo_r or band_hi > hi_r or not band_lo < band_hi:
        raise ValidationError(f"band [{r_lo}, {r_hi}] not inside {domain.radial_range}")
    if quad.tail_cap is not None and math.isinf(band_hi):
        band_hi = quad.tail_cap
    d = domain.d
    pieces = []
    breaks = []
    for seg in profile.segments:
        a = max(seg.r_lo, band_lo)
        b = min(seg.r_hi, band_hi)
        if not a < b:
            continue
        if profile.segment_is_zero(seg, gradient):
            continue
        ta = math.log(a) if a > 0.0 else -math.inf
        tb = math.log(b) if math.isfinite(b) else math.inf

        def fn(t, seg=seg):
            logabs, sgn = profile.log_abs_t(seg, t, gradient)
            ld = _log_delta(domain, t)
            with np.errstate(invalid="ignore"):
                out = p * logabs + d * t
            if log_weight is not None:
                out = out + log_weight(t, ld)
            out = np.where(sgn == 0, -np.inf, out)
            return out, (sgn if signed else np.where(sgn == 0, 0.0, 1.0))

        pieces.append((ta, tb, fn))
        breaks.append([] if gradient else profile.zero_crossings_t(seg))
    return log_integrate(pieces, quad, breaks, accept)


def _norm_from(integral: LogIntegral, d: int, p: float) -> NormResult:
    if integral.diverged:
        return NormResult(math.inf, math.inf, False, True)
    if integral.sign == 0.0:
        return NormResult(0.0, 0.0, integral.converged)
    log_total = integral.log_abs + math.log(sphere_surface(d))
    value = math.exp(log_total / p) if log_total / p < 709.7 else math.inf
    return NormResult(value, value * integral.rel_err / p, integral.converged)


def lp_norm_weighted(
    profile,
    domain,
    p: float,
    weight_exp: float = 0.0,
    quad: QuadratureConfig = QuadratureConfig(),
    *,
    gradient: bool = False,
    log_weight: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None,
) -> NormResult:
    """``| F / delta**weight_exp |_p`` over the whole domain.

    ``F`` is the profile (``gradient=False``) or ``|grad f| = |f'(r)|``.
    ``log_weight`` adds a further factor inside the integral (already raised
    to whatever power the caller wants).
    """
    return lp_norm_on_subset(
        profile, domain, p, weight_exp, None, None, quad, gradient=gradient, log_weight=log_weight
    )


def lp_norm_on_subset(
    profile,
    domain,
    p: float,
    weight_exp: float,
    r_lo: float | None,
    r_hi: float | None,
    quad: QuadratureConfig = QuadratureConfig(),
    *,
    gradient: bool = False,
    log_weight: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None,
) -> NormResult:
    """Same as :func:`lp_norm_weighted` restricted to ``r_lo <= |x| <= r_hi``."""
    if not p >= 1.0:
        raise ValidationError(f"p must be >= 1, got {p}")

    def weight(t, ld):
        w = -p * weight_exp * ld if weight_exp != 0.0 else np.zeros_like(t)
        return w if log_weight is None else w + log_weight(t, ld)

    log_omega = math.log(sphere_surface(domain.d))

    def accept(log_total, log_err):
        # norm-level test: value * relerr / p <= rel_tol * value + abs_tol
        rel = math.exp(log_err - log_total) / p
        log_value = (log_total + log_omega) / p
        return rel <= quad.rel_tol or rel <= quad.abs_tol * math.exp(-min(log_value, 700.0))

    integral = radial_integral(
        profile, domain, p=p, gradient=gradient, log_weight=weight, r_lo=r_lo, r_hi=r_hi,
        quad=quad, accept=accept,
    )
    return _norm_from(integral, domain.d, p)


def core_integral_quadrature(s: float, m: float, quad: QuadratureConfig = QuadratureConfig()) -> LogIntegral:
    """Adaptive quadrature of ``int_1^inf exp(-s y) y**m dy``."""

    def fn(y):
        with np.errstate(divide="ignore"):
            return m * np.log(y) - s * y, np.ones_like(y)

    return log_integrate(
        [(1.0, math.inf, fn)], quad, accept=lambda lt, le: le - lt <= math.log(quad.rel_tol)
    )

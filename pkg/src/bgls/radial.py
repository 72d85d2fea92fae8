"""Radial test functions on the unit ball and its exterior.

Profiles are piecewise: log-power cores ``|log r|**Delta`` near the singular
end, cubic C^1 bridges, constants and zeros. Besides plain evaluation in ``r``
each segment can report ``log|F|`` and ``sign F`` as functions of ``t = log r``,
which is what the quadrature engine integrates; cores are evaluated through
``y = |t|`` directly so ``r = exp(-4000)`` is never formed.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ValidationError
from .quadrature import QuadratureConfig, radial_integral

__all__ = [
    "Shape",
    "DeltaModel",
    "DomainSpec",
    "PoincareParams",
    "LogPowerCore",
    "Bridge",
    "Constant",
    "Zero",
    "RadialProfile",
    "hermite_bridge",
    "make_u_delta",
    "make_v_delta",
    "constant_profile",
    "center",
    "mean_value",
    "delta_of_r",
]

E = math.e


class Shape(str, enum.Enum):
    UNIT_BALL = "ball"
    EXTERIOR = "exterior"


class DeltaModel(str, enum.Enum):
    ORIGIN = "origin"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class DomainSpec:
    shape: Shape
    d: int
    delta_model: DeltaModel = DeltaModel.ORIGIN

    def __post_init__(self):
        object.__setattr__(self, "shape", Shape(self.shape))
        object.__setattr__(self, "delta_model", DeltaModel(self.delta_model))
        if int(self.d) != self.d or self.d < 2:
            raise ValidationError(f"dimension must be an integer >= 2, got {self.d}")
        if self.shape is Shape.EXTERIOR and self.delta_model is not DeltaModel.ORIGIN:
            raise ValidationError("the exterior domain uses delta(x) = |x|")

    @classmethod
    def ball(cls, d: int, delta_model: DeltaModel | str = DeltaModel.ORIGIN) -> "DomainSpec":
        return cls(Shape.UNIT_BALL, d, DeltaModel(delta_model))

    @classmethod
    def exterior(cls, d: int) -> "DomainSpec":
        return cls(Shape.EXTERIOR, d, DeltaModel.ORIGIN)

    @property
    def bounded(self) -> bool:
        return self.shape is Shape.UNIT_BALL

    @property
    def radial_range(self) -> tuple[float, float]:
        return (0.0, 1.0) if self.bounded else (1.0, math.inf)

    @property
    def uses_boundary_distance(self) -> bool:
        return self.delta_model is DeltaModel.BOUNDARY

    def volume(self) -> float:
        from .quadrature import sphere_surface

        if not self.bounded:
            return math.inf
        return sphere_surface(self.d) / self.d


@dataclass(frozen=True)
class PoincareParams:
    alpha: float
    d: int

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > -1.0):
            raise ValidationError(f"alpha must lie in (-1, inf), got {self.alpha}")
        if int(self.d) != self.d or self.d < 2:
            raise ValidationError(f"dimension must be an integer >= 2, got {self.d}")

    @property
    def p0(self) -> float:
        return self.d * (1.0 + self.alpha)

    @property
    def bounded_admissible(self) -> bool:
        return self.p0 > 1.0

    def gap(self, p: float) -> float:
        """``|d - p (1 + alpha)|``."""
        return abs(self.d - p * (1.0 + self.alpha))


def delta_of_r(domain: DomainSpec, r: float) -> float:
    lo, hi = domain.radial_range
    if not lo <= r <= hi or (domain.bounded and r == 0.0 and domain.delta_model is DeltaModel.ORIGIN):
        raise ValidationError(f"radius {r} outside the radial range {domain.radial_range}")
    if domain.uses_boundary_distance:
        return 1.0 - r
    return r


# --- segments -------------------------------------------------------------


def _log_abs_diff(log_a: np.ndarray, c: float):
    """log|A - c| and its sign, given log A with A > 0."""
    if c == 0.0:
        return log_a, np.ones_like(log_a)
    big = log_a > 700.0
    with np.errstate(over="ignore"):
        diff = np.exp(np.where(big, 0.0, log_a)) - c
    with np.errstate(divide="ignore"):
        out = np.where(big, log_a, np.log(np.abs(diff)))
    sign = np.where(big, 1.0, np.sign(diff))
    return out, sign


@dataclass(frozen=True)
class LogPowerCore:
    """``|log r|**delta``; ``outer`` means ``(log r)**delta`` on ``r > 1``."""

    r_lo: float
    r_hi: float
    delta: float
    outer: bool = False

    def _y(self, r):
        return np.log(r) if self.outer else -np.log(r)

    def value(self, r):
        return self._y(r) ** self.delta

    def deriv(self, r):
        sgn = 1.0 if self.outer else -1.0
        return sgn * self.delta * self._y(r) ** (self.delta - 1.0) / r

    def log_value_t(self, t, c: float):
        y = t if self.outer else -t
        return _log_abs_diff(self.delta * np.log(y), c)

    def log_deriv_t(self, t):
        y = t if self.outer else -t
        out = math.log(self.delta) + (self.delta - 1.0) * np.log(y) - t
        return out, np.full_like(out, 1.0 if self.outer else -1.0)

    def roots_t(self, c: float) -> list[float]:
        if c <= 0.0:
            return []
        y = c ** (1.0 / self.delta)
        return [y if self.outer else -y]


@dataclass(frozen=True)
class Bridge:
    """Cubic ``sum_k coeffs[k] * (r - r_lo)**k``."""

    r_lo: float
    r_hi: float
    coeffs: tuple[float, float, float, float]

    def value(self, r):
        x = np.asarray(r, dtype=float) - self.r_lo
        c0, c1, c2, c3 = self.coeffs
        return c0 + x * (c1 + x * (c2 + x * c3))

    def deriv(self, r):
        x = np.asarray(r, dtype=float) - self.r_lo
        _, c1, c2, c3 = self.coeffs
        return c1 + x * (2.0 * c2 + x * 3.0 * c3)

    def log_value_t(self, t, c: float):
        v = self.value(np.exp(t)) - c
        with np.errstate(divide="ignore"):
            return np.log(np.abs(v)), np.sign(v)

    def log_deriv_t(self, t):
        v = self.deriv(np.exp(t))
        with np.errstate(divide="ignore"):
            return np.log(np.abs(v)), np.sign(v)

    def roots_t(self, c: float) -> list[float]:
        c0, c1, c2, c3 = self.coeffs
        roots = np.roots([c3, c2, c1, c0 - c])
        out = []
        for z in roots:
            if abs(z.imag) < 1e-12:
                r = self.r_lo + z.real
                if self.r_lo < r < self.r_hi:
                    out.append(math.log(r))
        return sorted(out)


@dataclass(frozen=True)
class Constant:
    r_lo: float
    r_hi: float
    c: float = 0.0

    def value(self, r):
        return np.full_like(np.asarray(r, dtype=float), self.c)

    def deriv(self, r):
        return np.zeros_like(np.asarray(r, dtype=float))

    def log_value_t(self, t, c: float):
        v = self.c - c
        with np.errstate(divide="ignore"):
            return np.full_like(t, math.log(abs(v)) if v != 0.0 else -np.inf), np.full_like(t, np.sign(v))

    def log_deriv_t(self, t):
        return np.full_like(t, -np.inf), np.zeros_like(t)

    def roots_t(self, c: float) -> list[float]:
        return []


@dataclass(frozen=True)
class Zero(Constant):
    c: float = field(default=0.0, init=False)


Segment = LogPowerCore | Bridge | Constant


@dataclass(frozen=True)
class RadialProfile:
    """``f(r) = scale * g(r) - offset`` with ``g`` piecewise over ``segments``.

    The centering constant lives in ``offset`` instead of being folded into the
    segments, so the raw core stays comparable with the closed-form oracle.
    """

    segments: tuple[Segment, ...]
    scale: float = 1.0
    offset: float = 0.0
    label: str = "profile"

    def __post_init__(self):
        segs = self.segments
        if not segs:
            raise ValidationError("a profile needs at least one segment")
        for left, right in zip(segs[:-1], segs[1:]):
            if left.r_hi != right.r_lo:
                raise ValidationError(f"segments not contiguous at {left.r_hi} / {right.r_lo}")
        for s in segs:
            if not s.r_lo < s.r_hi:
                raise ValidationError(f"empty segment [{s.r_lo}, {s.r_hi}]")
        if self.scale == 0.0:
            raise ValidationError("scale must be nonzero")

    @property
    def r_range(self) -> tuple[float, float]:
        return self.segments[0].r_lo, self.segments[-1].r_hi

    @property
    def knots(self) -> list[float]:
        return [s.r_hi for s in self.segments[:-1]]

    def _locate(self, r: np.ndarray) -> np.ndarray:
        his = np.array([s.r_hi for s in self.segments[:-1]])
        return np.searchsorted(his, r, side="right")

    def _apply(self, r, method: str):
        arr = np.atleast_1d(np.asarray(r, dtype=float))
        lo, hi = self.r_range
        if np.any(arr < lo) or np.any(arr > hi):
            raise ValidationError(f"radius outside [{lo}, {hi}]")
        idx = self._locate(arr)
        out = np.empty_like(arr)
        for k in np.unique(idx):
            sel = idx == k
            with np.errstate(divide="ignore", invalid="ignore"):
                out[sel] = getattr(self.segments[k], method)(arr[sel])
        return out if np.ndim(r) else float(out[0])

    def value(self, r):
        return self.scale * self._apply(r, "value") - self.offset

    def deriv(self, r):
        return self.scale * self._apply(r, "deriv")

    def segment_at(self, r: float) -> Segment:
        return self.segments[int(self._locate(np.array([r]))[0])]

    def one_sided(self, knot: float) -> tuple[tuple[float, float], tuple[float, float]]:
        """(value, derivative) just left and just right of a knot, from the segment formulas."""
        k = [s.r_hi for s in self.segments].index(knot)
        left, right = self.segments[k], self.segments[k + 1]
        lv = self.scale * float(left.value(np.array([knot]))[0]) - self.offset
        ld = self.scale * float(left.deriv(np.array([knot]))[0])
        rv = self.scale * float(right.value(np.array([knot]))[0]) - self.offset
        rd = self.scale * float(right.deriv(np.array([knot]))[0])
        return (lv, ld), (rv, rd)

    # quadrature hooks

    def _shift(self) -> float:
        return self.offset / self.scale

    def log_abs_t(self, seg: Segment, t: np.ndarray, gradient: bool):
        if gradient:
            out, sgn = seg.log_deriv_t(t)
        else:
            out, sgn = seg.log_value_t(t, self._shift())
        return out + math.log(abs(self.scale)), sgn * math.copysign(1.0, self.scale)

    def segment_is_zero(self, seg: Segment, gradient: bool) -> bool:
        if isinstance(seg, Constant):
            return gradient or seg.c == self._shift()
        return False

    def zero_crossings_t(self, seg: Segment) -> list[float]:
        return seg.roots_t(self._shift())

    def is_constant(self) -> bool:
        return all(isinstance(s, Constant) for s in self.segments) and len(
            {s.c for s in self.segments}
        ) == 1

    def scaled(self, c: float) -> "RadialProfile":
        return replace(self, scale=self.scale * c, offset=self.offset * c)

    def shifted(self, c: float) -> "RadialProfile":
        """Profile minus the constant ``c``."""
        return replace(self, offset=self.offset + c)


def hermite_bridge(r0: float, r1: float, v0: float, d0: float, v1: float, d1: float) -> Bridge:
    """The cubic matching value and slope at both ends of ``[r0, r1]``."""
    if not r1 > r0:
        raise ValidationError(f"degenerate bridge interval [{r0}, {r1}]")
    h = r1 - r0
    c2 = (3.0 * (v1 - v0) / h - 2.0 * d0 - d1) / h
    c3 = (d0 + d1 - 2.0 * (v1 - v0) / h) / (h * h)
    return Bridge(r0, r1, (float(v0), float(d0), float(c2), float(c3)))


def _check_delta(delta: float) -> None:
    if not (math.isfinite(delta) and delta > 1.0):
        raise ValidationError(f"Delta must satisfy Delta > 1, got {delta}")


def make_u_delta(delta: float, d: int, *, core_only: bool = False) -> RadialProfile:
    """Bounded-case extremal ``(-log r)**Delta`` on ``r < 1/e``, bridged to zero at ``2/e``.

    The bridge leaves ``1/e`` with the core's own slope ``-e*Delta``.
    """
    _check_delta(delta)
    if d < 2:
        raise ValidationError("dimension must be >= 2")
    core = LogPowerCore(0.0, 1.0 / E, delta)
    if core_only:
        return RadialProfile((core, Zero(1.0 / E, 1.0)), label=f"u_core(Delta={delta})")
    bridge = hermite_bridge(1.0 / E, 2.0 / E, 1.0, -E * delta, 0.0, 0.0)
    return RadialProfile((core, bridge, Zero(2.0 / E, 1.0)), label=f"u(Delta={delta})")


def make_v_delta(delta: float, d: int, *, core_only: bool = False) -> RadialProfile:
    """Unbounded-case extremal: zero up to ``e/2``, bridge to ``(log r)**Delta`` from ``e`` on."""
    _check_delta(delta)
    if d < 2:
        raise ValidationError("dimension must be >= 2")
    core = LogPowerCore(E, math.inf, delta, outer=True)
    if core_only:
        return RadialProfile((Zero(1.0, E), core), label=f"v_core(Delta={delta})")
    bridge = hermite_bridge(E / 2.0, E, 0.0, 0.0, 1.0, delta / E)
    return RadialProfile((Zero(1.0, E / 2.0), bridge, core), label=f"v(Delta={delta})")


def constant_profile(c: float, domain: DomainSpec) -> RadialProfile:
    lo, hi = domain.radial_range
    return RadialProfile((Constant(lo, hi, float(c)),), label=f"const({c})")


def mean_value(profile: RadialProfile, domain: DomainSpec, quad: QuadratureConfig = QuadratureConfig()) -> float:
    """``int_D f / |D|`` on the unit ball; constant pieces are integrated exactly."""
    if not domain.bounded:
        raise ValidationError("the mean is only defined on the bounded domain")
    d = domain.d
    exact = 0.0
    rest = []
    for seg in profile.segments:
        if isinstance(seg, Constant):
            exact += seg.c * (seg.r_hi ** d - seg.r_lo ** d)
        else:
            rest.append(seg)
    total = profile.scale * exact
    if rest:
        raw = RadialProfile(tuple(_pad(rest, domain)), scale=profile.scale)
        integral = radial_integral(raw, domain, p=1.0, signed=True, quad=quad)
        if not integral.converged:
            from .errors import DivergenceError

            raise DivergenceError("mean value integral did not converge")
        # |D| = omega / d and the integral omits omega
        total += d * integral.value
    return total - profile.offset


def _pad(segs, domain):
    # fill gaps with zeros so the auxiliary profile stays contiguous
    lo, hi = domain.radial_range
    out = []
    cursor = lo
    for s in segs:
        if s.r_lo > cursor:
            out.append(Zero(cursor, s.r_lo))
        out.append(s)
        cursor = s.r_hi
    if cursor < hi:
        out.append(Zero(cursor, hi))
    return out


def center(profile: RadialProfile, domain: DomainSpec, quad: QuadratureConfig = QuadratureConfig()) -> RadialProfile:
    """``f - mean(f)`` on the bounded domain; the identity on the exterior."""
    if not domain.bounded:
        return profile
    if profile.is_constant():
        # exact: a constant centers to zero
        return replace(profile, offset=profile.scale * profile.segments[0].c)
    return profile.shifted(mean_value(profile, domain, quad))

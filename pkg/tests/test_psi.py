import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bgls.errors import DivergenceError, ValidationError
from bgls.psi import (
    ExponentInterval,
    GridSpec,
    bgls_norm,
    constant_psi,
    make_power_psi,
    make_tail_psi,
    solve_h,
    transform_alpha_d,
)
from bgls.radial import PoincareParams

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


@pytest.mark.parametrize(
    "a, b, beta, gamma, p, expected",
    [
        (1, 3, 0, 0, 2.0, 1.0),
        (1, 3, 1, 1, 2.0, 1.0),
        (1, 3, 1, 2, 2.5, 8.0 / 3.0),
    ],
)
def test_power_psi_examples(a, b, beta, gamma, p, expected):
    assert make_power_psi(a, b, beta, gamma)(p) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize(
    "args",
    [(3, 1, 1, 1), (1, 3, -1, 0), (1, 3, 0, -0.5), (1, math.inf, 1, 1), (0.5, 3, 1, 1)],
)
def test_power_psi_rejects_bad_parameters(args):
    with pytest.raises(ValidationError):
        make_power_psi(*args)


def test_interval_invariant():
    with pytest.raises(ValidationError):
        ExponentInterval(2.0, 2.0)
    assert ExponentInterval(1.0).bounded is False
    assert ExponentInterval(1.0, 3.0).contains(2.0)
    assert not ExponentInterval(1.0, 3.0).contains(3.0)


def test_solve_h_examples():
    assert solve_h(1.0, 1.0, -1.0) == pytest.approx(GOLDEN, abs=1e-10)
    assert solve_h(2.0, 2.0, -2.0) == pytest.approx(1.0 + math.sqrt(2.0), abs=1e-10)
    with pytest.raises(ValidationError):
        solve_h(1.0, 0.0, -1.0)


def test_solve_h_residual_random_triples():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        a = rng.uniform(1.0, 4.0)
        beta = rng.uniform(0.5, 3.0)
        gamma = -rng.uniform(0.5, 2.0)
        h = solve_h(a, beta, gamma)
        assert h > a
        rhs = h ** (-gamma)
        assert abs((h - a) ** (-beta) - rhs) <= 1e-12 * rhs


def test_solve_h_wide_range_is_resolution_limited():
    # far from this region h - a shrinks toward ulp(a); the residual is then
    # bounded by the rounding of h itself, or h is refused
    rng = np.random.default_rng(99)
    for _ in range(300):
        a = rng.uniform(1.0, 10.0)
        beta = rng.uniform(0.1, 5.0)
        gamma = -rng.uniform(0.1, 5.0)
        try:
            h = solve_h(a, beta, gamma)
        except ValidationError:
            continue
        x = h - a
        assert x > 0.0
        floor = 4.0 * beta * math.ulp(h) / x
        rhs = h ** (-gamma)
        assert abs(x ** (-beta) - rhs) <= max(1e-12, 2.0 * floor) * rhs


def test_tail_psi_examples():
    psi = make_tail_psi(1.0, 1.0, -1.0)
    h = psi.family.h
    assert psi(1.2) == pytest.approx(5.0, rel=1e-14)
    assert psi(10.0) == pytest.approx(10.0, rel=1e-14)
    assert (h - 1.0) ** -1.0 == pytest.approx(h, rel=1e-12)
    assert psi(h) == pytest.approx(psi(math.nextafter(h, math.inf)), rel=1e-12)
    assert not psi.interval.bounded


def test_tail_psi_requires_negative_gamma():
    with pytest.raises(ValidationError):
        make_tail_psi(1.0, 1.0, 0.5)


@pytest.mark.parametrize(
    "psi, alpha, d, p, expected",
    [
        (constant_psi(1.0, 1.0, 5.0), 0.0, 3, 2.0, 2.0),
        (constant_psi(1.0, 1.0, 5.0), 0.0, 2, 1.0, 1.0),
        (make_power_psi(1.0, 5.0, 1.0, 0.0), 0.5, 3, 1.5, 4.0),
    ],
)
def test_transform_examples(psi, alpha, d, p, expected):
    out = transform_alpha_d(psi, PoincareParams(alpha=alpha, d=d))
    assert out(p) == pytest.approx(expected, rel=1e-14)
    assert out.interval == psi.interval


def test_transform_pole_is_infinite():
    out = transform_alpha_d(constant_psi(1.0, 1.0, 5.0), PoincareParams(alpha=0.0, d=3))
    assert out(3.0) == math.inf


def test_transform_pointwise_identity_1000_samples():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        beta, gamma = rng.uniform(0.0, 3.0, 2)
        psi = make_power_psi(1.0, 6.0, beta, gamma)
        alpha = rng.uniform(-0.5, 2.0)
        d = int(rng.integers(2, 6))
        p = rng.uniform(1.0 + 1e-6, 6.0 - 1e-6)
        gap = abs(d - p * (1.0 + alpha))
        if gap == 0.0:
            continue
        out = transform_alpha_d(psi, PoincareParams(alpha=alpha, d=d))(p)
        assert out * gap == pytest.approx(p * psi(p), rel=1e-12)


def test_grid_refines_toward_both_endpoints():
    pts = GridSpec(n=64, offset=1e-6).points(ExponentInterval(1.0, 3.0))
    assert pts[0] == pytest.approx(1.0 + 2e-6)
    assert pts[-1] == pytest.approx(3.0 - 2e-6)
    assert np.all(np.diff(pts) > 0)
    left = pts[: len(pts) // 2] - 1.0
    ratios = left[1:] / left[:-1]
    assert np.allclose(ratios, ratios[0])


def test_grid_on_unbounded_interval_reaches_cap():
    pts = GridSpec(n=64, cap=200.0).points(ExponentInterval(2.0))
    assert pts[0] > 2.0
    assert pts[-1] == pytest.approx(200.0)


def test_bgls_norm_examples():
    psi = make_power_psi(1.0, 3.0, 1.0, 1.0)
    assert bgls_norm(psi, psi).value == pytest.approx(1.0, rel=1e-14)
    assert bgls_norm(lambda p: 2.0 * psi(p), psi).value == pytest.approx(2.0, rel=1e-14)
    vol = 4.0 * math.pi / 3.0
    res = bgls_norm(lambda p: vol ** (1.0 / p), constant_psi(1.0, 1.0, 3.0))
    assert res.value == pytest.approx(vol, rel=1e-5)
    assert res.argmax_p == pytest.approx(1.0, abs=1e-5)
    assert not res.infinite


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=1e-3, max_value=1e3))
def test_bgls_homogeneity(c):
    psi = make_power_psi(1.0, 3.0, 0.5, 1.5)
    lp = lambda p: math.exp(math.sin(3.0 * p)) + p  # noqa: E731
    base = bgls_norm(lp, psi, GridSpec(n=64))
    scaled = bgls_norm(lambda p: c * lp(p), psi, GridSpec(n=64))
    assert scaled.value == pytest.approx(c * base.value, rel=1e-14)
    assert scaled.argmax_p == base.argmax_p


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=1e-3, max_value=1e3))
def test_bgls_psi_scaling_and_argmax(c):
    psi = make_power_psi(1.0, 3.0, 0.5, 1.5)
    lp = lambda p: math.exp(math.sin(3.0 * p)) + p  # noqa: E731
    base = bgls_norm(lp, psi, GridSpec(n=64))
    res = bgls_norm(lp, psi.scaled(c), GridSpec(n=64))
    assert res.value == pytest.approx(base.value / c, rel=1e-14)
    assert res.argmax_p == base.argmax_p


def test_shrinking_interval_recovers_lr_norm():
    r = 2.0
    vol = 4.0 * math.pi / 3.0
    lp = lambda p: (vol * (1.0 + 0.3 * math.sin(p))) ** (1.0 / p)  # noqa: E731
    target = lp(r)
    errs = []
    for eps in (0.1, 0.01):
        psi = make_power_psi(r - eps, r + eps, 0.0, 0.0)
        errs.append(abs(bgls_norm(lp, psi).value - target))
    assert errs[1] < errs[0]
    assert errs[1] / target < 1e-2


def test_bgls_flags_endpoint_blowup():
    psi = constant_psi(1.0, 1.0, 3.0)
    res = bgls_norm(lambda p: (p - 1.0) ** -3.0, psi, inf_cap=1e6)
    assert res.infinite and res.value == math.inf


def test_bgls_propagates_infinite_norm():
    with pytest.raises(DivergenceError):
        bgls_norm(lambda p: math.inf, constant_psi(1.0, 1.0, 3.0), GridSpec(n=8))


def test_explicit_grid_must_be_inside_interval():
    psi = constant_psi(1.0, 1.0, 3.0)
    assert bgls_norm(lambda p: p, psi, [1.5, 2.5]).value == 2.5
    with pytest.raises(ValidationError):
        bgls_norm(lambda p: p, psi, [0.5, 2.0])


def test_validate_accepts_power_family():
    make_power_psi(1.0, 3.0, 1.0, 2.0).validate()
    with pytest.raises(ValidationError):
        constant_psi(-1.0, 1.0, 3.0)

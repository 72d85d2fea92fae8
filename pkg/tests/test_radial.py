import math

import numpy as np
import pytest
from scipy import integrate

from bgls.errors import ValidationError
from bgls.gamma_oracle import core_integral
from bgls.quadrature import QuadratureConfig, radial_integral
from bgls.radial import (
    Constant,
    DeltaModel,
    DomainSpec,
    PoincareParams,
    RadialProfile,
    center,
    constant_profile,
    delta_of_r,
    hermite_bridge,
    make_u_delta,
    make_v_delta,
    mean_value,
)

E = math.e
DELTAS = (1.5, 2.0, 3.0)


def test_hermite_examples():
    assert hermite_bridge(0, 1, 0, 0, 0, 0).coeffs == (0.0, 0.0, 0.0, 0.0)
    line = hermite_bridge(0, 1, 0, 1, 1, 1)
    assert line.coeffs == pytest.approx((0.0, 1.0, 0.0, 0.0), abs=1e-15)
    smooth = hermite_bridge(0, 1, 1, 0, 0, 0)
    assert smooth.coeffs == pytest.approx((1.0, 0.0, -3.0, 2.0))
    assert float(smooth.value(np.array([0.5]))[0]) == pytest.approx(0.5)
    with pytest.raises(ValidationError):
        hermite_bridge(1, 1, 0, 0, 0, 0)


@pytest.mark.parametrize("r0, r1, v0, d0, v1, d1", [(0.2, 0.7, 1.3, -2.0, 0.4, 5.0), (2.0, 3.5, 0.0, 1.0, -1.0, 0.0)])
def test_hermite_interpolates_end_data(r0, r1, v0, d0, v1, d1):
    b = hermite_bridge(r0, r1, v0, d0, v1, d1)
    ends = np.array([r0, r1])
    assert b.value(ends) == pytest.approx([v0, v1], abs=1e-12)
    assert b.deriv(ends) == pytest.approx([d0, d1], abs=1e-12)


def test_u_delta_examples():
    u = make_u_delta(2.0, 2)
    assert u.value(math.exp(-2.0)) == pytest.approx(4.0, rel=1e-14)
    (lv, ld), (rv, rd) = u.one_sided(1.0 / E)
    assert lv == pytest.approx(1.0) and rv == pytest.approx(1.0)
    assert ld == pytest.approx(-2.0 * E) and rd == pytest.approx(-2.0 * E)
    assert u.value(np.array([2.0 / E, 0.9, 1.0])) == pytest.approx([0.0, 0.0, 0.0], abs=1e-15)


def test_v_delta_examples():
    v = make_v_delta(2.0, 2)
    assert v.value(E**2) == pytest.approx(4.0, rel=1e-14)
    (lv, ld), (rv, rd) = v.one_sided(E)
    assert lv == pytest.approx(1.0) and rv == pytest.approx(1.0)
    assert ld == pytest.approx(2.0 / E) and rd == pytest.approx(2.0 / E)
    assert v.value(1.2) == 0.0


@pytest.mark.parametrize("maker", [make_u_delta, make_v_delta])
@pytest.mark.parametrize("delta", [1.0, 0.5, float("nan")])
def test_extremals_reject_small_delta(maker, delta):
    with pytest.raises(ValidationError):
        maker(delta, 2)


@pytest.mark.parametrize("maker", [make_u_delta, make_v_delta])
@pytest.mark.parametrize("delta", DELTAS)
def test_c1_at_every_knot(maker, delta):
    f = maker(delta, 3)
    for knot in f.knots:
        (lv, ld), (rv, rd) = f.one_sided(knot)
        assert lv == pytest.approx(rv, abs=1e-12)
        assert ld == pytest.approx(rd, abs=1e-12)


@pytest.mark.parametrize("maker, lo, hi", [(make_u_delta, 1e-2, 1.0), (make_v_delta, 1.0, 60.0)])
def test_derivative_against_finite_differences(maker, lo, hi):
    rng = np.random.default_rng(3)
    f = maker(2.0, 2)
    knots = np.array(f.knots)
    h = 1e-6
    checked = 0
    for r in np.exp(rng.uniform(math.log(lo), math.log(hi), 400)):
        if np.min(np.abs(knots - r)) < 1e-3 or r - 2 * h < lo or r + 2 * h > hi:
            continue
        fd = (f.value(r + h) - f.value(r - h)) / (2.0 * h)
        exact = f.deriv(r)
        assert fd == pytest.approx(exact, rel=1e-5, abs=1e-7)
        checked += 1
        if checked == 200:
            break
    assert checked == 200


def test_u_delta_mean_against_gamma_oracle(ball2):
    # core part via Gamma(3, 2) / 2^3, bridge part exactly 5 / (12 e^2)
    expected = 2.0 * (core_integral(2.0, 2.0) + 5.0 / (12.0 * E**2))
    assert expected == pytest.approx(10.0 / 3.0 * math.exp(-2.0), rel=1e-14)
    assert mean_value(make_u_delta(2.0, 2), ball2) == pytest.approx(expected, rel=1e-10)


def test_mean_against_scipy(ball2):
    u = make_u_delta(1.5, 3)
    dom = DomainSpec.ball(3)
    ref = 0.0
    for a, b in ((0.0, 1 / E), (1 / E, 2 / E)):
        ref += integrate.quad(lambda r: u.value(r) * r * r, a, b, epsabs=0, epsrel=1e-13, limit=200)[0]
    assert mean_value(u, dom) == pytest.approx(3.0 * ref, rel=1e-9)


def test_center_constant_is_zero(ball2):
    f0 = center(constant_profile(5.0, ball2), ball2)
    assert f0.value(np.array([0.1, 0.5, 1.0])) == pytest.approx([0.0, 0.0, 0.0], abs=0)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_centered_profile_integrates_to_zero(d):
    dom = DomainSpec.ball(d)
    f0 = center(make_u_delta(2.0, d), dom)
    integral = radial_integral(f0, dom, p=1.0, signed=True)
    assert abs(integral.value) < 1e-10


def test_center_is_idempotent(ball2):
    f0 = center(make_u_delta(2.0, 2), ball2)
    f00 = center(f0, ball2)
    assert f00.offset == pytest.approx(f0.offset, rel=1e-10)


def test_center_is_identity_on_exterior(exterior2):
    v = make_v_delta(2.0, 2)
    assert center(v, exterior2) is v


def test_offset_is_symbolic(ball2):
    u = make_u_delta(2.0, 2)
    f0 = center(u, ball2)
    assert f0.segments == u.segments
    assert f0.value(0.05) == pytest.approx(u.value(0.05) - f0.offset, rel=1e-15)


@pytest.mark.parametrize(
    "domain, r, expected",
    [
        (DomainSpec.ball(2, DeltaModel.BOUNDARY), 0.25, 0.75),
        (DomainSpec.ball(2, DeltaModel.ORIGIN), 0.25, 0.25),
        (DomainSpec.exterior(2), 3.0, 3.0),
    ],
)
def test_delta_of_r(domain, r, expected):
    assert delta_of_r(domain, r) == expected


def test_delta_of_r_out_of_range():
    with pytest.raises(ValidationError):
        delta_of_r(DomainSpec.ball(2), 1.5)
    with pytest.raises(ValidationError):
        delta_of_r(DomainSpec.exterior(2), 0.5)


def test_domain_and_params_invariants():
    with pytest.raises(ValidationError):
        DomainSpec("exterior", 2, "boundary")
    with pytest.raises(ValidationError):
        DomainSpec.ball(1)
    with pytest.raises(ValidationError):
        PoincareParams(alpha=-1.0, d=2)
    assert PoincareParams(alpha=0.5, d=2).p0 == 3.0
    assert not PoincareParams(alpha=-0.5, d=2).bounded_admissible
    assert DomainSpec.ball(3).volume() == pytest.approx(4.0 * math.pi / 3.0)


def test_profile_rejects_gaps():
    with pytest.raises(ValidationError):
        RadialProfile((Constant(0.0, 0.5, 1.0), Constant(0.6, 1.0, 1.0)))


def test_radius_outside_profile_range():
    with pytest.raises(ValidationError):
        make_u_delta(2.0, 2).value(1.5)


def test_refined_quadrature_agrees_on_mean(ball2):
    u = make_u_delta(3.0, 2)
    a = mean_value(u, ball2)
    b = mean_value(u, ball2, QuadratureConfig().refined(0.01))
    assert a == pytest.approx(b, rel=1e-9)

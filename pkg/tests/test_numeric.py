from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from rieszip.errors import PrecisionError
from rieszip.numeric import (RealBall, UnimodularPoint, as_fraction, ball_decimal_pair, ball_max,
                             circle_constant, circle_constant_lower_rational, circle_dist,
                             circle_point, cos_pi, frac_dist, fraction_str, nearest_int,
                             signed_frac, sin_pi)

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=10 ** 6)
angles = st.fractions(min_value=0, max_value=1, max_denominator=10 ** 4)


def test_floats_are_refused():
    with pytest.raises(TypeError):
        as_fraction(0.5)
    assert as_fraction("3/8") == Fraction(3, 8)


def test_nearest_int_ties_go_down():
    assert nearest_int(Fraction(1, 2)) == 0
    assert nearest_int(Fraction(3, 2)) == 1
    assert nearest_int(Fraction(-1, 2)) == -1
    assert signed_frac(Fraction(1, 2)) == Fraction(1, 2)
    assert signed_frac(Fraction(7, 3)) == Fraction(1, 3)
    assert signed_frac(Fraction(8, 3)) == Fraction(-1, 3)


@given(rationals)
def test_frac_dist_invariants(x):
    d = frac_dist(x)
    assert 0 <= d <= Fraction(1, 2)
    assert d == frac_dist(x + 7) == frac_dist(-x)
    assert d == abs(x - nearest_int(x))
    assert -Fraction(1, 2) < signed_frac(x) <= Fraction(1, 2)


@given(rationals, st.fractions(min_value=0, max_value=3, max_denominator=1000))
def test_frac_dist_ball_encloses_points(x, w):
    b = RealBall.from_bounds(x, x + w)
    enc = frac_dist(b)
    for k in range(5):
        assert enc.contains(frac_dist(x + w * Fraction(k, 4)))


@given(angles)
def test_sandwich_bound(theta):
    # 4{t} <= |e(t) - 1| <= 2 pi {t}
    d = frac_dist(theta)
    dist = circle_dist(1, theta)
    assert (dist - 4 * d).upper >= 0
    assert (circle_constant() * d - dist).upper >= 0


@given(st.integers(min_value=1, max_value=10 ** 60), angles)
def test_circle_dist_reduces_mod_denominator(n, theta):
    q = theta.denominator
    assert circle_dist(n, theta).overlaps(circle_dist(n % q, theta))


@given(st.integers(min_value=1, max_value=500), st.fractions(min_value=0, max_value=1,
                                                             max_denominator=97))
@settings(max_examples=60)
def test_circle_dist_against_double_precision(n, theta):
    ref = abs(mpmath.expj(2 * mpmath.pi * n * mpmath.mpf(theta.numerator) / theta.denominator) - 1)
    b = circle_dist(n, theta)
    assert abs(float(b) - float(ref)) < 1e-12


def test_circle_dist_frozen_values():
    # oracle: mpmath at 40 digits
    sqrt3 = Fraction("1.732050807568877293527446341505872366943")
    assert circle_dist(1, Fraction(1, 3)).overlaps(
        RealBall.from_bounds(sqrt3 - Fraction(1, 10 ** 38), sqrt3 + Fraction(1, 10 ** 38)))
    v = Fraction("1.94985582436364721403626336599")
    assert abs(circle_dist(3, Fraction(1, 7)).mid - v) < Fraction(1, 10 ** 28)
    assert circle_dist(10 ** 100, Fraction(1, 2)).is_exact


def test_ball_angle_precision_guard():
    theta = RealBall.from_bounds(Fraction(1, 3) - Fraction(1, 2 ** 80),
                                 Fraction(1, 3) + Fraction(1, 2 ** 80))
    circle_dist(2 ** 20, theta)
    with pytest.raises(PrecisionError):
        circle_dist(2 ** 200, theta)


@given(rationals)
def test_cos_sin_pi_match_mpmath(t):
    with mpmath.workdps(40):
        c = mpmath.cospi(mpmath.mpf(t.numerator) / t.denominator)
        s = mpmath.sinpi(mpmath.mpf(t.numerator) / t.denominator)
    assert abs(float(cos_pi(t)) - float(c)) < 1e-14
    assert abs(float(sin_pi(t)) - float(s)) < 1e-14
    assert (cos_pi(t).square() + sin_pi(t).square()).contains(1)


def test_circle_point_quarter_turn():
    z = circle_point(5, Fraction(1, 4))
    assert z.re.contains(0) and z.im.contains(1)


@given(st.fractions(max_denominator=1000), st.fractions(max_denominator=1000))
def test_ball_arithmetic_contains_exact(a, b):
    x, y = RealBall.exact(a), RealBall.exact(b)
    assert (x + y).contains(a + b)
    assert (x * y).contains(a * b)
    assert (x - y).contains(a - b)
    if b:
        assert (x / y).contains(a / b)


def test_ball_max_and_json_round_trip():
    a = RealBall.from_bounds(0, 1)
    b = RealBall.from_bounds(Fraction(1, 2), Fraction(3, 2))
    m = ball_max([a, b])
    assert m.lower == Fraction(1, 2) and m.upper == Fraction(3, 2)
    pi = RealBall.pi()
    back = RealBall.from_json(pi.to_json())
    assert back.lower == pi.lower and back.upper == pi.upper


def test_decimal_pair_covers_ball():
    b = RealBall.pi(128) / 3
    value, radius = ball_decimal_pair(b)
    v, r = Fraction(value), Fraction(radius)
    assert v - r <= b.lower and b.upper <= v + r
    assert "e" in radius and "." in radius


def test_two_pi_lower_rational():
    two_pi_lo = 2 * Fraction("3.141592653589793238462643383279502884197")
    c = circle_constant_lower_rational()
    assert c < two_pi_lo and two_pi_lo - c < Fraction(1, 10 ** 18)


def test_unimodular_point_reduces():
    assert UnimodularPoint.parse("7/3").angle == Fraction(1, 3)
    assert str(UnimodularPoint.parse("-1/4")) == "3/4"
    assert fraction_str(Fraction(4, 2)) == "2"

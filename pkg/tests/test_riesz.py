from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from rieszip import riesz as R, sequences as S
from rieszip.errors import DissociationError, InfeasibleError
from rieszip.kernels import fejer_coeff, max_cap
from rieszip.numeric import RealBall, cos_pi

DEMO = R.RieszSpec((1, 10, 100, 1000), (2, 2, 3, 3))


def test_dissociation_gaps():
    cert = R.check_dissociation(DEMO)
    assert cert.gaps == ((1, 5), (2, 55), (3, 355)) and cert.increasing
    assert R.gap_intervals(DEMO) == [(2, 8), (22, 78), (322, 678)]


def test_dissociation_failure_names_index():
    with pytest.raises(DissociationError) as e:
        R.check_dissociation(R.RieszSpec((1, 4, 100), (2, 2)))
    assert (e.value.k, e.value.deficit) == (1, 1)


def test_spec_validation():
    with pytest.raises(ValueError):
        R.RieszSpec((1, 10), (1, 1, 1))
    with pytest.raises(ValueError):
        R.RieszSpec((1, 10), (0,))
    with pytest.raises(ValueError, match="cap violation"):
        R.RieszSpec((1, 10), (2,), (2,))
    spec = R.RieszSpec((1, 13, 273), (6, 10, 20), (2, 3, 7), meta={"x": 1})
    assert R.RieszSpec.from_json(spec.to_json()) == spec


def test_decompose_examples():
    spec = R.RieszSpec((1, 10, 100), (2, 2, 2))
    d = R.decompose(112, spec)
    assert d.digits == {1: 2, 2: 1, 3: 1} and d.value(spec) == 112
    assert R.decompose(5, spec) is None
    assert R.decompose(-98, spec).digits == {1: 2, 3: -1}
    assert R.decompose(10 ** 6, spec) is None


def _dissociated(draw_orders, gaps):
    terms, acc = [1], 0
    for m, g in zip(draw_orders, gaps):
        acc += m * terms[-1]
        terms.append(2 * acc + 1 + g)
    return R.RieszSpec(tuple(terms), tuple(draw_orders))


specs = st.builds(_dissociated, st.lists(st.integers(1, 3), min_size=2, max_size=3),
                  st.lists(st.integers(0, 4), min_size=3, max_size=3))


@given(specs, st.data())
@settings(max_examples=60, deadline=None)
def test_decomposition_unique_and_matches_brute_force(spec, data):
    B = spec.spectrum_bound()
    n = data.draw(st.integers(-B - 3, B + 3))
    found = R.decompose(n, spec)
    brute = R.decompose_exhaustive(n, spec)
    assert len(brute) <= 1
    if found is None:
        assert brute == []
    else:
        assert [found.digit_vector(spec)] == brute


@given(specs)
@settings(max_examples=40, deadline=None)
def test_coefficients_vanish_on_gaps(spec):
    for a, b in R.gap_intervals(spec):
        for n in range(a + 1, b):
            c = R.riesz_coeff(n, spec)
            assert c.is_exact and c.contains(0)


def test_unit_digit_product():
    spec = R.RieszSpec((1, 10, 100), (1, 1, 1))
    assert R.riesz_coeff(111, spec).contains(Fraction(1, 8))
    assert R.unit_digit_product([1, 2, 3], spec).contains(Fraction(1, 8))
    c = R.riesz_coeff(1100, DEMO)
    assert c.overlaps(cos_pi(Fraction(1, 5)) ** 2)


@given(st.integers(3, 40), st.integers(3, 40), st.integers(3, 40))
@settings(max_examples=40)
def test_lower_bound_below_every_coefficient(m1, m2, m3):
    orders = (m1, m2, m3)
    assume(all(max_cap(m) >= 1 for m in orders))
    spec = _dissociated(orders, (0, 0))
    spec = R.RieszSpec(spec.terms, orders, tuple(max_cap(m) for m in orders))
    bound = R.coeff_lower_bound(spec.labels, spec)
    for j1 in (1, spec.cap(1)):
        for j3 in (-1, -spec.cap(3)):
            n = j1 * spec.n(1) + spec.cap(2) * spec.n(2) + j3 * spec.n(3)
            assert R.riesz_coeff(n, spec).certainly_ge(bound)


def test_unclamped_product_overshoots():
    # two negative factors multiply to a positive number above the coefficient
    spec = R.RieszSpec((1, 5, 25), (2, 2, 2), (1, 1, 1))
    raw = R.unclamped_bound_product([1, 2], spec)
    coeff = R.riesz_coeff(6, spec)
    assert coeff.overlaps(fejer_coeff(2, 1) ** 2) and coeff.contains(Fraction(1, 2))
    assert raw.certainly_gt(coeff)
    assert R.coeff_lower_bound([1, 2], spec).contains(0)


def test_cube_root_upper():
    for t in (Fraction(1, 8), Fraction(2), Fraction(1, 10 ** 9), Fraction(7, 3)):
        r = R.rational_cbrt_upper(t)
        assert r ** 3 >= t and (r - Fraction(1, 2 ** 63)) ** 3 < t
    assert [R._icbrt_ceil(n) for n in (0, 1, 8, 9, 27, 28)] == [0, 1, 2, 3, 3, 4]


def test_choose_orders_for_dyadic_squares():
    spec = R.choose_m_sequence(S.pow2sq_sequence(12))
    assert spec.start == 3
    assert spec.orders == (2, 4, 6, 10, 16, 25, 41, 65, 101)
    assert spec.caps == (1,) * 9
    assert Fraction(spec.meta["ratio_condition"]) < Fraction(1, 9)
    R.check_dissociation(spec)
    tight = R.choose_m_sequence(S.pow2sq_sequence(12), target=Fraction(9, 10))
    assert tight.start == 6 and tight.orders == (10, 16, 25, 41, 65, 101)
    assert R._product_cos(tight.orders, 128).certainly_ge(Fraction(9, 10))


def test_choose_orders_erdos_taylor_only_on_a_single_factor():
    spec = R.choose_m_sequence(S.erdos_taylor(30))
    assert spec.start == 29 and spec.orders == (1,)
    with pytest.raises(InfeasibleError):
        R.choose_m_sequence(S.erdos_taylor(30), max_drop=20)


def test_block_spec_with_fast_growth():
    p = [1]
    for l in range(1, 7):
        p.append(p[-1] * 10 ** (l + 1))
    base = S.block_sequence(p[:6], [[1, 2]] * 6)
    seq = S.IndexedSequence(base.terms, base.family, base.params, base.blocks, None, tuple(p))
    spec = R.block_riesz_spec(seq, target=Fraction(9, 10))
    assert (spec.start, spec.orders, spec.caps) == (5, (104, 224), (3, 3))
    bound = R.coeff_lower_bound(spec.labels, spec)
    assert abs(bound.mid - Fraction("0.97118986228827231")) < Fraction(1, 10 ** 15)


def test_block_spec_infeasible_for_square_blocks():
    with pytest.raises(InfeasibleError):
        R.block_riesz_spec(S.th1_sequence(5))
    with pytest.raises(ValueError):
        R.block_riesz_spec(S.erdos_taylor(5))


def test_ball_product_matches_direct_formula():
    spec = R.RieszSpec((1, 7, 49), (3, 3, 3))
    n = 2 * 1 - 3 * 7 + 1 * 49
    expect = fejer_coeff(3, 2) * fejer_coeff(3, 3) * fejer_coeff(3, 1)
    assert R.riesz_coeff(n, spec).overlaps(expect)
    assert isinstance(R.riesz_coeff(0, spec), RealBall) and R.riesz_coeff(0, spec).contains(1)

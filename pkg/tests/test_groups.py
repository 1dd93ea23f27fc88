from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from rieszip import groups as G, sequences as S
from rieszip.errors import WitnessError
from rieszip.numeric import RealBall, circle_constant_lower_rational, frac_dist

TWO_PI = circle_constant_lower_rational()
angles = st.fractions(min_value=0, max_value=1, max_denominator=10 ** 5).filter(lambda t: 0 < t < 1)


@given(angles)
@settings(max_examples=40, deadline=None)
def test_partial_sums_monotone_and_squares(theta):
    seq = S.erdos_taylor(25)
    s1 = G.gp_partial_sums(theta, seq, 1)
    s2 = G.gp_partial_sums(theta, seq, 2)
    assert all(b.upper >= a.lower for a, b in zip(s1.partial, s1.partial[1:]))
    for t1, t2 in zip(s1.terms, s2.terms):
        assert t1.square().overlaps(t2.square())
    acc = RealBall.exact(0)
    for t, p in zip(s1.terms, s2.partial):
        acc = acc + t.square()
        assert acc.overlaps(p)


@given(angles, st.integers(1, 10 ** 40))
def test_distance_bounded_by_fractional_part(theta, n):
    # |lambda^n - 1|^2 <= 4 pi^2 {n theta}^2
    d = G.gp_partial_sums(theta, S.explicit_sequence([n]), 2).partial[-1]
    bound = (RealBall.pi() * 2 * frac_dist(n * theta)).square()
    assert (bound - d).upper >= 0


def test_sup_tail_is_nonincreasing():
    scan = G.gp_partial_sums(Fraction(1, 3), S.power_sequence(2, 12), "inf")
    ups = [b.upper for b in scan.partial]
    assert all(a >= b for a, b in zip(ups, ups[1:]))
    assert scan.label == "finite-horizon evidence"
    with pytest.raises(ValueError):
        G.gp_partial_sums(Fraction(1, 3), S.power_sequence(2, 4), 0)
    with pytest.raises(ValueError):
        G.gp_partial_sums(Fraction(1, 3), S.power_sequence(2, 4), 2, K=5)


def test_powers_of_two_at_dyadic_angle_vanish():
    scan = G.gp_partial_sums(Fraction(1, 8), S.power_sequence(2, 10), 1)
    assert all(t.contains(0) and t.is_exact for t in scan.terms[2:])


def test_erdos_taylor_disjunction():
    rep = G.et_divergence_check(Fraction(2, 7), 30)
    assert rep.holds and {r[3] for r in rep.rows} <= {"current", "next"}
    assert rep.epsilon.overlaps(G.gp_partial_sums(Fraction(2, 7), S.erdos_taylor(1), 1).terms[0] / 2)
    with pytest.raises(ValueError):
        G.et_divergence_check(Fraction(0), 5)


def test_witness_midpoint_is_degenerate():
    seq = S.th1_sequence(5)
    cert = G.witness_search(seq.bases, TWO_PI, 5, start=2)
    assert cert.theta == Fraction(1, 2) and cert.degenerate
    assert [l for l, _, _ in cert.entries] == [2, 3, 4, 5]


def test_witness_avoiding_lattice_points():
    seq = S.th1_sequence(5)
    cert = G.witness_search(seq.bases, TWO_PI, 5, start=2, avoid_lattice=True)
    assert not cert.degenerate
    assert cert.interval[0] <= cert.theta <= cert.interval[1]
    assert G.verify_witness(cert, seq.bases)
    back = G.WitnessCertificate.from_json(cert.to_json())
    assert back == cert


@given(st.integers(2, 6), st.booleans())
@settings(max_examples=10, deadline=None)
def test_witnesses_self_verify(L, avoid):
    p = [1]
    for l in range(1, L + 2):
        p.append(p[-1] * (7 * l + 3))
    cert = G.witness_search(p, TWO_PI, L, avoid_lattice=avoid)
    assert G.verify_witness(cert, p)
    for l, f, b in cert.entries:
        assert f == frac_dist(p[l - 1] * cert.theta) <= b


def test_tampered_certificate_is_rejected():
    seq = S.th1_sequence(4)
    cert = G.witness_search(seq.bases, TWO_PI, 4, start=2, avoid_lattice=True)
    bad = G.WitnessCertificate(cert.theta + Fraction(1, 10 ** 9), cert.C, cert.entries,
                               cert.degenerate, cert.interval)
    assert not G.verify_witness(bad, seq.bases)


def test_witness_for_doubling_bases():
    p = [2 ** l for l in range(1, 8)]
    assert G.witness_search(p, TWO_PI, 6).theta == Fraction(1, 2)


def test_witness_failure():
    with pytest.raises(WitnessError):
        G.witness_search([1, 2, 3], 0, 2)
    with pytest.raises(ValueError):
        G.witness_search([1, 2], TWO_PI, 3)


def test_prop7_scan_and_block_sums():
    g, r = S.prop7_default_rules()
    seq = S.prop7_sequence(g, r, 8)
    scan = G.prop7_negative_scan(seq, [Fraction(1, 3), Fraction(2, 5)])
    assert len(scan) == 2
    for s in scan:
        total = RealBall.exact(0)
        for _, fsq, dsq in s.block_sums:
            total = total + dsq
            # 16 x^2 <= |e(x) - 1|^2 summed over the block
            assert (dsq - 16 * fsq).upper >= 0
        assert total.overlaps(s.partial_sum)
        assert s.to_json()["label"] == "heuristic"
    series = G.series_partial_sums(Fraction(1, 3), seq)
    assert series[-1][2].overlaps(scan[0].partial_sum)
    with pytest.raises(ValueError):
        G.prop7_negative_scan(seq, [Fraction(1)])

"""Acceptance gate: one test per criterion, each timed against its budget."""

import bisect
import itertools
import random
import time
from fractions import Fraction

import mpmath
import pytest

from rieszip import groups, ipcheck, kernels, oracle, riesz, sequences
from rieszip.cli.experiments import EXPERIMENTS, ExperimentConfig, run_experiment
from rieszip.numeric import RealBall, circle_constant_lower_rational, cos_pi

PREC = 128


class Budget:
    def __init__(self, seconds):
        self.seconds = seconds

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0
        if exc[0] is None:
            assert self.elapsed < self.seconds, f"took {self.elapsed:.2f}s, budget {self.seconds}s"


def _mp_ball(x, digits=60):
    """A tight ball around an mpmath value computed at ``digits`` decimal digits."""
    v = Fraction(mpmath.nstr(x, digits + 5, strip_zeros=False))
    eps = Fraction(1, 10 ** digits)
    return RealBall.from_bounds(v - eps, v + eps, PREC)


@pytest.mark.criterion(1, "kernel normalization and quadrature mass")
def test_c01_kernel_normalization():
    with Budget(1.0):
        for m in range(1, 65):
            assert kernels.fejer_coeff(m, 0, PREC).contains(1)
            mass = oracle.quadrature_coeff(lambda t, prec, m=m: kernels.fejer_eval(m, t, prec), 0,
                                           nodes=2 * m + 1, bandwidth=m, prec=PREC)
            assert mass.contains(1), (m, mass)
            assert mass.rad < Fraction(1, 2 ** 100)


def _six_term_specs():
    pow2 = riesz.choose_m_sequence(sequences.pow2sq_sequence(12))
    return [
        riesz.RieszSpec((1, 10, 100, 1000, 10000, 100000), (2, 2, 3, 3, 4, 4)),
        riesz.RieszSpec((1, 3, 9, 27, 81, 243), (1, 1, 1, 1, 1, 1)),
        riesz.RieszSpec(pow2.terms[:6], pow2.orders[:6], None, pow2.start),
    ]


@pytest.mark.criterion(2, "unit-digit coefficient identity on 6-term specs")
def test_c02_unit_digit_identity():
    specs = _six_term_specs()
    with Budget(1.0):
        for spec in specs:
            riesz.check_dissociation(spec)
            labels = list(spec.labels)
            count = 0
            for r in range(1, 7):
                for F in itertools.combinations(labels, r):
                    n = sum(spec.n(k) for k in F)
                    lhs = riesz.riesz_coeff(n, spec, PREC)
                    rhs = RealBall.exact(1, PREC)
                    for k in F:
                        rhs = rhs * cos_pi(Fraction(1, spec.m(k) + 2), PREC)
                    assert lhs.overlaps(rhs), (spec.terms, F)
                    count += 1
            assert count == 63


@pytest.mark.criterion(3, "coefficient lower bound, factor and product level")
def test_c03_lower_bound():
    with Budget(10.0):
        pi = RealBall.pi(PREC)
        for m in range(1, 65):
            cap = kernels.max_cap(m)
            assert cap == int((m + 2) / mpmath.pi)
            for p in range(1, cap + 1):
                bound = 1 - 3 * pi.square() * RealBall.exact(Fraction(p, m + 2), PREC).square()
                assert kernels.fejer_coeff(m, p, PREC).certainly_ge(bound), (m, p)
        specs = [
            riesz.RieszSpec((1, 13, 273), (6, 10, 20), (2, 3, 7)),
            riesz.RieszSpec((1, 5, 25), (2, 2, 2), (1, 1, 1)),
            riesz.RieszSpec((1, 20, 500), (8, 12, 30), (3, 4, 10)),
        ]
        for spec in specs:
            riesz.check_dissociation(spec)
            ranges = [range(-spec.cap(k), spec.cap(k) + 1) for k in spec.labels]
            for js in itertools.product(*ranges):
                F = [k for k, j in zip(spec.labels, js) if j]
                if not F:
                    continue
                n = sum(j * spec.n(k) for k, j in zip(spec.labels, js))
                c = riesz.riesz_coeff(n, spec, PREC)
                assert c.certainly_ge(riesz.coeff_lower_bound(F, spec, PREC)), (spec.terms, js)


def _small_specs():
    return [
        riesz.RieszSpec((1, 7, 49), (3, 3, 3)),
        riesz.RieszSpec((1, 3, 15), (1, 2, 3)),
        riesz.RieszSpec((1, 3, 9, 27), (1, 1, 1, 1)),
        riesz.RieszSpec((1, 7, 35, 105), (3, 2, 1, 1)),
    ]


@pytest.mark.criterion(4, "oracle expansion and quadrature agree with the coefficient formula")
def test_c04_oracle_equivalence():
    with Budget(30.0):
        for spec in _small_specs():
            riesz.check_dissociation(spec)
            table = oracle.expand_product(spec, prec=PREC)
            B = spec.spectrum_bound()
            freqs = range(-B, B + 1)
            formula = {n: riesz.riesz_coeff(n, spec, PREC) for n in freqs}
            rep = oracle.compare(table, formula, Fraction(1, 10 ** 12))
            assert rep.passed and rep.max_mid_diff <= Fraction(1, 10 ** 12), rep
            quad = oracle.quadrature_table(spec, freqs, nodes=2 * B + 1, prec=PREC)
            rep = oracle.compare(quad, table, 0)
            assert rep.passed, rep


def _certified_specs():
    pow2 = riesz.choose_m_sequence(sequences.pow2sq_sequence(12))
    return [
        riesz.RieszSpec((1, 10, 100, 1000), (2, 2, 3, 3)),
        riesz.RieszSpec((1, 7, 49, 343), (3, 3, 3, 3)),
        riesz.RieszSpec((1, 3, 9, 27, 81), (1, 1, 1, 1)),
        riesz.RieszSpec(pow2.terms[:5], pow2.orders[:4], None, pow2.start),
    ]


@pytest.mark.criterion(5, "coefficients vanish on the dissociation gaps")
def test_c05_gap_zeros():
    with Budget(10.0):
        for spec in _certified_specs():
            table = oracle.expand_product(spec, prec=PREC)
            freqs = table.frequencies()
            gaps = riesz.gap_intervals(spec)
            assert gaps
            for a, b in gaps:
                for lo, hi in ((a, b), (-b, -a)):
                    i = bisect.bisect_right(freqs, lo)
                    assert i == len(freqs) or freqs[i] >= hi, (spec.terms, freqs[i], (lo, hi))
                if b - a <= 10 ** 5:
                    for n in range(a + 1, b):
                        assert n not in table
                        assert riesz.riesz_coeff(n, spec, PREC).is_exact
                        assert riesz.riesz_coeff(n, spec, PREC).contains(0)


@pytest.mark.criterion(6, "block sumsets are full runs of multiples")
def test_c06_block_sumsets():
    with Budget(5.0):
        for l, q in [(2, 0), (3, 0), (2, 1)]:
            cert = ipcheck.verify_lemma1(l, q)
            assert cert.exact
            seq = sequences.th1_sequence(l + q)
            lo, hi = seq.markers[l - 1] + 1, seq.markers[l + q]
            terms = [seq[k] for k in range(lo, hi + 1)]
            brute = {sum(c) for r in range(1, len(terms) + 1)
                     for c in itertools.combinations(terms, r)} if len(terms) <= 13 else None
            expected = {s * cert.base for s in range(1, cert.top_multiple + 1)}
            if brute is not None:
                assert brute == expected
            assert set(ipcheck.subset_sums(seq, lo, hi)) == expected
        assert ipcheck.verify_lemma1(2, 0).top_multiple == 10
        assert ipcheck.verify_lemma1(3, 0).top_multiple == 45


@pytest.mark.criterion(7, "dyadic-square pipeline: orders, dissociation, window deviation")
def test_c07_pow2sq_pipeline():
    with Budget(30.0):
        seq = sequences.pow2sq_sequence(12)
        spec = riesz.choose_m_sequence(seq, prec=PREC)
        riesz.check_dissociation(spec)
        rep = ipcheck.ip_window_deviation(spec, seq, 6, 6, prec=PREC)
        tail = [k for k in spec.labels if k >= 6]
        assert tail == list(range(6, 12))
        prod = mpmath.mpf(1)
        with mpmath.workdps(60):
            for k in tail:
                prod *= mpmath.cos(mpmath.pi / (spec.m(k) + 2))
            floor = _mp_ball(1 - prod, 50)
        assert not rep.deviation.certainly_gt(floor)
        assert rep.deviation.overlaps(floor)
        assert rep.worst_subset == tuple(range(6, 12))


@pytest.mark.criterion(8, "tent-convolution kernel suite")
def test_c08_kahane_suite():
    with Budget(60.0):
        assert kernels.kahane_normalizer() == 9
        assert kernels.kahane_phi(Fraction(1, 6)) == Fraction(1, 4)
        for j in range(1, 10 ** 4 + 1):
            P = kernels.KahanePoly(j)
            assert P.degree <= j // 3
            assert P.coefficient(P.degree) > 0
            assert P.coefficient(P.degree + 1) == 0
        for j in (2, 7, 30):
            rep = kernels.kahane_nonneg_check(j, 256, PREC)
            assert rep.minimum.upper >= 0
        b = kernels.derive_phi_bound()
        assert 0 < b.gamma < Fraction(1, 3)
        for j in range(b.j0, 201):
            assert kernels.KahanePoly(j).coefficient(1) >= 1 - b.c / (j * j)
        for j in (b.j0, 25, 200):
            q = oracle.quadrature_coeff(kernels.KahanePoly(j), 1, prec=PREC)
            assert q.certainly_ge(1 - b.c / (j * j))


@pytest.mark.criterion(9, "Erdos-Taylor diagnostics at K = 30")
def test_c09_erdos_taylor():
    with Budget(5.0):
        for th in ("1/2", "1/3", "1/7", "3/8"):
            rep = groups.et_divergence_check(Fraction(th), 30, PREC)
            assert rep.holds and len(rep.rows) == 30
        seq = sequences.erdos_taylor(31)
        assert len(str(seq[30])) > 30
        partial = sequences.ratio_series(seq, 2, 30)
        bound = Fraction(0)
        for k, s in enumerate(partial, start=1):
            bound += Fraction(1, k * k)
            assert s <= bound


def _angles(seed, count, qmax=50):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        q = rng.randint(3, qmax)
        th = Fraction(rng.randint(1, q - 1), q)
        if th not in out:
            out.append(th)
    return out


@pytest.mark.criterion(10, "witness certificate and growing block sums")
def test_c10_witness_and_prop7():
    with Budget(60.0):
        seq = sequences.th1_sequence(5)
        cert = groups.witness_search(seq.bases, circle_constant_lower_rational(), 5, start=2)
        assert cert.entries
        assert groups.verify_witness(cert, seq.bases)
        assert 0 < cert.theta < 1
        g, r = sequences.prop7_default_rules()
        p7 = sequences.prop7_sequence(g, r, 10)
        scan = groups.prop7_negative_scan(p7, _angles(0, 5), prec=PREC)
        assert sum(s.growing for s in scan) >= 4


@pytest.mark.criterion(11, "dyadic-block subset sums: first block and additivity")
def test_c11_dyadic_blocks():
    with Budget(30.0):
        s62 = ipcheck.section62_sequence(2)
        assert s62.blocks[1] == [5, 16, 21]
        reports = ipcheck.section62_ginf_scan(_angles(1, 10, 200), 2, PREC)
        assert len(reports) == 10
        for rep in reports:
            # ordered disjoint nonempty pairs over n elements: 3^n - 2^(n+1) + 1
            assert rep.pairs_checked == (3 ** 2 - 2 ** 3 + 1) + (3 ** 4 - 2 ** 5 + 1)


@pytest.mark.criterion(12, "every experiment is byte-for-byte reproducible")
def test_c12_determinism(tmp_path):
    for name in sorted(EXPERIMENTS):
        dirs = []
        for run in ("a", "b"):
            out = tmp_path / run
            res = run_experiment(ExperimentConfig(name, {}, str(out), PREC, 0))
            assert res.passed, (name, res.failed)
            dirs.append(out)
        files_a = sorted(p.relative_to(dirs[0]) for p in dirs[0].rglob("*") if p.is_file())
        files_b = sorted(p.relative_to(dirs[1]) for p in dirs[1].rglob("*") if p.is_file())
        assert files_a == files_b and files_a
        for rel in files_a:
            assert (dirs[0] / rel).read_bytes() == (dirs[1] / rel).read_bytes(), (name, rel)

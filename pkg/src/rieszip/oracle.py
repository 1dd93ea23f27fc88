"""Brute-force cross-checks for closed-form Fourier coefficients.

Nothing here reuses the decomposition or closed-form coefficient paths: the
partial product is expanded by literal convolution of per-factor spectra
(built from the sine-product sums at doubled precision), and quadrature
samples the product of the kernels themselves.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import GuardError, InvariantViolation
from .kernels import KahanePoly, fejer_coeff_direct, fejer_eval
from .numeric import DEFAULT_PREC, RealBall, ball_decimal_pair, cos_pi
from .riesz import RieszSpec

__all__ = [
    "SparseSpectrum",
    "CompareReport",
    "expand_product",
    "product_evaluator",
    "quadrature_coeff",
    "quadrature_table",
    "compare",
    "SPECTRUM_LIMIT",
]

SPECTRUM_LIMIT = 10 ** 7


@dataclass
class SparseSpectrum:
    """Frequency -> real coefficient ball."""

    coeffs: dict = field(default_factory=dict)
    prec: int = DEFAULT_PREC

    def __getitem__(self, n: int) -> RealBall:
        c = self.coeffs.get(int(n))
        return RealBall.exact(0, self.prec) if c is None else c

    def __contains__(self, n) -> bool:
        return int(n) in self.coeffs

    def __len__(self) -> int:
        return len(self.coeffs)

    def frequencies(self) -> list:
        return sorted(self.coeffs)

    def items(self):
        return sorted(self.coeffs.items())

    @property
    def bandwidth(self) -> int:
        return max((abs(f) for f in self.coeffs), default=0)

    def __call__(self, t, prec: int | None = None) -> RealBall:
        """``sum_f c_f cos(2 pi f t)`` for rational ``t`` (real, symmetric spectra)."""
        prec = prec or self.prec
        t = Fraction(t)
        acc = RealBall.exact(0, prec)
        for f, c in self.coeffs.items():
            r = Fraction((f * t.numerator) % t.denominator, t.denominator)
            acc = acc + c * cos_pi(2 * r, prec)
        return acc

    def is_symmetric(self) -> bool:
        return all(-f in self.coeffs and self.coeffs[-f].overlaps(c) for f, c in self.coeffs.items())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["frequency", "value", "radius"])
        for f, c in self.items():
            w.writerow([str(f), *ball_decimal_pair(c)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, prec: int = DEFAULT_PREC) -> "SparseSpectrum":
        """Read ``frequency,value,radius`` rows back as balls covering value +/- radius."""
        out = {}
        for row in csv.DictReader(io.StringIO(text)):
            v = Fraction(row["value"])
            r = Fraction(row["radius"])
            out[int(row["frequency"])] = RealBall.from_bounds(v - r, v + r, prec)
        return cls(out, prec)


def _factor_tables(source, N: int | None, prec: int):
    """Per-factor ``(n_k, {digit: coeff})`` lists."""
    if isinstance(source, RieszSpec):
        count = source.size if N is None else min(N, source.size)
        out = []
        for i in range(count):
            m = source.orders[i]
            half = {p: fejer_coeff_direct(m, p, prec) if p else RealBall.exact(1, prec)
                    for p in range(m + 1)}
            out.append((source.terms[i], {p: half[abs(p)] for p in range(-m, m + 1)}))
        return out
    # a plan: iterable of (frequency, KahanePoly | coefficient mapping)
    out = []
    for n, factor in list(source)[:N]:
        if isinstance(factor, KahanePoly):
            table = {s: RealBall.exact(c, prec) for s, c in factor.table().items()}
        else:
            table = {int(s): RealBall.coerce(c, prec) for s, c in factor.items()}
        out.append((int(n), table))
    return out


def expand_product(source, N: int | None = None, prec: int = DEFAULT_PREC) -> SparseSpectrum:
    """Literal expansion of ``prod_k P_k(e^{2 i pi n_k t})`` into a sparse spectrum.

    Factor coefficients come from the sine-product sums at ``2 * prec`` bits.
    Two products landing on the same frequency mean dissociation failed and
    raise :class:`InvariantViolation`.
    """
    wp = 2 * prec
    factors = _factor_tables(source, N, wp)
    size = 1
    for _, table in factors:
        size *= len(table)
    if size > SPECTRUM_LIMIT:
        raise GuardError(f"expanded spectrum would have {size} terms (limit {SPECTRUM_LIMIT})")
    spec = {0: RealBall.exact(1, wp)}
    for n, table in factors:
        nxt = {}
        for f, c in spec.items():
            for s, a in table.items():
                g = f + s * n
                if g in nxt:
                    raise InvariantViolation(
                        "oracle.collision", f"frequency {g} is reached by two digit vectors")
                nxt[g] = c * a
        spec = nxt
    return SparseSpectrum(spec, wp)


def product_evaluator(spec: RieszSpec, N: int | None = None) -> tuple:
    """``(evaluator, bandwidth)`` for the partial product, evaluated factor by factor."""
    count = spec.size if N is None else min(N, spec.size)
    pairs = list(zip(spec.terms[:count], spec.orders[:count]))

    def evaluate(t, prec: int = DEFAULT_PREC) -> RealBall:
        t = Fraction(t)
        acc = RealBall.exact(1, prec)
        for n, m in pairs:
            acc = acc * fejer_eval(m, (n * t) % 1, prec)
        return acc

    return evaluate, sum(n * m for n, m in pairs)


def _resolve(source, bandwidth):
    if isinstance(source, SparseSpectrum):
        return source, source.bandwidth
    if isinstance(source, RieszSpec):
        return product_evaluator(source)
    if isinstance(source, KahanePoly):
        return source, source.degree
    if bandwidth is None:
        raise ValueError("an evaluator needs an explicit bandwidth")
    return source, int(bandwidth)


def quadrature_table(source, freqs: Iterable[int], nodes: int | None = None,
                     bandwidth: int | None = None, prec: int = DEFAULT_PREC) -> dict:
    """Trapezoidal estimates of the coefficients at ``freqs``.

    ``source`` is a :class:`SparseSpectrum`, a :class:`RieszSpec`, a
    :class:`KahanePoly` or a callable ``t -> RealBall`` with ``bandwidth``
    given.  The rule is exact for a real trigonometric polynomial of degree
    ``B`` at frequency ``n`` whenever ``nodes >= 2B + 1`` and
    ``nodes > B + |n|``; other node counts are rejected.  The default node
    count is ``4B + 1``.
    """
    f, B = _resolve(source, bandwidth)
    freqs = [int(n) for n in freqs]
    N = 4 * B + 1 if nodes is None else int(nodes)
    if N < 2 * B + 1:
        raise GuardError(f"{N} nodes cannot resolve bandwidth {B}; need at least {2 * B + 1}")
    worst = max((abs(n) for n in freqs), default=0)
    if N <= B + worst:
        raise GuardError(f"{N} nodes alias frequency {worst} against bandwidth {B}")
    values = [f(Fraction(j, N), prec) for j in range(N)]
    cos_table = [cos_pi(Fraction(2 * r, N), prec) for r in range(N)]
    out = {}
    for n in freqs:
        acc = RealBall.exact(0, prec)
        for j, v in enumerate(values):
            acc = acc + v * cos_table[(n * j) % N]
        out[n] = acc / N
    return out


def quadrature_coeff(source, n: int, nodes: int | None = None, bandwidth: int | None = None,
                     prec: int = DEFAULT_PREC) -> RealBall:
    return quadrature_table(source, [n], nodes, bandwidth, prec)[int(n)]


@dataclass(frozen=True)
class CompareReport:
    keys: int
    max_gap: Fraction          # distance between balls beyond their radii
    max_mid_diff: Fraction
    worst_key: object
    tol: Fraction
    only_in_a: tuple
    only_in_b: tuple

    @property
    def passed(self) -> bool:
        return self.max_gap <= self.tol

    def to_json(self) -> dict:
        return {"keys": self.keys, "max_gap": float(self.max_gap),
                "max_mid_diff": float(self.max_mid_diff), "worst_key": str(self.worst_key),
                "tol": float(self.tol), "passed": self.passed,
                "only_in_a": [str(k) for k in self.only_in_a],
                "only_in_b": [str(k) for k in self.only_in_b]}


def compare(a: Mapping, b: Mapping, tol=0) -> CompareReport:
    """Compare two coefficient tables over the union of their keys.

    A key missing from one side counts as an exact zero there.
    """
    tol = Fraction(tol)
    if isinstance(a, SparseSpectrum):
        a = a.coeffs
    if isinstance(b, SparseSpectrum):
        b = b.coeffs
    keys = sorted(set(a) | set(b))
    if not keys:
        raise ValueError("nothing to compare")
    worst, gap_max, mid_max = keys[0], Fraction(0), Fraction(0)
    for k in keys:
        x = RealBall.coerce(a.get(k, 0))
        y = RealBall.coerce(b.get(k, 0))
        g = x.gap(y)
        d = abs(x.mid - y.mid)
        if g > gap_max or (g == gap_max and d > mid_max):
            worst = k
        gap_max = max(gap_max, g)
        mid_max = max(mid_max, d)
    return CompareReport(len(keys), gap_max, mid_max, worst, tol,
                         tuple(k for k in keys if k not in b), tuple(k for k in keys if k not in a))

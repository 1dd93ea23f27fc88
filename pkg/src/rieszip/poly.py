"""Exact univariate polynomials over the rationals, and piecewise polynomials.

Coefficient lists are little-endian: ``[c0, c1, c2]`` is ``c0 + c1 x + c2 x^2``.
Only what the kernel derivations need is here: arithmetic, exact
self-convolution of piecewise polynomials, and a certified nonnegativity test
on a closed interval (squarefree decomposition plus Sturm counting).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

Poly = tuple  # tuple[Fraction, ...]


def normalize(p: Sequence) -> Poly:
    p = [Fraction(c) for c in p]
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def degree(p: Poly) -> int:
    return len(p) - 1


def add(p: Poly, q: Poly) -> Poly:
    n = max(len(p), len(q))
    return normalize([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def sub(p: Poly, q: Poly) -> Poly:
    return add(p, scale(q, -1))


def scale(p: Poly, c) -> Poly:
    return normalize([c * a for a in p])


def mul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return ()
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return normalize(out)


def evaluate(p: Poly, x) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def derivative(p: Poly) -> Poly:
    return normalize([i * p[i] for i in range(1, len(p))])


def antiderivative(p: Poly) -> Poly:
    return normalize([Fraction(0)] + [p[i] / (i + 1) for i in range(len(p))])


def compose_linear(p: Poly, a, b) -> Poly:
    """``p(a + b x)``."""
    out: Poly = ()
    power: Poly = (Fraction(1),)
    lin = normalize([a, b])
    for c in p:
        out = add(out, scale(power, c))
        power = mul(power, lin)
    return out


def divmod_poly(p: Poly, q: Poly) -> tuple[Poly, Poly]:
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    p = list(p)
    quot = [Fraction(0)] * max(len(p) - len(q) + 1, 0)
    lead = q[-1]
    while len(p) >= len(q) and p:
        c = p[-1] / lead
        k = len(p) - len(q)
        quot[k] = c
        for i, b in enumerate(q):
            p[k + i] -= c * b
        p = list(normalize(p))
    return normalize(quot), normalize(p)


def monic(p: Poly) -> Poly:
    return scale(p, 1 / p[-1]) if p else ()


def gcd(p: Poly, q: Poly) -> Poly:
    while q:
        p, q = q, divmod_poly(p, q)[1]
    return monic(p)


def squarefree_factors(p: Poly) -> list[Poly]:
    """Yun's algorithm: ``p = c * prod f_i^i`` with each ``f_i`` squarefree.

    Returns ``[f_1, f_2, ...]`` (monic, possibly constant ``(1,)``).
    """
    p = monic(normalize(p))
    dp = derivative(p)
    a = gcd(p, dp)
    b = divmod_poly(p, a)[0]
    c = divmod_poly(dp, a)[0]
    d = sub(c, derivative(b))
    out = []
    while degree(b) > 0:
        g = gcd(b, d)
        out.append(g)
        b = divmod_poly(b, g)[0]
        c = divmod_poly(d, g)[0]
        d = sub(c, derivative(b))
    return out


def _sign_changes(values) -> int:
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def sturm_sequence(p: Poly) -> list[Poly]:
    seq = [p, derivative(p)]
    while seq[-1]:
        r = divmod_poly(seq[-2], seq[-1])[1]
        if not r:
            break
        seq.append(scale(r, -1))
    return seq


def count_roots(p: Poly, lo, hi) -> int:
    """Number of distinct real roots of squarefree ``p`` in ``(lo, hi]``."""
    seq = sturm_sequence(p)
    return _sign_changes(evaluate(s, lo) for s in seq) - _sign_changes(evaluate(s, hi) for s in seq)


def nonneg_on(p: Poly, lo, hi) -> bool:
    """Decide exactly whether ``p(x) >= 0`` for all ``x`` in ``[lo, hi]``."""
    lo, hi = Fraction(lo), Fraction(hi)
    p = normalize(p)
    if not p:
        return True
    if evaluate(p, lo) < 0 or evaluate(p, hi) < 0:
        return False
    if degree(p) == 0 or lo == hi:
        return True
    # p changes sign inside (lo, hi) iff a factor of odd multiplicity has a root there
    odd: Poly = (Fraction(1),)
    for i, f in enumerate(squarefree_factors(p), start=1):
        if i % 2 == 1:
            odd = mul(odd, f)
    if degree(odd) > 0:
        inside = count_roots(odd, lo, hi) - (1 if evaluate(odd, hi) == 0 else 0)
        if inside > 0:
            return False
    # constant sign on the interior; pick a point where p does not vanish
    n = degree(p) + 2
    for k in range(1, n + 1):
        x = lo + (hi - lo) * Fraction(k, n + 1)
        v = evaluate(p, x)
        if v != 0:
            return v > 0
    return True


@dataclass(frozen=True)
class Piece:
    lo: Fraction
    hi: Fraction
    poly: Poly


@dataclass(frozen=True)
class PiecewisePoly:
    """A function that is polynomial on each closed piece and zero elsewhere."""

    pieces: tuple

    def __call__(self, x) -> Fraction:
        x = Fraction(x)
        for pc in self.pieces:
            if pc.lo <= x <= pc.hi:
                return evaluate(pc.poly, x)
        return Fraction(0)

    def scaled(self, c) -> "PiecewisePoly":
        return PiecewisePoly(tuple(Piece(p.lo, p.hi, scale(p.poly, c)) for p in self.pieces))

    def derivative(self) -> "PiecewisePoly":
        return PiecewisePoly(tuple(Piece(p.lo, p.hi, derivative(p.poly)) for p in self.pieces))

    @property
    def breakpoints(self) -> list:
        pts = sorted({p.lo for p in self.pieces} | {p.hi for p in self.pieces})
        return pts

    def integral(self) -> Fraction:
        total = Fraction(0)
        for p in self.pieces:
            F = antiderivative(p.poly)
            total += evaluate(F, p.hi) - evaluate(F, p.lo)
        return total


def _bivariate_product(f: Poly, g: Poly) -> dict:
    """Coefficients of ``f(t) g(x - t)`` as a map ``(i, j) -> c`` for ``c x^i t^j``."""
    out: dict = {}
    for a, fa in enumerate(f):
        if not fa:
            continue
        for b, gb in enumerate(g):
            if not gb:
                continue
            # (x - t)^b = sum_k C(b,k) x^(b-k) (-t)^k
            for k in range(b + 1):
                c = fa * gb * comb(b, k) * (-1) ** k
                key = (b - k, a + k)
                out[key] = out.get(key, 0) + c
    return out


def _integrate_t(bi: dict, lower: Poly, upper: Poly) -> Poly:
    """``int_{lower(x)}^{upper(x)} sum c x^i t^j dt`` as a polynomial in x."""
    out: Poly = ()
    for (i, j), c in bi.items():
        xi = tuple([Fraction(0)] * i + [Fraction(1)])
        hi_pow = _pow(upper, j + 1)
        lo_pow = _pow(lower, j + 1)
        term = mul(xi, scale(sub(hi_pow, lo_pow), Fraction(c) / (j + 1)))
        out = add(out, term)
    return out


def _pow(p: Poly, n: int) -> Poly:
    out: Poly = (Fraction(1),)
    for _ in range(n):
        out = mul(out, p)
    return out


def convolve(f: PiecewisePoly, g: PiecewisePoly) -> PiecewisePoly:
    """Exact convolution ``(f * g)(x) = int f(t) g(x - t) dt``."""
    cuts = sorted({a.lo + b.lo for a in f.pieces for b in g.pieces}
                  | {a.lo + b.hi for a in f.pieces for b in g.pieces}
                  | {a.hi + b.lo for a in f.pieces for b in g.pieces}
                  | {a.hi + b.hi for a in f.pieces for b in g.pieces})
    pieces = []
    for x0, x1 in zip(cuts, cuts[1:]):
        xm = (x0 + x1) / 2
        total: Poly = ()
        for a in f.pieces:
            for b in g.pieces:
                # t ranges over [a.lo, a.hi] intersected with [x - b.hi, x - b.lo]
                lo_const = a.lo >= xm - b.hi
                hi_const = a.hi <= xm - b.lo
                lower = (a.lo,) if lo_const else (-b.hi, Fraction(1))
                upper = (a.hi,) if hi_const else (-b.lo, Fraction(1))
                if evaluate(normalize(upper), xm) <= evaluate(normalize(lower), xm):
                    continue
                bi = _bivariate_product(a.poly, b.poly)
                total = add(total, _integrate_t(bi, normalize(lower), normalize(upper)))
        pieces.append(Piece(x0, x1, total))
    return PiecewisePoly(tuple(pieces))

"""Nonnegative trigonometric kernels.

Two families live here:

* ``FejerKernel`` -- the polynomial
  ``P(e^{2 i pi t}) = 2/(m+2) |sum_{j=1}^{m+1} sin(j pi/(m+2)) e^{2 i pi j t}|^2``
  whose spectrum is ``{-m, ..., m}``.  Its coefficients have a closed form
  (:func:`fejer_coeff`) and a direct sine-product sum (:func:`fejer_coeff_direct`)
  that serves as the independent check.
* ``KahanePoly`` -- ``P_j(e^{it}) = sum_s phi(s/j) e^{ist}`` where ``phi`` is the
  normalised self-convolution of the tent ``max(1 - 6|t|, 0)``.  ``phi`` is
  derived once, exactly, as a piecewise cubic with rational coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from . import poly
from .errors import InvariantViolation
from .numeric import DEFAULT_PREC, RealBall, as_fraction, cos_pi, sin_pi

__all__ = [
    "FejerKernel",
    "KahanePoly",
    "PhiBound",
    "NonnegReport",
    "fejer_coeff",
    "fejer_coeff_direct",
    "fejer_eval",
    "fejer_eval_direct",
    "max_cap",
    "lower_bound_eq3_factor",
    "tent",
    "kahane_normalizer",
    "kahane_phi",
    "kahane_phi_function",
    "kahane_poly",
    "kahane_nonneg_check",
    "derive_phi_bound",
]


# ---------------------------------------------------------------------------
# Fejer-type kernels
# ---------------------------------------------------------------------------

@lru_cache(maxsize=8192)
def fejer_coeff(m: int, p: int, prec: int = DEFAULT_PREC) -> RealBall:
    """Fourier coefficient of the order-``m`` kernel at frequency ``p`` (closed form)."""
    if m < 1:
        raise ValueError("kernel order must be >= 1")
    p = abs(int(p))
    if p == 0:
        return RealBall.exact(1, prec)
    if p > m:
        return RealBall.exact(0, prec)
    d = m + 2
    c_p = cos_pi(Fraction(p, d), prec)
    s_p = sin_pi(Fraction(p, d), prec)
    c_1 = cos_pi(Fraction(1, d), prec)
    s_1 = sin_pi(Fraction(1, d), prec)
    return (c_p * (d - p) + s_p * c_1 / s_1) / d


@lru_cache(maxsize=8192)
def fejer_coeff_direct(m: int, p: int, prec: int = DEFAULT_PREC) -> RealBall:
    """The same coefficient as an explicit sum of sine products.

    Valid for every integer ``p``: the sum is empty once ``|p| > m``.
    """
    if m < 1:
        raise ValueError("kernel order must be >= 1")
    p = abs(int(p))
    d = m + 2
    sines = [sin_pi(Fraction(j, d), prec) for j in range(1, d)]
    acc = RealBall.exact(0, prec)
    for j in range(1, m + 2 - p):
        acc = acc + sines[j + p - 1] * sines[j - 1]
    return acc * 2 / d


def fejer_eval(m: int, t, prec: int = DEFAULT_PREC) -> RealBall:
    """Value of the kernel at ``e^{2 i pi t}`` (a nonnegative enclosure).

    Summing the geometric series gives
    ``(2/d) sin^2(pi/d) cos^2(pi d t) / (cos(2 pi t) - cos(pi/d))^2`` with
    ``d = m + 2``; near the removable zeros of the denominator the direct sum
    is used instead.
    """
    t = as_fraction(t)
    d = m + 2
    den = cos_pi(2 * t, prec) - cos_pi(Fraction(1, d), prec)
    if den.contains(0):
        return fejer_eval_direct(m, t, prec)
    num = sin_pi(Fraction(1, d), prec) * cos_pi(d * t, prec)
    return (num / den).square() * 2 / d


def fejer_eval_direct(m: int, t, prec: int = DEFAULT_PREC) -> RealBall:
    """``(2/d) |sum_{j=1}^{m+1} sin(j pi/d) e^{2 i pi j t}|^2`` term by term."""
    t = as_fraction(t)
    d = m + 2
    re = RealBall.exact(0, prec)
    im = RealBall.exact(0, prec)
    for j in range(1, m + 2):
        s = sin_pi(Fraction(j, d), prec)
        re = re + s * cos_pi(2 * j * t, prec)
        im = im + s * sin_pi(2 * j * t, prec)
    return (re.square() + im.square()) * 2 / d


@dataclass(frozen=True)
class FejerKernel:
    order: int

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("kernel order must be >= 1")

    @property
    def spectrum(self) -> range:
        return range(-self.order, self.order + 1)

    def coefficient(self, p: int, prec: int = DEFAULT_PREC) -> RealBall:
        return fejer_coeff(self.order, p, prec)

    def __call__(self, t, prec: int = DEFAULT_PREC) -> RealBall:
        return fejer_eval(self.order, t, prec)

    def table(self, prec: int = DEFAULT_PREC) -> dict:
        return {p: fejer_coeff(self.order, p, prec) for p in self.spectrum}


def max_cap(m: int, prec: int = DEFAULT_PREC) -> int:
    """Largest integer ``p`` with ``p * pi <= m + 2``."""
    pi = RealBall.pi(prec)
    p = math.floor((m + 2) / math.pi)
    while (pi * (p + 1)).certainly_le(m + 2):
        p += 1
    while p > 0 and not (pi * p).certainly_le(m + 2):
        p -= 1
    return p


def lower_bound_eq3_factor(p_cap: int, m: int, prec: int = DEFAULT_PREC) -> RealBall:
    """The factor ``1 - 3 pi^2 (p_cap/(m+2))^2`` bounding every coefficient up to ``p_cap``.

    Raises ``ValueError`` unless ``p_cap * pi <= m + 2``.
    """
    if p_cap < 1:
        raise ValueError("cap must be a positive integer")
    pi = RealBall.pi(prec)
    if not (pi * p_cap).certainly_le(m + 2):
        raise ValueError(f"cap violation: {p_cap}*pi > {m}+2")
    r = RealBall.exact(Fraction(p_cap, m + 2), prec)
    return 1 - pi.square() * r.square() * 3


# ---------------------------------------------------------------------------
# The tent self-convolution and Kahane's polynomials
# ---------------------------------------------------------------------------

def tent() -> poly.PiecewisePoly:
    """``max(1 - 6|t|, 0)`` as an exact piecewise-linear function."""
    return poly.PiecewisePoly((
        poly.Piece(Fraction(-1, 6), Fraction(0), (Fraction(1), Fraction(6))),
        poly.Piece(Fraction(0), Fraction(1, 6), (Fraction(1), Fraction(-6))),
    ))


@lru_cache(maxsize=None)
def _tent_self_convolution() -> poly.PiecewisePoly:
    t = tent()
    return poly.convolve(t, t)


@lru_cache(maxsize=None)
def kahane_normalizer() -> Fraction:
    """The constant ``a`` making ``a * (tent * tent)`` equal to 1 at the origin."""
    return 1 / _tent_self_convolution()(0)


@lru_cache(maxsize=None)
def kahane_phi_function() -> poly.PiecewisePoly:
    """``phi`` as an even piecewise cubic supported on ``[-1/3, 1/3]``."""
    return _tent_self_convolution().scaled(kahane_normalizer())


def kahane_phi(x) -> Fraction:
    return kahane_phi_function()(as_fraction(x))


@dataclass(frozen=True)
class KahanePoly:
    """``P_j`` with coefficients ``phi(s/j)``; coefficients are computed lazily."""

    index: int
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.index < 1:
            raise ValueError("index must be >= 1")

    @property
    def degree(self) -> int:
        # phi(s/j) > 0 exactly when 3|s| < j
        return (self.index - 1) // 3

    def coefficient(self, s: int) -> Fraction:
        s = abs(int(s))
        if s not in self._cache:
            self._cache[s] = kahane_phi(Fraction(s, self.index))
        return self._cache[s]

    def table(self) -> dict:
        return {s: self.coefficient(s) for s in range(-self.degree, self.degree + 1)}

    def __call__(self, t, prec: int = DEFAULT_PREC) -> RealBall:
        """Value at ``e^{2 i pi t}``."""
        t = as_fraction(t)
        acc = RealBall.exact(self.coefficient(0), prec)
        for s in range(1, self.degree + 1):
            acc = acc + cos_pi(2 * s * t, prec) * (2 * self.coefficient(s))
        return acc


def kahane_poly(j: int) -> KahanePoly:
    return KahanePoly(j)


@dataclass(frozen=True)
class NonnegReport:
    index: int
    grid: int
    minimum: RealBall
    argmin: Fraction

    @property
    def refuted(self) -> bool:
        return self.minimum.certainly_lt(0)


def kahane_nonneg_check(j: int, grid: int, prec: int = DEFAULT_PREC) -> NonnegReport:
    """Evaluate ``P_j`` on ``grid`` equispaced points and report the smallest value.

    A grid value whose enclosure lies strictly below zero raises
    :class:`InvariantViolation`.
    """
    if grid < 4 * j:
        raise ValueError(f"grid must be at least 4*j = {4 * j}")
    P = KahanePoly(j)
    best = None
    arg = Fraction(0)
    for k in range(grid):
        t = Fraction(k, grid)
        v = P(t, prec)
        if v.certainly_lt(0):
            raise InvariantViolation(
                "kahane.nonnegative", f"P_{j}(e^(2 i pi {t})) < 0: {v!r}")
        if best is None or v.mid < best.mid:
            best, arg = v, t
    return NonnegReport(j, grid, best, arg)


@dataclass(frozen=True)
class PhiBound:
    """A certified pair with ``phi(x) >= 1 - c x^2`` for ``|x| <= gamma``."""

    c: Fraction
    gamma: Fraction
    j0: int
    taylor_c: Fraction

    def holds_for_index(self, j: int) -> bool:
        return kahane_phi(Fraction(1, j)) >= 1 - self.c / (j * j)


def _certify(c: Fraction, gamma: Fraction) -> bool:
    phi = kahane_phi_function()
    for pc in phi.pieces:
        lo, hi = max(pc.lo, -gamma), min(pc.hi, gamma)
        if lo > hi:
            continue
        diff = poly.add(pc.poly, (Fraction(-1), Fraction(0), c))
        if not poly.nonneg_on(diff, lo, hi):
            return False
    return True


def derive_phi_bound(granularity: Fraction = Fraction(1), gamma_grid: int = 96,
                     max_steps: int = 10_000) -> PhiBound:
    """Find the smallest ``c`` (on a grid of step ``granularity``) and then the
    largest ``gamma < 1/3`` (on a grid of step ``1/gamma_grid``) such that
    ``phi(x) >= 1 - c x^2`` holds on ``[-gamma, gamma]``, certified by exact
    polynomial sign checks on every piece.
    """
    granularity = as_fraction(granularity)
    phi = kahane_phi_function()
    # phi is C^2, so the right-hand piece at 0 gives phi''(0)
    right = next(pc for pc in phi.pieces if pc.lo == 0)
    taylor_c = -poly.evaluate(poly.derivative(poly.derivative(right.poly)), 0) / 2
    gammas = [Fraction(k, gamma_grid) for k in range(gamma_grid // 3 + 1, 0, -1)
              if Fraction(k, gamma_grid) < Fraction(1, 3)]
    c = math.ceil(taylor_c / granularity) * granularity
    for _ in range(max_steps):
        for g in gammas:
            if _certify(c, g):
                return PhiBound(c, g, math.floor(1 / g) + 1, taylor_c)
        c += granularity
    raise RuntimeError("no certified (c, gamma) pair within the search budget")

"""Scalar arithmetic: exact rationals, rigorous real balls, fractional parts.

Real balls are backed by mpmath's low-level interval routines
(:mod:`mpmath.libmp.libmpi`), which take an explicit precision argument on
every call.  Nothing here touches mpmath's global context, so all values are
immutable and all functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Union

from mpmath.libmp import libmpf, libmpi
from mpmath.libmp.libmpf import (
    from_int,
    from_man_exp,
    from_rational,
    mpf_add,
    mpf_cmp,
    mpf_shift,
    mpf_sub,
    round_ceiling,
    round_floor,
    to_rational,
)

from .errors import PrecisionError

DEFAULT_PREC = 128
GUARD_BITS = 64

Number = Union[int, Fraction]


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def as_fraction(x) -> Fraction:
    """Coerce ``int``, ``Fraction`` or an ``"a/q"`` string to a Fraction.

    Floats are refused: every rational entering the library must be exact.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"expected an exact rational, got {type(x).__name__}: {x!r}")


def _mpf_to_fraction(v) -> Fraction:
    p, q = to_rational(v)
    return Fraction(int(p), int(q))


def _mpf_hex(v) -> str:
    sign, man, exp, _ = v
    man = int(man)
    if not man:
        return "0x0p+0"
    return f"{'-' if sign else ''}0x{man:x}p{exp:+d}"


def _hex_to_mpf(s: str):
    s = s.strip()
    neg = s.startswith("-")
    if neg:
        s = s[1:]
    if not s.startswith("0x"):
        raise ValueError(f"bad dyadic hex literal {s!r}")
    man_s, exp_s = s[2:].split("p")
    man = int(man_s, 16)
    return from_man_exp(-man if neg else man, int(exp_s))


class RealBall:
    """A closed real interval with dyadic endpoints, carried at ``prec`` bits.

    The represented value is guaranteed to lie in ``[mid - rad, mid + rad]``.
    Arithmetic rounds outward, so every result encloses the exact result of
    the same operation applied to any values inside the operands.
    """

    __slots__ = ("_iv", "prec")

    def __init__(self, iv, prec: int = DEFAULT_PREC):
        lo, hi = iv
        if mpf_cmp(lo, hi) > 0:
            raise ValueError("ball lower endpoint exceeds upper endpoint")
        self._iv = (lo, hi)
        self.prec = int(prec)

    # -- construction -----------------------------------------------------
    @classmethod
    def exact(cls, x: Number, prec: int = DEFAULT_PREC) -> "RealBall":
        if isinstance(x, int) and not isinstance(x, bool):
            v = from_int(x)
            return cls((v, v), prec)
        x = as_fraction(x)
        if x.denominator & (x.denominator - 1) == 0:
            v = from_man_exp(x.numerator, 1 - x.denominator.bit_length())
            return cls((v, v), prec)
        lo = from_rational(x.numerator, x.denominator, prec, round_floor)
        hi = from_rational(x.numerator, x.denominator, prec, round_ceiling)
        return cls((lo, hi), prec)

    @classmethod
    def from_bounds(cls, lo: Number, hi: Number, prec: int = DEFAULT_PREC) -> "RealBall":
        a = cls.exact(lo, prec)._iv[0]
        b = cls.exact(hi, prec)._iv[1]
        return cls((a, b), prec)

    @classmethod
    def pi(cls, prec: int = DEFAULT_PREC) -> "RealBall":
        return cls(libmpi.mpi_pi(prec), prec)

    @classmethod
    def coerce(cls, x, prec: int = DEFAULT_PREC) -> "RealBall":
        if isinstance(x, RealBall):
            return x
        return cls.exact(x, prec)

    # -- views ------------------------------------------------------------
    @property
    def lower(self) -> Fraction:
        return _mpf_to_fraction(self._iv[0])

    @property
    def upper(self) -> Fraction:
        return _mpf_to_fraction(self._iv[1])

    @property
    def mid(self) -> Fraction:
        lo, hi = self._iv
        return _mpf_to_fraction(mpf_shift(mpf_add(lo, hi), -1))

    @property
    def rad(self) -> Fraction:
        lo, hi = self._iv
        return _mpf_to_fraction(mpf_shift(mpf_sub(hi, lo), -1))

    @property
    def is_exact(self) -> bool:
        return self._iv[0] == self._iv[1]

    def __float__(self) -> float:
        return libmpf.to_float(mpf_shift(mpf_add(*self._iv), -1), rnd=libmpf.round_nearest)

    def __repr__(self) -> str:
        return f"RealBall({float(self):.17g} +/- {float(self.rad):.3g}, prec={self.prec})"

    def decimal(self, digits: int = 30) -> str:
        """Midpoint rendered with ``digits`` significant decimal digits."""
        mid = mpf_shift(mpf_add(*self._iv), -1)
        return libmpf.to_str(mid, digits)

    # -- arithmetic -------------------------------------------------------
    def _other(self, other) -> "RealBall | None":
        if isinstance(other, RealBall):
            return other
        if _is_exact(other):
            return RealBall.exact(other, self.prec)
        return None

    def _p(self, other: "RealBall") -> int:
        return max(self.prec, other.prec)

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        p = self._p(o)
        return RealBall(libmpi.mpi_add(self._iv, o._iv, p), p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        p = self._p(o)
        return RealBall(libmpi.mpi_sub(self._iv, o._iv, p), p)

    def __rsub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        p = self._p(o)
        return RealBall(libmpi.mpi_mul(self._iv, o._iv, p), p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        if o.contains(0):
            raise ZeroDivisionError("divisor ball contains zero")
        p = self._p(o)
        return RealBall(libmpi.mpi_div(self._iv, o._iv, p), p)

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return RealBall(libmpi.mpi_neg(self._iv), self.prec)

    def __abs__(self):
        return RealBall(libmpi.mpi_abs(self._iv), self.prec)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        if n == 2:
            return self.square()
        return RealBall(libmpi.mpi_pow_int(self._iv, n, self.prec), self.prec)

    def square(self) -> "RealBall":
        return RealBall(libmpi.mpi_square(self._iv, self.prec), self.prec)

    def sqrt(self) -> "RealBall":
        lo, hi = self._iv
        if lo[0] and lo[1]:  # negative lower endpoint
            if self.upper < 0:
                raise ValueError("sqrt of a negative ball")
            lo = libmpf.fzero
        return RealBall(libmpi.mpi_sqrt((lo, hi), self.prec), self.prec)

    def cos_sin(self) -> "tuple[RealBall, RealBall]":
        c, s = libmpi.mpi_cos_sin(self._iv, self.prec)
        return RealBall(c, self.prec), RealBall(s, self.prec)

    def cos(self) -> "RealBall":
        return self.cos_sin()[0]

    def sin(self) -> "RealBall":
        return self.cos_sin()[1]

    def with_prec(self, prec: int) -> "RealBall":
        return RealBall(self._iv, prec)

    # -- set relations ----------------------------------------------------
    def contains(self, x) -> bool:
        o = self._other(x)
        return mpf_cmp(self._iv[0], o._iv[0]) <= 0 and mpf_cmp(o._iv[1], self._iv[1]) <= 0

    def overlaps(self, other) -> bool:
        o = self._other(other)
        return mpf_cmp(self._iv[0], o._iv[1]) <= 0 and mpf_cmp(o._iv[0], self._iv[1]) <= 0

    def certainly_ge(self, other) -> bool:
        o = self._other(other)
        return mpf_cmp(self._iv[0], o._iv[1]) >= 0

    def certainly_gt(self, other) -> bool:
        o = self._other(other)
        return mpf_cmp(self._iv[0], o._iv[1]) > 0

    def certainly_le(self, other) -> bool:
        o = self._other(other)
        return mpf_cmp(self._iv[1], o._iv[0]) <= 0

    def certainly_lt(self, other) -> bool:
        o = self._other(other)
        return mpf_cmp(self._iv[1], o._iv[0]) < 0

    def gap(self, other) -> Fraction:
        """Distance between the two enclosures; zero when they overlap."""
        o = self._other(other)
        if self.overlaps(o):
            return Fraction(0)
        if self.certainly_lt(o):
            return o.lower - self.upper
        return self.lower - o.upper

    def hull(self, other) -> "RealBall":
        o = self._other(other)
        lo = self._iv[0] if mpf_cmp(self._iv[0], o._iv[0]) <= 0 else o._iv[0]
        hi = self._iv[1] if mpf_cmp(self._iv[1], o._iv[1]) >= 0 else o._iv[1]
        return RealBall((lo, hi), self._p(o))

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        lo, hi = self._iv
        mid = mpf_shift(mpf_add(lo, hi), -1)
        rad = mpf_shift(mpf_sub(hi, lo), -1)
        return {"mid_hex": _mpf_hex(mid), "rad_hex": _mpf_hex(rad), "prec": self.prec}

    @classmethod
    def from_json(cls, d: dict) -> "RealBall":
        mid = _hex_to_mpf(d["mid_hex"])
        rad = _hex_to_mpf(d["rad_hex"])
        return cls((mpf_sub(mid, rad), mpf_add(mid, rad)), int(d.get("prec", DEFAULT_PREC)))


def ball_max(balls) -> RealBall:
    """Enclosure of the maximum of several enclosed values."""
    it = iter(balls)
    best = next(it)
    lo, hi = best._iv
    p = best.prec
    for b in it:
        if mpf_cmp(b._iv[0], lo) > 0:
            lo = b._iv[0]
        if mpf_cmp(b._iv[1], hi) > 0:
            hi = b._iv[1]
        p = max(p, b.prec)
    return RealBall((lo, hi), p)


def ball_min(balls) -> RealBall:
    return -ball_max(-b for b in balls)


@dataclass(frozen=True)
class ComplexBall:
    re: RealBall
    im: RealBall

    def __sub__(self, other):
        if isinstance(other, ComplexBall):
            return ComplexBall(self.re - other.re, self.im - other.im)
        return ComplexBall(self.re - other, self.im)

    def __add__(self, other):
        if isinstance(other, ComplexBall):
            return ComplexBall(self.re + other.re, self.im + other.im)
        return ComplexBall(self.re + other, self.im)

    def scale(self, w) -> "ComplexBall":
        return ComplexBall(self.re * w, self.im * w)

    def __abs__(self) -> RealBall:
        return (self.re.square() + self.im.square()).sqrt()


# ---------------------------------------------------------------------------
# Fractional-part operators
# ---------------------------------------------------------------------------

def nearest_int(x) -> int:
    """Closest integer to ``x``; exact ties go to the smaller integer."""
    x = as_fraction(x)
    return math.ceil(x - Fraction(1, 2))


def signed_frac(x) -> Fraction:
    """``x`` minus its nearest integer, a value in ``(-1/2, 1/2]``."""
    x = as_fraction(x)
    return x - nearest_int(x)


def _frac_dist_mpf(v, prec: int) -> RealBall:
    # distance of an mpf point to the nearest integer, as an exact ball
    f = _mpf_to_fraction(v)
    return RealBall.exact(abs(signed_frac(f)), prec)


def frac_dist(x, prec: int = DEFAULT_PREC):
    """Distance from ``x`` to the nearest integer.

    Exact (a ``Fraction``) for rational input, an enclosure for a ball.  A ball
    of width at least one yields the trivial enclosure ``[0, 1/2]``.
    """
    if not isinstance(x, RealBall):
        return abs(signed_frac(x))
    lo, hi = x.lower, x.upper
    if hi - lo >= 1:
        return RealBall.from_bounds(0, Fraction(1, 2), x.prec)
    dlo = abs(signed_frac(lo))
    dhi = abs(signed_frac(hi))
    contains_int = math.floor(hi) >= lo
    contains_half = math.floor(hi - Fraction(1, 2)) >= lo - Fraction(1, 2)
    low = Fraction(0) if contains_int else min(dlo, dhi)
    high = Fraction(1, 2) if contains_half else max(dlo, dhi)
    return RealBall.from_bounds(low, high, x.prec)


# ---------------------------------------------------------------------------
# Points on the circle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UnimodularPoint:
    """The circle point ``exp(2 i pi theta)`` with ``theta`` taken mod 1."""

    angle: Union[Fraction, RealBall]

    def __post_init__(self):
        a = self.angle
        if isinstance(a, RealBall):
            shift = math.floor(a.lower)
            if shift:
                object.__setattr__(self, "angle", a - shift)
        else:
            a = as_fraction(a)
            object.__setattr__(self, "angle", a - math.floor(a))

    @property
    def is_rational(self) -> bool:
        return isinstance(self.angle, Fraction)

    @classmethod
    def parse(cls, s) -> "UnimodularPoint":
        if isinstance(s, UnimodularPoint):
            return s
        return cls(as_fraction(s))

    def __str__(self) -> str:
        if self.is_rational:
            return f"{self.angle.numerator}/{self.angle.denominator}"
        return repr(self.angle)


def two_sin_pi(t: Fraction, prec: int = DEFAULT_PREC) -> RealBall:
    """Enclosure of ``2 sin(pi t)`` for rational ``t``."""
    t = as_fraction(t)
    if t.denominator == 1:
        return RealBall.exact(0, prec)
    if t.denominator == 2:
        return RealBall.exact(2 if t.numerator % 4 == 1 else -2, prec)
    x = RealBall.pi(prec) * RealBall.exact(t, prec)
    return x.sin() * 2


def cos_pi(t, prec: int = DEFAULT_PREC) -> RealBall:
    """Enclosure of ``cos(pi t)`` for rational ``t``; exact at multiples of 1/2."""
    r = as_fraction(t) % 2
    # cos(pi r) = cos(pi (2 - r)): fold onto [0, 1] so the cache is shared
    return _cos_pi_folded(min(r, 2 - r), prec)


@lru_cache(maxsize=1 << 16)
def _cos_pi_folded(r: Fraction, prec: int) -> RealBall:
    if r == 0:
        return RealBall.exact(1, prec)
    if r == 1:
        return RealBall.exact(-1, prec)
    if r == Fraction(1, 2):
        return RealBall.exact(0, prec)
    return (RealBall.pi(prec) * RealBall.exact(r, prec)).cos()


def sin_pi(t, prec: int = DEFAULT_PREC) -> RealBall:
    r = as_fraction(t) % 2
    if r > 1:
        return -_sin_pi_folded(min(r - 1, 2 - r), prec)
    return _sin_pi_folded(min(r, 1 - r), prec)


@lru_cache(maxsize=1 << 16)
def _sin_pi_folded(r: Fraction, prec: int) -> RealBall:
    # r in [0, 1/2]
    if r == 0:
        return RealBall.exact(0, prec)
    if r == Fraction(1, 2):
        return RealBall.exact(1, prec)
    return (RealBall.pi(prec) * RealBall.exact(r, prec)).sin()


def circle_dist(n: int, theta, prec: int = DEFAULT_PREC,
                radius_cap: Fraction = Fraction(1, 2**32)) -> RealBall:
    """Enclosure of ``|exp(2 i pi n theta) - 1| = 2 sin(pi {n theta})``.

    Rational angles ``a/q`` are reduced through ``n mod q`` so the cost does
    not depend on the size of ``n``.  Ball angles are evaluated at
    ``max(prec, bitlen(n) + 64)`` bits; if the result is still wider than
    ``radius_cap`` a :class:`PrecisionError` is raised.
    """
    pt = UnimodularPoint.parse(theta) if not isinstance(theta, RealBall) else UnimodularPoint(theta)
    a = pt.angle
    if isinstance(a, Fraction):
        r = (n * a.numerator) % a.denominator
        d = abs(signed_frac(Fraction(r, a.denominator)))
        return two_sin_pi(d, prec)
    wp = max(prec, a.prec, abs(n).bit_length() + GUARD_BITS)
    nt = a.with_prec(wp) * n
    d = frac_dist(nt)
    out = (RealBall.pi(wp) * d).sin() * 2
    if out.rad > radius_cap:
        raise PrecisionError(
            f"|lambda^n - 1| for n of {abs(n).bit_length()} bits is only known to "
            f"radius {float(out.rad):.3g}; supply the angle at higher precision"
        )
    return out


def circle_point(n: int, theta, prec: int = DEFAULT_PREC) -> ComplexBall:
    """Enclosure of ``exp(2 i pi n theta)`` for rational ``theta``."""
    a = as_fraction(UnimodularPoint.parse(theta).angle)
    r = Fraction((n * a.numerator) % a.denominator, a.denominator)
    return ComplexBall(cos_pi(2 * r, prec), sin_pi(2 * r, prec))


# The constant C relating |exp(2 i pi t) - 1| to {t}: for every real t,
#   4 {t} <= |exp(2 i pi t) - 1| <= 2 pi {t}.
def circle_constant(prec: int = DEFAULT_PREC) -> RealBall:
    return RealBall.pi(prec) * 2


def circle_constant_lower_rational(bits: int = 64) -> Fraction:
    """A rational lower bound for ``2 pi`` (used where bounds must be exact)."""
    lo = (RealBall.pi(bits + 8) * 2).lower
    scale = 1 << bits
    return Fraction(math.floor(lo * scale), scale)


def to_decimal_string(n: int) -> str:
    return str(int(n))


def fraction_str(x: Fraction) -> str:
    x = as_fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _decimal_upper(x: Fraction, sig: int = 3) -> str:
    """A short decimal string for a number ``>= x`` (``x >= 0``)."""
    if x <= 0:
        return "0"
    e = len(str(x.numerator)) - len(str(x.denominator))
    while Fraction(10) ** e > x:
        e -= 1
    while Fraction(10) ** (e + 1) <= x:
        e += 1
    shift = e - sig + 1
    mant = str(math.ceil(x / Fraction(10) ** shift))
    # rounding up may carry into an extra digit
    exp = shift + len(mant) - 1
    return f"{mant[0]}.{mant[1:]}e{exp}" if len(mant) > 1 else f"{mant}e{exp}"


def ball_decimal_pair(b: RealBall, digits: int = 40) -> tuple:
    """``(value, radius)`` decimal strings with ``[value - radius, value + radius]``
    covering the whole ball."""
    value = b.decimal(digits)
    v = Fraction(value)
    err = max(abs(b.lower - v), abs(b.upper - v))
    return value, _decimal_upper(err)

"""Generalized Riesz products built from Fejer-type kernels.

A :class:`RieszSpec` pairs frequencies ``n_1 < n_2 < ...`` with kernel orders
``m_k``.  When ``n_{k+1} - 2 sum_{j<=k} m_j n_j >= 1`` for every ``k`` each
integer has at most one expansion ``sum j_k n_k`` with ``|j_k| <= m_k``, and the
Fourier coefficient of the product measure at that integer is the product of
the kernel coefficients ``P_k^(j_k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .errors import DissociationError, InfeasibleError
from .kernels import max_cap, fejer_coeff, lower_bound_eq3_factor
from .numeric import fraction_str, DEFAULT_PREC, RealBall, ball_max, cos_pi, nearest_int
from .sequences import IndexedSequence

__all__ = [
    "RieszSpec",
    "Decomposition",
    "DissociationCertificate",
    "check_dissociation",
    "decompose",
    "decompose_exhaustive",
    "riesz_coeff",
    "unit_digit_product",
    "coeff_lower_bound",
    "unclamped_bound_product",
    "gap_intervals",
    "choose_m_sequence",
    "block_riesz_spec",
    "rational_cbrt_upper",
]


@dataclass(frozen=True)
class RieszSpec:
    """Frequencies, kernel orders and optional caps.

    ``terms`` may be longer than ``orders``: trailing terms carry no factor
    and only take part in the dissociation check.  Factor ``i`` (0-based) is
    labelled ``start + i``.
    """

    terms: tuple
    orders: tuple
    caps: tuple | None = None
    start: int = 1
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(int(t) for t in self.terms))
        object.__setattr__(self, "orders", tuple(int(m) for m in self.orders))
        if self.caps is not None:
            object.__setattr__(self, "caps", tuple(int(p) for p in self.caps))
        if not self.orders:
            raise ValueError("a spec needs at least one factor")
        if len(self.orders) > len(self.terms):
            raise ValueError("more kernel orders than terms")
        if any(m < 1 for m in self.orders):
            raise ValueError("kernel orders must be positive")
        if any(b <= a for a, b in zip(self.terms, self.terms[1:])):
            raise ValueError("terms must be strictly increasing")
        if self.caps is not None:
            if len(self.caps) != len(self.orders):
                raise ValueError("need one cap per factor")
            for i, (p, m) in enumerate(zip(self.caps, self.orders)):
                if p < 1 or p > max_cap(m):
                    raise ValueError(
                        f"cap violation at k={self.start + i}: {p}*pi > {m}+2")

    @classmethod
    def from_sequence(cls, seq: IndexedSequence, orders, caps=None, drop: int = 0) -> "RieszSpec":
        """Use ``seq`` from index ``drop + 1`` on."""
        meta = {"family": seq.family, "params": seq.params, "drop": drop}
        return cls(seq.terms[drop:], tuple(orders), caps, drop + 1, meta)

    @property
    def size(self) -> int:
        return len(self.orders)

    @property
    def labels(self) -> range:
        return range(self.start, self.start + self.size)

    def n(self, k: int) -> int:
        return self.terms[k - self.start]

    def m(self, k: int) -> int:
        return self.orders[k - self.start]

    def cap(self, k: int) -> int:
        if self.caps is None:
            raise ValueError("spec carries no caps")
        return self.caps[k - self.start]

    def prefix_sums(self) -> list:
        """``S_k = sum_{j<=k} m_j n_j`` per factor."""
        out, acc = [], 0
        for n, m in zip(self.terms, self.orders):
            acc += m * n
            out.append(acc)
        return out

    def spectrum_bound(self) -> int:
        return self.prefix_sums()[-1]

    def to_json(self) -> dict:
        out = {"terms": [str(t) for t in self.terms], "orders": list(self.orders),
               "start": self.start}
        if self.caps is not None:
            out["caps"] = list(self.caps)
        if self.meta:
            out["meta"] = self.meta
        return out

    @classmethod
    def from_json(cls, d: dict) -> "RieszSpec":
        return cls(tuple(int(t) for t in d["terms"]), tuple(int(m) for m in d["orders"]),
                   tuple(int(p) for p in d["caps"]) if d.get("caps") is not None else None,
                   int(d.get("start", 1)), d.get("meta", {}))


@dataclass(frozen=True)
class DissociationCertificate:
    """Gap lengths ``l_k = n_{k+1} - 2 S_k - 1`` over the horizon.

    ``increasing`` only speaks for the generated prefix; growth to infinity
    cannot be certified on a finite horizon.
    """

    gaps: tuple            # ((k, l_k), ...)
    increasing: bool
    prefix_certificate: bool = True

    @property
    def lengths(self) -> tuple:
        return tuple(l for _, l in self.gaps)

    def to_json(self) -> dict:
        return {"gaps": [[k, str(l)] for k, l in self.gaps], "increasing": self.increasing,
                "prefix_certificate": self.prefix_certificate}


def check_dissociation(spec: RieszSpec) -> DissociationCertificate:
    """Verify ``n_{k+1} - 2 S_k >= 1`` wherever ``n_{k+1}`` is available.

    Raises :class:`DissociationError` with the first failing ``k``.
    """
    S = spec.prefix_sums()
    gaps = []
    for i in range(min(spec.size, len(spec.terms) - 1)):
        l_k = spec.terms[i + 1] - 2 * S[i] - 1
        if l_k < 0:
            raise DissociationError(spec.start + i, -l_k)
        gaps.append((spec.start + i, l_k))
    inc = all(b > a for (_, a), (_, b) in zip(gaps, gaps[1:]))
    return DissociationCertificate(tuple(gaps), inc)


def gap_intervals(spec: RieszSpec) -> list:
    """Open intervals ``(S_k, n_{k+1} - S_k)`` on which the coefficients vanish."""
    check_dissociation(spec)
    S = spec.prefix_sums()
    return [(S[i], spec.terms[i + 1] - S[i])
            for i in range(min(spec.size, len(spec.terms) - 1))]


@dataclass(frozen=True)
class Decomposition:
    n: int
    digits: dict           # label -> nonzero digit

    @property
    def support(self) -> tuple:
        return tuple(sorted(self.digits))

    def digit_vector(self, spec: RieszSpec) -> tuple:
        return tuple(self.digits.get(k, 0) for k in spec.labels)

    def value(self, spec: RieszSpec) -> int:
        return sum(j * spec.n(k) for k, j in self.digits.items())

    def digits_str(self) -> str:
        return " ".join(f"{k}:{j}" for k, j in sorted(self.digits.items()))


def decompose(n: int, spec: RieszSpec) -> Decomposition | None:
    """The expansion ``n = sum j_k n_k`` with ``|j_k| <= m_k``, or ``None``.

    Works from the largest frequency down, taking the nearest admissible
    multiple; dissociation makes that choice forced.
    """
    n = int(n)
    S = spec.prefix_sums()
    if abs(n) > S[-1]:
        return None
    r = n
    digits = {}
    for i in range(spec.size - 1, -1, -1):
        nk, mk = spec.terms[i], spec.orders[i]
        j = max(-mk, min(mk, nearest_int(Fraction(r, nk))))
        r -= j * nk
        if abs(r) > (S[i - 1] if i else 0):
            return None
        if j:
            digits[spec.start + i] = j
    return Decomposition(n, dict(sorted(digits.items()))) if r == 0 else None


def decompose_exhaustive(n: int, spec: RieszSpec) -> list:
    """Every digit vector representing ``n`` (brute force, small specs only)."""
    from itertools import product

    out = []
    for js in product(*(range(-m, m + 1) for m in spec.orders)):
        if sum(j * t for j, t in zip(js, spec.terms)) == n:
            out.append(js)
    return out


def riesz_coeff(n: int, spec: RieszSpec, prec: int = DEFAULT_PREC) -> RealBall:
    d = decompose(n, spec)
    if d is None:
        return RealBall.exact(0, prec)
    acc = RealBall.exact(1, prec)
    for k, j in d.digits.items():
        acc = acc * fejer_coeff(spec.m(k), j, prec)
    return acc


def unit_digit_product(F: Iterable[int], spec: RieszSpec, prec: int = DEFAULT_PREC) -> RealBall:
    """``prod_{k in F} cos(pi/(m_k+2))``, the coefficient at ``sum_{k in F} n_k``."""
    acc = RealBall.exact(1, prec)
    for k in F:
        acc = acc * cos_pi(Fraction(1, spec.m(k) + 2), prec)
    return acc


def unclamped_bound_product(F: Iterable[int], spec: RieszSpec, prec: int = DEFAULT_PREC) -> RealBall:
    """Unclamped ``prod_{k in F} (1 - 3 pi^2 (p_k/(m_k+2))^2)``.

    Kept for comparison only: with two or more negative factors this product
    can exceed the actual coefficient.
    """
    acc = RealBall.exact(1, prec)
    for k in F:
        acc = acc * lower_bound_eq3_factor(spec.cap(k), spec.m(k), prec)
    return acc


def coeff_lower_bound(F: Iterable[int], spec: RieszSpec, prec: int = DEFAULT_PREC) -> RealBall:
    """A lower bound for the coefficient at every ``sum_{k in F} j_k n_k`` with
    ``1 <= |j_k| <= p_k``.

    Each kernel coefficient up to the cap is positive, so factors are clamped
    at zero before multiplying.
    """
    if spec.caps is None:
        raise ValueError("coeff_lower_bound needs a spec with caps")
    acc = RealBall.exact(1, prec)
    zero = RealBall.exact(0, prec)
    for k in sorted(set(F)):
        if k not in spec.labels:
            raise ValueError(f"index {k} outside the spec horizon")
        f = lower_bound_eq3_factor(spec.cap(k), spec.m(k), prec)
        acc = acc * ball_max([f, zero])
    return acc


# ---------------------------------------------------------------------------
# Choosing kernel orders
# ---------------------------------------------------------------------------

def _icbrt_ceil(n: int) -> int:
    if n <= 0:
        return 0
    x = 1 << ((n.bit_length() + 2) // 3)
    while True:
        y = (2 * x + n // (x * x)) // 3
        if y >= x:
            break
        x = y
    while x ** 3 < n:
        x += 1
    while x > 0 and (x - 1) ** 3 >= n:
        x -= 1
    return x


def rational_cbrt_upper(t: Fraction, bits: int = 64) -> Fraction:
    """A dyadic ``r >= t^(1/3)`` within about ``2^-bits`` of it."""
    t = Fraction(t)
    scaled = math.ceil(t * (1 << (3 * bits)))
    return Fraction(_icbrt_ceil(scaled), 1 << bits)


EPS_CEILING = Fraction(49, 100)


def _epsilons(rho: list) -> list:
    """``eps_1 = 0``, ``eps_{k+1} = min(49/100, T_k^(1/3))`` with ``T_k`` the tail sum of ``rho^2``."""
    tails = [Fraction(0)] * (len(rho) + 1)
    for k in range(len(rho) - 1, -1, -1):
        tails[k] = tails[k + 1] + rho[k] ** 2
    return [Fraction(0)] + [min(EPS_CEILING, rational_cbrt_upper(tails[k])) for k in range(len(rho))]


def _orders_for(terms: list, weights: list, threshold: Fraction):
    """Orders for ``terms`` (the last one is a sentinel) or the reason they fail."""
    rho = [Fraction(w * a, b) for w, a, b in zip(weights, terms, terms[1:])]
    eps = _epsilons(rho)
    lhs = sum((r / e) ** 2 for r, e in zip(rho, eps[1:]))
    if lhs >= threshold:
        return None, eps, lhs, "ratio sum above threshold"
    m = []
    for k in range(len(rho)):
        mk = math.floor((eps[k + 1] * terms[k + 1] - eps[k] * terms[k]) / (2 * terms[k]))
        if mk < 1:
            return None, eps, lhs, f"order at k={k + 1} is {mk}"
        m.append(mk)
    # slack implied by the telescoping choice of m
    acc = 0
    for k, mk in enumerate(m):
        acc += 2 * mk * terms[k]
        if terms[k + 1] - acc < (1 - eps[k + 1]) * terms[k + 1]:
            return None, eps, lhs, f"slack fails at k={k + 1}"
    return m, eps, lhs, None


def _product_cos(orders, prec) -> RealBall:
    acc = RealBall.exact(1, prec)
    for m in orders:
        acc = acc * cos_pi(Fraction(1, m + 2), prec)
    return acc


def choose_m_sequence(seq: IndexedSequence, target=None, threshold: Fraction = Fraction(1, 9),
                      max_drop: int | None = None, prec: int = DEFAULT_PREC) -> RieszSpec:
    """Kernel orders ``m_k`` for ``seq`` with the last term as sentinel.

    Drops the shortest prefix for which the epsilon sequence satisfies
    ``sum (rho_k/eps_{k+1})^2 < threshold`` and, if ``target`` is given, the
    product ``prod cos(pi/(m_k+2))`` is certainly at least ``target``.
    """
    terms = list(seq.terms)
    if len(terms) < 2:
        raise InfeasibleError("need at least two terms")
    limit = len(terms) - 2 if max_drop is None else min(max_drop, len(terms) - 2)
    reasons = []
    for drop in range(limit + 1):
        sub = terms[drop:]
        m, eps, lhs, why = _orders_for(sub, [1] * (len(sub) - 1), threshold)
        if m is None:
            reasons.append((drop, why, float(lhs)))
            continue
        if target is not None and not _product_cos(m, prec).certainly_ge(Fraction(target)):
            reasons.append((drop, "cosine product below target", float(lhs)))
            continue
        caps = tuple(1 for _ in m) if all(x >= 2 for x in m) else None
        meta = {"family": seq.family, "params": seq.params, "drop": drop,
                "epsilon": [fraction_str(e) for e in eps],
                "ratio_condition": fraction_str(lhs)}
        spec = RieszSpec(tuple(sub), tuple(m), caps, drop + 1, meta)
        check_dissociation(spec)
        return spec
    raise InfeasibleError(f"no admissible prefix drop; attempts: {reasons}")


def block_riesz_spec(seq: IndexedSequence, target=None, threshold: Fraction = Fraction(1, 81),
                     max_drop: int | None = None, prec: int = DEFAULT_PREC) -> RieszSpec:
    """A spec over the block bases ``p_l`` with caps ``q_l = sum_j q_{j,l}``.

    Uses ``rho_l = q_l p_l / p_{l+1}``; ``p_{l+1}`` of the last block comes from
    ``seq.bases`` when available, otherwise the last block has no factor.
    """
    if not seq.blocks:
        raise ValueError("sequence carries no block structure")
    blocks = list(seq.blocks)
    bases = [b.base for b in blocks]
    if seq.bases is not None:
        extra = [p for p in seq.bases if p > bases[-1]]
        if extra:
            bases.append(extra[0])
    qsums = [b.q_sum for b in blocks]
    if len(bases) < 2:
        raise InfeasibleError("need at least two blocks")
    limit = len(bases) - 2 if max_drop is None else min(max_drop, len(bases) - 2)
    reasons = []
    for drop in range(limit + 1):
        sub = bases[drop:]
        w = qsums[drop:drop + len(sub) - 1]
        m, eps, lhs, why = _orders_for(sub, w, threshold)
        if m is None:
            reasons.append((drop, why, float(lhs)))
            continue
        if any(q > max_cap(mk) for q, mk in zip(w, m)):
            reasons.append((drop, "cap q_l pi <= m_l + 2 fails", float(lhs)))
            continue
        spec = RieszSpec(tuple(sub), tuple(m), tuple(w), blocks[drop].label,
                         {"family": seq.family, "params": seq.params, "drop": drop,
                          "epsilon": [fraction_str(e) for e in eps],
                          "ratio_condition": fraction_str(lhs)})
        if target is not None and not coeff_lower_bound(spec.labels, spec, prec).certainly_ge(
                Fraction(target)):
            reasons.append((drop, "certified bound below target", float(lhs)))
            continue
        check_dissociation(spec)
        return spec
    raise InfeasibleError(f"no admissible prefix drop; attempts: {reasons}")

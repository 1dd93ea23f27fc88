"""Exhaustive checks over finite subset sums ``sum_{k in F} n_k``.

Windows are enumerated completely: a window of width ``w`` has ``2^w - 1``
nonempty subsets, so widths are capped (default 24) and must be raised
explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .errors import GuardError, InvariantViolation
from .groups import gp_partial_sums
from .numeric import (fraction_str, DEFAULT_PREC, ComplexBall, RealBall, UnimodularPoint, as_fraction,
                      ball_max, circle_dist, circle_point, cos_pi, signed_frac)
from .riesz import RieszSpec, coeff_lower_bound, riesz_coeff, unit_digit_product
from .sequences import IndexedSequence, erdos_taylor, th1_sequence

__all__ = [
    "WIDTH_GUARD",
    "WindowReport",
    "AtomicMeasure",
    "AtomicReport",
    "SumsetCertificate",
    "DyadicBlockSums",
    "AdditivityReport",
    "subset_sums",
    "verify_lemma1",
    "ip_window_deviation",
    "atomic_ip_check",
    "section62_sequence",
    "section62_ginf_scan",
]

WIDTH_GUARD = 24
ADDITIVITY_THRESHOLD = Fraction(1, 4)


def subset_sums(seq: IndexedSequence | Sequence[int], lo: int, hi: int,
                guard: int = WIDTH_GUARD) -> list:
    """Sorted distinct values of ``sum_{k in F} n_k`` over nonempty ``F`` in ``lo..hi`` (1-based)."""
    if hi < lo:
        raise ValueError("empty index range")
    if hi - lo > guard:
        raise GuardError(f"range {lo}..{hi} exceeds the enumeration guard ({guard})")
    terms = [seq[k] for k in range(lo, hi + 1)] if isinstance(seq, IndexedSequence) \
        else [int(seq[k - 1]) for k in range(lo, hi + 1)]
    sums = {0}
    for t in terms:
        sums |= {s + t for s in sums}
    sums.discard(0)
    return sorted(sums)


# ---------------------------------------------------------------------------
# Sumsets of consecutive blocks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SumsetCertificate:
    l: int
    q: int
    base: int                  # p_l
    indices: tuple             # (M_{l-1}+1, M_{l+q})
    count: int                 # number of distinct sums
    top_multiple: int          # largest s with s p_l a sum
    exact: bool                # sums == {p_l, 2 p_l, ..., top_multiple p_l}
    display_multiple: int      # prod_{j=0}^{q} (l+j)^2((l+j)^2+1)/2
    display_equal: bool
    display_prefix: bool

    def to_json(self) -> dict:
        return {"l": self.l, "q": self.q, "base": str(self.base), "indices": list(self.indices),
                "count": self.count, "top_multiple": str(self.top_multiple), "exact": self.exact,
                "display_multiple": str(self.display_multiple),
                "display_equal": self.display_equal, "display_prefix": self.display_prefix}


def verify_lemma1(l: int, q: int, guard: int = WIDTH_GUARD) -> SumsetCertificate:
    """Subset sums over blocks ``l..l+q`` of the ``l^2 (l^2+1)/2`` sequence.

    The sums are exactly the multiples ``s p_l`` for
    ``1 <= s <= (p_{l+1} + ... + p_{l+q+1}) / p_l`` (block ``j`` sums to
    ``p_{j+1}``).  The product ``prod (l+j)^2((l+j)^2+1)/2 = p_{l+q+1}/p_l``
    gives a run of consecutive multiples contained in that set, equal to it
    only for ``q = 0``; both comparisons are reported.
    """
    if l < 2 or q < 0:
        raise ValueError("need l >= 2 and q >= 0")
    seq = th1_sequence(l + q)
    lo, hi = seq.markers[l - 1] + 1, seq.markers[l + q]
    sums = subset_sums(seq, lo, hi, guard)
    p = seq.bases
    base = p[l - 1]
    top = sum(p[j] for j in range(l, l + q + 1)) // base
    exact = len(sums) == top and all(s == (i + 1) * base for i, s in enumerate(sums))
    if not exact:
        raise InvariantViolation(
            "lemma1.sumset", f"l={l}, q={q}: sums are not the multiples of {base} up to {top * base}")
    disp = 1
    for j in range(q + 1):
        t = (l + j) ** 2
        disp *= t * (t + 1) // 2
    return SumsetCertificate(l, q, base, (lo, hi), len(sums), top, exact, disp,
                            disp == top, disp <= top)


# ---------------------------------------------------------------------------
# Window deviations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AtomicMeasure:
    """Finitely many rational atoms ``exp(2 i pi theta_i)`` with rational weights."""

    atoms: tuple
    weights: tuple

    def __post_init__(self):
        atoms = tuple(a if isinstance(a, UnimodularPoint) else UnimodularPoint.parse(a)
                      for a in self.atoms)
        if any(not a.is_rational for a in atoms):
            raise ValueError("atoms must have rational angles")
        weights = tuple(as_fraction(w) for w in self.weights)
        if len(atoms) != len(weights) or not atoms:
            raise ValueError("need one positive weight per atom")
        if any(w <= 0 for w in weights) or sum(weights) != 1:
            raise ValueError("weights must be positive and sum to 1")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def dirac(cls, theta) -> "AtomicMeasure":
        return cls((theta,), (1,))

    def coefficient(self, n: int, prec: int = DEFAULT_PREC) -> ComplexBall:
        """``mu^(n) = sum_i w_i lambda_i^n`` (conjugation-free convention)."""
        acc = ComplexBall(RealBall.exact(0, prec), RealBall.exact(0, prec))
        for a, w in zip(self.atoms, self.weights):
            acc = acc + circle_point(n, a.angle, prec).scale(w)
        return acc

    def to_json(self) -> dict:
        return {"atoms": [str(a) for a in self.atoms],
                "weights": [fraction_str(w) for w in self.weights]}

    @classmethod
    def from_json(cls, d: dict) -> "AtomicMeasure":
        return cls(tuple(d["atoms"]), tuple(d["weights"]))


@dataclass(frozen=True)
class WindowReport:
    k0: int
    w: int
    deviation: RealBall        # enclosure of the max over subsets
    worst_subset: tuple
    worst_value: object        # the coefficient at the worst subset sum
    source: str
    floor_unit: RealBall | None = None   # 1 - prod_{k in window} cos(pi/(m_k+2))
    floor_bound: RealBall | None = None   # 1 - certified product lower bound

    def to_json(self) -> dict:
        def j(b):
            if b is None:
                return None
            if isinstance(b, ComplexBall):
                return {"re": b.re.to_json(), "im": b.im.to_json()}
            return b.to_json()
        return {"k0": self.k0, "w": self.w, "source": self.source,
                "deviation": j(self.deviation), "worst_subset": list(self.worst_subset),
                "worst_value": j(self.worst_value), "floor_unit": j(self.floor_unit),
                "floor_bound": j(self.floor_bound)}


def _coefficient_source(source, prec: int):
    """Return ``(tag, n -> coefficient)``."""
    if isinstance(source, RieszSpec):
        return "riesz-spec", lambda n: riesz_coeff(n, source, prec)
    if isinstance(source, AtomicMeasure):
        return "atomic", lambda n: source.coefficient(n, prec)
    if isinstance(source, Mapping):
        zero = RealBall.exact(0, prec)
        return "custom-table", lambda n: RealBall.coerce(source.get(n, zero), prec)
    if callable(source):
        return "custom-table", source
    raise TypeError(f"unsupported coefficient source {type(source).__name__}")


def _distance_to_one(c, prec: int) -> RealBall:
    if isinstance(c, ComplexBall):
        return abs(c - 1)
    return abs(RealBall.coerce(c, prec) - 1)


def _gray_sums(terms: list):
    """Yield ``(mask, subset sum)`` for every nonempty subset, one bit flip at a time."""
    total, prev = 0, 0
    for i in range(1, 1 << len(terms)):
        g = i ^ (i >> 1)
        bit = (g ^ prev).bit_length() - 1
        total += terms[bit] if g & (1 << bit) else -terms[bit]
        prev = g
        yield g, total


def ip_window_deviation(source, seq: IndexedSequence, k0: int, w: int,
                        guard: int = WIDTH_GUARD, prec: int = DEFAULT_PREC) -> WindowReport:
    """``max_F |c(sum_{k in F} n_k) - 1|`` over nonempty ``F`` in ``k0..k0+w-1``.

    ``source`` is a :class:`RieszSpec` (frequencies labelled like ``seq``), an
    :class:`AtomicMeasure`, a mapping ``n -> value`` (missing keys are zero) or
    a callable.
    """
    if w < 1:
        raise ValueError("window width must be positive")
    if w > guard:
        raise GuardError(f"window width {w} exceeds the enumeration guard ({guard})")
    if k0 < 1 or k0 + w - 1 > len(seq):
        raise ValueError(f"window {k0}..{k0 + w - 1} is outside the sequence")
    tag, coeff = _coefficient_source(source, prec)
    idx = list(range(k0, k0 + w))
    terms = [seq[k] for k in idx]
    best = None
    devs = []
    for mask, n in _gray_sums(terms):
        c = coeff(n)
        d = _distance_to_one(c, prec)
        devs.append(d)
        key = (d.mid, -mask)
        if best is None or key > best[0]:
            best = (key, mask, c)
    _, mask, cval = best
    F = tuple(k for i, k in enumerate(idx) if mask >> i & 1)
    f4 = f3 = None
    if isinstance(source, RieszSpec) and all(k in source.labels for k in idx):
        f4 = 1 - unit_digit_product(idx, source, prec)
        if source.caps is not None:
            f3 = 1 - coeff_lower_bound(idx, source, prec)
    return WindowReport(k0, w, ball_max(devs), F, cval, tag, f4, f3)


@dataclass(frozen=True)
class AtomicReport:
    window: WindowReport
    products: tuple            # per atom: prod_k |1 + lambda^{n_k}| / 2 over the window
    partial_sums: tuple        # per atom: sum_{k < k0 + w} |lambda^{n_k} - 1|^2

    def to_json(self) -> dict:
        return {"window": self.window.to_json(),
                "products": [p.to_json() for p in self.products],
                "partial_sums": [s.to_json() for s in self.partial_sums]}


def atomic_ip_check(mu: AtomicMeasure, seq: IndexedSequence, k0: int, w: int,
                    guard: int = WIDTH_GUARD, prec: int = DEFAULT_PREC) -> AtomicReport:
    win = ip_window_deviation(mu, seq, k0, w, guard, prec)
    products, sums = [], []
    for a in mu.atoms:
        th = a.angle
        acc = RealBall.exact(1, prec)
        for k in range(k0, k0 + w):
            r = Fraction((seq[k] * th.numerator) % th.denominator, th.denominator)
            # |1 + e^{2 i pi r}| / 2 = |cos(pi r)|
            acc = acc * abs(cos_pi(r, prec))
        products.append(acc)
        sums.append(gp_partial_sums(th, seq, 2, k0 + w - 1, prec).partial[-1])
    return AtomicReport(win, tuple(products), tuple(sums))


# ---------------------------------------------------------------------------
# Subset sums of dyadic blocks of the Erdos-Taylor sequence
# ---------------------------------------------------------------------------

QMAX_GUARD = 3


@dataclass(frozen=True)
class DyadicBlockSums:
    base: IndexedSequence          # Erdos-Taylor terms p_1..p_{2^{qmax+1}}
    blocks: dict                   # q -> sorted subset sums over indices 2^q+1..2^{q+1}
    sequence: IndexedSequence      # sorted union

    def block_indices(self, q: int) -> range:
        return range(2 ** q + 1, 2 ** (q + 1) + 1)


def section62_sequence(qmax: int, guard: int = QMAX_GUARD) -> DyadicBlockSums:
    if qmax < 1:
        raise ValueError("qmax must be >= 1")
    if qmax > guard:
        raise GuardError(f"qmax={qmax} exceeds the guard ({guard})")
    base = erdos_taylor(2 ** (qmax + 1))
    blocks = {q: subset_sums(base, 2 ** q + 1, 2 ** (q + 1)) for q in range(1, qmax + 1)}
    union = []
    for q in range(1, qmax + 1):
        if union and blocks[q][0] <= union[-1]:
            raise InvariantViolation("section62.disjoint", f"block {q} overlaps block {q - 1}")
        union.extend(blocks[q])
    seq = IndexedSequence(tuple(union), "section62", {"qmax": qmax})
    return DyadicBlockSums(base, blocks, seq)


@dataclass(frozen=True)
class AdditivityReport:
    theta: Fraction
    pairs_checked: int
    pairs_in_hypothesis: int
    block_max_dist: tuple          # (q, max |lambda^{n}-1| over the block's sums)
    block_frac_sums: tuple         # (q, sum_k {p_k theta})

    def to_json(self) -> dict:
        return {"theta": fraction_str(self.theta),
                "pairs_checked": self.pairs_checked,
                "pairs_in_hypothesis": self.pairs_in_hypothesis,
                "block_max_dist": [{"q": q, "value": v.to_json()} for q, v in self.block_max_dist],
                "block_frac_sums": [{"q": q, "value": fraction_str(v)}
                                    for q, v in self.block_frac_sums],
                "label": "finite-horizon evidence"}


def _additivity_pairs(vals: list) -> tuple:
    """Check ``<x_F + x_G> = <x_F> + <x_G>`` for disjoint nonempty ``F, G`` whenever
    ``|<x_F>|, |<x_G>|, |<x_{F u G}>| < 1/4``.  Returns (pairs, pairs in hypothesis)."""
    n = len(vals)
    full = (1 << n) - 1
    sf = [Fraction(0)] * (1 << n)
    for mask in range(1, 1 << n):
        low = (mask & -mask).bit_length() - 1
        sf[mask] = sf[mask & (mask - 1)] + vals[low]
    sig = [signed_frac(x) for x in sf]
    pairs = hyp = 0
    for F in range(1, full + 1):
        rest = full ^ F
        G = rest
        while G:
            pairs += 1
            a, b, c = sig[F], sig[G], sig[F | G]
            if abs(a) < ADDITIVITY_THRESHOLD and abs(b) < ADDITIVITY_THRESHOLD \
                    and abs(c) < ADDITIVITY_THRESHOLD:
                hyp += 1
                if c != a + b:
                    raise InvariantViolation(
                        "section62.additivity", f"F={F:b}, G={G:b}: <{c}> != <{a}> + <{b}>")
            G = (G - 1) & rest
    return pairs, hyp


def section62_ginf_scan(samples: Iterable, qmax: int, prec: int = DEFAULT_PREC) -> list:
    s62 = section62_sequence(qmax)
    out = []
    for th in samples:
        th = as_fraction(th)
        if th % 1 == 0:
            raise ValueError("theta = 0 (lambda = 1) is excluded")
        pairs = hyp = 0
        maxd, fsums = [], []
        for q in range(1, qmax + 1):
            idx = s62.block_indices(q)
            vals = [s62.base[k] * th for k in idx]
            a, b = _additivity_pairs(vals)
            pairs += a
            hyp += b
            maxd.append((q, ball_max([circle_dist(n, th, prec) for n in s62.blocks[q]])))
            fsums.append((q, sum((abs(signed_frac(v)) for v in vals), Fraction(0))))
        out.append(AdditivityReport(th, pairs, hyp, tuple(maxd), tuple(fsums)))
    return out

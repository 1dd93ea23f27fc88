"""Finite-horizon diagnostics for the subgroups ``G_p((n_k))`` of the circle.

``G_p`` (``p`` finite) collects the points with ``sum |lambda^{n_k} - 1|^p``
finite and ``G_inf`` those with ``|lambda^{n_k} - 1| -> 0``.  Only prefixes are
ever inspected, so every conclusion here is evidence on a finite horizon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InvariantViolation, WitnessError
from .numeric import (fraction_str, DEFAULT_PREC, RealBall, UnimodularPoint, as_fraction, ball_max,
                      circle_dist, nearest_int, signed_frac)
from .sequences import IndexedSequence, erdos_taylor

__all__ = [
    "GroupScan",
    "gp_partial_sums",
    "ETReport",
    "et_divergence_check",
    "WitnessCertificate",
    "witness_search",
    "verify_witness",
    "series_partial_sums",
    "Prop7Sample",
    "prop7_negative_scan",
]

INF = "inf"


def _exponent(p) -> object:
    if p in (INF, "infinity", math.inf):
        return INF
    p = int(p)
    if p < 1:
        raise ValueError("exponent must be a positive integer or 'inf'")
    return p


@dataclass(frozen=True)
class GroupScan:
    theta: UnimodularPoint
    p: object
    K: int
    terms: tuple           # |lambda^{n_k} - 1| for k = 1..K
    partial: tuple         # partial sums (p finite) or tail sups (p = inf)
    family: str = "explicit"

    @property
    def label(self) -> str:
        return "finite-horizon evidence"

    def to_json(self) -> dict:
        return {"theta": str(self.theta), "p": self.p, "K": self.K, "family": self.family,
                "terms": [t.to_json() for t in self.terms],
                "partial": [t.to_json() for t in self.partial], "label": self.label}


def gp_partial_sums(theta, seq: IndexedSequence, p, K: int | None = None,
                    prec: int = DEFAULT_PREC) -> GroupScan:
    """Partial sums ``sum_{k<=K} |lambda^{n_k} - 1|^p``.

    For ``p = 'inf'`` the ``partial`` field holds ``sup_{K' <= j <= K}`` of the
    terms, the finite stand-in for the tail supremum.
    """
    p = _exponent(p)
    pt = theta if isinstance(theta, UnimodularPoint) else (
        UnimodularPoint(theta) if isinstance(theta, RealBall) else UnimodularPoint.parse(theta))
    K = len(seq) if K is None else K
    if K > len(seq):
        raise ValueError(f"horizon {K} exceeds the {len(seq)} available terms")
    terms = [circle_dist(seq[k], pt.angle, prec) for k in range(1, K + 1)]
    if p == INF:
        partial, run = [], None
        for t in reversed(terms):
            run = t if run is None else ball_max([run, t])
            partial.append(run)
        partial.reverse()
    else:
        partial, acc = [], RealBall.exact(0, prec)
        for t in terms:
            acc = acc + (t.square() if p == 2 else t ** p)
            partial.append(acc)
    return GroupScan(pt, p, K, tuple(terms), tuple(partial), seq.family)


@dataclass(frozen=True)
class ETReport:
    theta: Fraction
    K: int
    epsilon: RealBall
    rows: tuple            # (k, |lambda^{n_k}-1|, |lambda^{n_{k+1}}-1|, branch)
    partial_p1: tuple

    @property
    def holds(self) -> bool:
        return all(r[3] is not None for r in self.rows)

    def to_json(self) -> dict:
        return {"theta": fraction_str(self.theta), "K": self.K,
                "epsilon": self.epsilon.to_json(), "holds": self.holds,
                "rows": [{"k": k, "a": a.to_json(), "b": b.to_json(), "branch": br}
                         for k, a, b, br in self.rows],
                "partial_p1": [s.to_json() for s in self.partial_p1],
                "label": "finite-horizon evidence"}


def et_divergence_check(theta, K: int, prec: int = DEFAULT_PREC) -> ETReport:
    """For the Erdos-Taylor sequence and ``eps = |lambda - 1|/2`` check, for each
    ``k <= K``, that ``|lambda^{n_k} - 1| >= eps/k`` or ``|lambda^{n_{k+1}} - 1| >= eps``.

    Each branch must hold with certainty; otherwise :class:`InvariantViolation`.
    """
    theta = as_fraction(theta)
    if not 0 < theta < 1:
        raise ValueError("theta must lie in (0, 1)")
    seq = erdos_taylor(K + 1)
    eps = circle_dist(1, theta, prec) / 2
    vals = [circle_dist(seq[k], theta, prec) for k in range(1, K + 2)]
    rows, partial, acc = [], [], RealBall.exact(0, prec)
    for k in range(1, K + 1):
        a, b = vals[k - 1], vals[k]
        if a.certainly_ge(eps / k):
            branch = "current"
        elif b.certainly_ge(eps):
            branch = "next"
        else:
            raise InvariantViolation(
                "erdos-taylor.disjunction",
                f"theta={theta}, k={k}: |l^n_k - 1| = {a!r}, |l^n_(k+1) - 1| = {b!r}, eps = {eps!r}")
        rows.append((k, a, b, branch))
        acc = acc + a
        partial.append(acc)
    return ETReport(theta, K, eps, tuple(rows), tuple(partial))


# ---------------------------------------------------------------------------
# Witness search by nested intervals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WitnessCertificate:
    theta: Fraction
    C: Fraction
    entries: tuple         # (l, {p_l theta}, C p_l / p_{l+1})
    degenerate: bool
    interval: tuple        # final (lo, hi)

    def to_json(self) -> dict:
        def s(x):
            return fraction_str(x)
        return {"theta": s(self.theta), "C": s(self.C), "degenerate": self.degenerate,
                "interval": [s(self.interval[0]), s(self.interval[1])],
                "entries": [{"l": l, "frac": s(f), "bound": s(b)} for l, f, b in self.entries]}

    @classmethod
    def from_json(cls, d: dict) -> "WitnessCertificate":
        return cls(Fraction(d["theta"]), Fraction(d["C"]),
                   tuple((int(e["l"]), Fraction(e["frac"]), Fraction(e["bound"]))
                         for e in d["entries"]),
                   bool(d["degenerate"]), tuple(Fraction(x) for x in d["interval"]))


def verify_witness(cert: WitnessCertificate, bases: Sequence[int]) -> bool:
    """Recompute every ``{p_l theta}`` and bound from scratch (``bases[0]`` is ``p_1``)."""
    for l, f, b in cert.entries:
        p, q = bases[l - 1], bases[l]
        if abs(signed_frac(p * cert.theta)) != f or cert.C * Fraction(p, q) != b or f > b:
            return False
    return True


def _closest_component(lo: Fraction, hi: Fraction, target: Fraction, p: int, b: Fraction):
    """Intersection of ``[lo, hi]`` with the component of ``{x : {p x} <= b}``
    nearest to ``target`` (ties toward smaller ``x``), or ``None``."""
    if b >= Fraction(1, 2):
        return lo, hi
    a0 = nearest_int(target * p)
    best = None
    for a in (a0 - 1, a0, a0 + 1):
        c_lo, c_hi = (a - b) / p, (a + b) / p
        dist = max(c_lo - target, target - c_hi, Fraction(0))
        key = (dist, c_lo)
        if best is None or key < best[0]:
            best = (key, c_lo, c_hi)
    _, c_lo, c_hi = best
    new_lo, new_hi = max(lo, c_lo), min(hi, c_hi)
    return (new_lo, new_hi) if new_lo <= new_hi else None


GOLDEN = Fraction(89, 233)


def witness_search(bases: Sequence[int], C, L: int, start: int = 1,
                   avoid_lattice: bool = False) -> WitnessCertificate:
    """Find ``theta`` with ``{p_l theta} <= C p_l/p_{l+1}`` for ``start <= l <= L``.

    ``bases[0]`` is ``p_1``; ``p_{L+1}`` must be present.  Each step keeps the
    part of the current interval lying in the component nearest its midpoint
    (or, with ``avoid_lattice``, nearest the point at ``89/233`` of its
    length, which steers away from rational points of small height).  The
    returned ``theta`` is that point of the final interval, and every
    inequality is re-verified exactly.
    """
    C = as_fraction(C)
    bases = [int(p) for p in bases]
    if len(bases) < L + 1:
        raise ValueError(f"need p_1..p_{L + 1}; got {len(bases)} bases")
    pick = GOLDEN if avoid_lattice else Fraction(1, 2)
    lo, hi = Fraction(0), Fraction(1)
    for l in range(start, L + 1):
        p, q = bases[l - 1], bases[l]
        b = C * Fraction(p, q)
        nxt = _closest_component(lo, hi, lo + (hi - lo) * pick, p, b)
        if nxt is None:
            raise WitnessError(l, f"no component of {{p_l x}} <= {b} meets [{lo}, {hi}]")
        lo, hi = nxt
    theta = lo + (hi - lo) * pick
    if theta in (0, 1):
        raise WitnessError(L, "refinement collapsed onto lambda = 1")
    entries = tuple((l, abs(signed_frac(bases[l - 1] * theta)), C * Fraction(bases[l - 1], bases[l]))
                    for l in range(start, L + 1))
    degenerate = any(f == 0 for _, f, _ in entries)
    cert = WitnessCertificate(theta, C, entries, degenerate, (lo, hi))
    if not verify_witness(cert, bases):
        raise InvariantViolation("witness.exact", f"certificate for theta={theta} does not verify")
    return cert


def series_partial_sums(theta, seq: IndexedSequence, prec: int = DEFAULT_PREC) -> list:
    """Per-block partial sums of ``sum_l sum_{j in block l} |lambda^{n_j} - 1|^2``.

    Returns ``(label, block contribution, running total)`` triples.
    """
    if not seq.blocks:
        raise ValueError("sequence carries no block structure")
    out, acc = [], RealBall.exact(0, prec)
    for blk in seq.blocks:
        part = RealBall.exact(0, prec)
        for q in blk.multipliers:
            part = part + circle_dist(q * blk.base, theta, prec).square()
        acc = acc + part
        out.append((blk.label, part, acc))
    return out


# ---------------------------------------------------------------------------
# The slowly growing block family
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Prop7Sample:
    theta: Fraction
    partial_sum: RealBall                # p = 2 sum over the whole horizon
    block_sums: tuple                    # (l, sum_j {j theta p_l}^2, sum_j |lambda^{j p_l}-1|^2)
    growing: bool

    def to_json(self) -> dict:
        return {"theta": fraction_str(self.theta),
                "partial_sum": self.partial_sum.to_json(),
                "block_sums": [{"l": l, "frac_sq": fraction_str(f),
                                "dist_sq": d.to_json()} for l, f, d in self.block_sums],
                "growing": self.growing, "label": "heuristic"}


def prop7_negative_scan(seq: IndexedSequence, samples: Iterable, K: int | None = None,
                        tail: int | None = None, threshold=Fraction(1, 10),
                        prec: int = DEFAULT_PREC) -> list:
    """Per-sample block quantities for a block sequence.

    ``growing`` is a heuristic flag: the blocks in the last ``tail`` positions
    (default: the second half of the horizon) contribute on average at least
    ``threshold`` to the ``p = 2`` sum, i.e. the partial sums keep climbing at
    a linear rate there.
    """
    if not seq.blocks:
        raise ValueError("sequence carries no block structure")
    threshold = as_fraction(threshold)
    K = len(seq) if K is None else K
    blocks = [b for b in seq.blocks if b.end <= K]
    if not blocks:
        raise ValueError("horizon ends before the first block")
    tail = max(1, len(blocks) // 2) if tail is None else tail
    out = []
    for th in samples:
        th = as_fraction(th)
        if th % 1 == 0:
            raise ValueError("theta = 0 (lambda = 1) is excluded")
        rows, total = [], RealBall.exact(0, prec)
        for b in blocks:
            fsq = sum((signed_frac(j * th * b.base) ** 2 for j in b.multipliers), Fraction(0))
            dsq = RealBall.exact(0, prec)
            for j in b.multipliers:
                dsq = dsq + circle_dist(j * b.base, th, prec).square()
            total = total + dsq
            rows.append((b.label, fsq, dsq))
        last = rows[-tail:]
        mean = sum((d for _, _, d in last), RealBall.exact(0, prec)) / len(last)
        out.append(Prop7Sample(th, total, tuple(rows), mean.certainly_ge(threshold)))
    return out

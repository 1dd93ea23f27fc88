"""Generators and analyzers for strictly increasing integer sequences.

All terms are Python ints (exact, unbounded).  Indices exposed to callers are
1-based, matching the usual ``n_1, n_2, ...`` labelling.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import SequenceError
from .numeric import as_fraction

__all__ = [
    "Block",
    "IndexedSequence",
    "FactorChain",
    "erdos_taylor",
    "th1_sequence",
    "prop7_sequence",
    "prop7_default_rules",
    "block_sequence",
    "chain_sequence",
    "power_sequence",
    "pow2sq_sequence",
    "explicit_sequence",
    "ratio_series",
    "divisibility_profile",
    "factor_chain",
    "generate",
    "FAMILIES",
]


@dataclass(frozen=True)
class Block:
    """Terms ``q_0 p, q_1 p, ..., q_r p`` occupying indices ``start..end``."""

    label: int
    base: int
    multipliers: tuple
    start: int
    end: int

    @property
    def r(self) -> int:
        return len(self.multipliers) - 1

    @property
    def q_sum(self) -> int:
        return sum(self.multipliers)

    @property
    def top(self) -> int:
        return self.multipliers[-1] * self.base

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "base": str(self.base),
            "multipliers": [str(q) for q in self.multipliers],
            "start": self.start,
            "end": self.end,
        }

    @classmethod
    def from_json(cls, d: dict) -> "Block":
        return cls(int(d["label"]), int(d["base"]), tuple(int(q) for q in d["multipliers"]),
                   int(d["start"]), int(d["end"]))


@dataclass(frozen=True)
class IndexedSequence:
    terms: tuple
    family: str = "explicit"
    params: dict = field(default_factory=dict)
    blocks: tuple | None = None
    markers: dict | None = None
    bases: tuple | None = None

    def __post_init__(self):
        terms = tuple(int(t) for t in self.terms)
        object.__setattr__(self, "terms", terms)
        for k in range(1, len(terms)):
            if terms[k] <= terms[k - 1]:
                raise SequenceError(
                    f"sequence is not strictly increasing at index {k + 1}", k + 1)
        if self.blocks:
            expect = self.blocks[0].start
            for b in self.blocks:
                if b.start != expect or b.end - b.start != b.r:
                    raise SequenceError(f"blocks do not tile the index range at block {b.label}")
                if b.multipliers[0] != 1 or any(
                        x >= y for x, y in zip(b.multipliers, b.multipliers[1:])):
                    raise SequenceError(f"block {b.label}: multipliers must start at 1 and increase")
                for j, q in enumerate(b.multipliers):
                    if terms[b.start - 1 + j] != q * b.base:
                        raise SequenceError(f"block {b.label} disagrees with terms")
                expect = b.end + 1

    def __len__(self) -> int:
        return len(self.terms)

    def __getitem__(self, k: int) -> int:
        """1-based access: ``seq[1]`` is the first term."""
        if k < 1 or k > len(self.terms):
            raise IndexError(k)
        return self.terms[k - 1]

    def block(self, label: int) -> Block:
        for b in self.blocks or ():
            if b.label == label:
                return b
        raise KeyError(label)

    def to_json(self) -> dict:
        out = {"family": self.family, "params": self.params,
               "terms": [str(t) for t in self.terms]}
        if self.blocks is not None:
            out["blocks"] = [b.to_json() for b in self.blocks]
        if self.markers is not None:
            out["markers"] = [[int(l), int(m)] for l, m in sorted(self.markers.items())]
        if self.bases is not None:
            out["bases"] = [str(p) for p in self.bases]
        return out

    @classmethod
    def from_json(cls, d: dict) -> "IndexedSequence":
        blocks = d.get("blocks")
        markers = d.get("markers")
        bases = d.get("bases")
        return cls(
            tuple(int(t) for t in d["terms"]),
            d.get("family", "explicit"),
            d.get("params", {}),
            tuple(Block.from_json(b) for b in blocks) if blocks is not None else None,
            {int(l): int(m) for l, m in markers} if markers is not None else None,
            tuple(int(p) for p in bases) if bases is not None else None,
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def erdos_taylor(count: int) -> IndexedSequence:
    """``n_1 = 1``, ``n_{k+1} = k n_k + 1``."""
    if count < 1:
        raise ValueError("count must be >= 1")
    terms = [1]
    for k in range(1, count):
        terms.append(k * terms[-1] + 1)
    return IndexedSequence(tuple(terms), "erdos-taylor", {"count": count})


def power_sequence(base: int, count: int, offset: int = 0) -> IndexedSequence:
    """``base^k + offset`` for ``k = 1..count``."""
    terms = tuple(base ** k + offset for k in range(1, count + 1))
    return IndexedSequence(terms, "power", {"base": base, "count": count, "offset": offset})


def pow2sq_sequence(count: int) -> IndexedSequence:
    """``2^{k^2}`` for ``k = 1..count``."""
    return IndexedSequence(tuple(2 ** (k * k) for k in range(1, count + 1)),
                           "pow2sq", {"count": count})


def explicit_sequence(terms: Iterable[int]) -> IndexedSequence:
    terms = tuple(int(t) for t in terms)
    return IndexedSequence(terms, "explicit", {})


def _flatten_blocks(bases: Sequence[int], mults: Sequence[Sequence[int]], first_label: int):
    terms, blocks = [], []
    idx = 1
    for i, (p, qs) in enumerate(zip(bases, mults)):
        qs = tuple(int(q) for q in qs)
        blocks.append(Block(first_label + i, int(p), qs, idx, idx + len(qs) - 1))
        terms.extend(q * p for q in qs)
        idx += len(qs)
    return tuple(terms), tuple(blocks)


def block_sequence(p: Sequence[int], q: Sequence[Sequence[int]]) -> IndexedSequence:
    """Flatten ``{p_l, q_{1,l} p_l, ..., q_{r_l,l} p_l}`` over ``l = 1..len(p)``.

    Requires ``p_{l+1} > q_{r_l,l} p_l``; a violation raises
    :class:`SequenceError` carrying the offending ``l``.
    """
    p = [int(x) for x in p]
    q = [tuple(int(x) for x in qs) for qs in q]
    if len(p) != len(q):
        raise ValueError("need one multiplier list per base")
    for l, qs in enumerate(q, start=1):
        if not qs or qs[0] != 1 or any(a >= b for a, b in zip(qs, qs[1:])):
            raise SequenceError(f"multipliers of block {l} must start at 1 and increase", l)
    for l in range(1, len(p)):
        if p[l] <= q[l - 1][-1] * p[l - 1]:
            raise SequenceError(
                f"block overlap at l={l}: p_{l + 1}={p[l]} <= {q[l - 1][-1]}*{p[l - 1]}", l)
    terms, blocks = _flatten_blocks(p, q, 1)
    return IndexedSequence(terms, "block",
                           {"p": [str(x) for x in p], "q": [[str(x) for x in qs] for qs in q]},
                           blocks, None, tuple(p))


def th1_sequence(L: int) -> IndexedSequence:
    """Bases ``p_1 = 1``, ``p_{l+1} = l^2 (l^2 + 1)/2 * p_l`` and the blocks
    ``{p_l, 2 p_l, ..., l^2 p_l}`` for ``l = 2..L``.

    ``bases`` holds ``p_1..p_{L+1}``; ``markers[l]`` is the index of the last
    term of block ``l`` (with ``markers[1] = 0``).
    """
    if L < 2:
        raise ValueError("L must be >= 2")
    p = [1]
    for l in range(1, L + 1):
        p.append(l * l * (l * l + 1) // 2 * p[-1])
    bases = [p[l - 1] for l in range(2, L + 1)]
    mults = [tuple(range(1, l * l + 1)) for l in range(2, L + 1)]
    terms, blocks = _flatten_blocks(bases, mults, 2)
    markers = {1: 0}
    for b in blocks:
        markers[b.label] = b.end
    return IndexedSequence(terms, "th1", {"L": L}, blocks, markers, tuple(p))


def prop7_default_rules():
    """The shipped instance: ``gamma_l = 1/ceil(sqrt(l+1))`` and
    ``r_l = 2 + floor(log2(1 + floor(log2 l)))``.

    ``sum gamma_l^2`` diverges like the harmonic series and ``r_l`` grows
    like ``log log l``, so ``sum gamma_l^2 / r_l`` diverges as well.
    """
    def gamma(l: int) -> Fraction:
        # ceil(sqrt(l + 1)) == isqrt(l) + 1 for l >= 1
        return Fraction(1, math.isqrt(l) + 1)

    def r(l: int) -> int:
        # floor(log2 l) == l.bit_length() - 1
        return 1 + l.bit_length().bit_length()

    return gamma, r


def _rule(rule, name: str) -> Callable[[int], object]:
    if callable(rule):
        return rule
    table = list(rule)

    def lookup(l: int):
        if l > len(table):
            raise SequenceError(f"{name} table has no entry for l={l}", l)
        return table[l - 1]
    return lookup


def prop7_sequence(gamma, r, L: int) -> IndexedSequence:
    """``p_1 = 1``, ``p_{l+1} = [r_l^2/gamma_l] p_l + 1`` with blocks
    ``{p_l, 2 p_l, ..., r_l p_l}`` for ``l = 1..L``.

    ``gamma`` and ``r`` are callables of ``l`` or 1-based tables.  ``gamma_l``
    must be an exact rational; floats are rejected because the integer part
    ``[r^2/gamma]`` must be computed exactly.
    """
    g_of, r_of = _rule(gamma, "gamma"), _rule(r, "r")
    p = [1]
    gammas, rs = [], []
    for l in range(1, L + 1):
        g = g_of(l)
        if isinstance(g, float):
            raise SequenceError(f"gamma_{l} given as a float; use an exact rational", l)
        g = as_fraction(g)
        rl = r_of(l)
        if isinstance(rl, float) or int(rl) != rl:
            raise SequenceError(f"r_{l} must be an integer", l)
        rl = int(rl)
        if g <= 0 or (l >= 2 and g >= 1):
            raise SequenceError(f"gamma_{l} = {g} is outside the admissible range", l)
        if rl < 2:
            raise SequenceError(f"r_{l} = {rl} must be >= 2", l)
        nxt = math.floor(Fraction(rl * rl) / g) * p[-1] + 1
        if nxt <= rl * p[-1]:
            raise SequenceError(f"p_{l + 1} <= r_{l} p_{l}", l)
        gammas.append(g)
        rs.append(rl)
        p.append(nxt)
    mults = [tuple(range(1, rl + 1)) for rl in rs]
    terms, blocks = _flatten_blocks(p[:L], mults, 1)
    params = {"L": L, "gamma": [f"{g.numerator}/{g.denominator}" for g in gammas], "r": rs}
    return IndexedSequence(terms, "prop7", params, blocks, None, tuple(p))


# ---------------------------------------------------------------------------
# Analyzers
# ---------------------------------------------------------------------------

def chain_sequence(L: int, r: int = 2, s: int = 2, jump: int = 16) -> IndexedSequence:
    """Blocks ``p_l, s p_l, ..., s^r p_l`` joined by non-dividing jumps
    ``p_{l+1} = s^r p_l * jump^(l+1) + 1``.

    Consecutive terms divide each other except at block ends, and the jump
    ratios are square-summable.
    """
    if L < 1 or r < 0 or s < 2 or jump < 2:
        raise ValueError("need L >= 1, r >= 0, s >= 2, jump >= 2")
    p = [1]
    for l in range(1, L):
        p.append(s ** r * p[-1] * jump ** (l + 1) + 1)
    mults = [tuple(s ** j for j in range(r + 1)) for _ in p]
    terms, blocks = _flatten_blocks(p, mults, 1)
    return IndexedSequence(terms, "chain", {"L": L, "r": r, "s": s, "jump": jump},
                           blocks, None, tuple(p))


def ratio_series(seq: IndexedSequence, exponent: int, K: int,
                 S: Iterable[int] | None = None) -> list:
    """Exact partial sums ``sum_{k <= K', k in S} (n_k/n_{k+1})^exponent`` for ``K' = 1..K``."""
    if K >= len(seq):
        raise ValueError(f"K={K} needs n_(K+1); sequence has {len(seq)} terms")
    keep = None if S is None else set(S)
    acc = Fraction(0)
    out = []
    for k in range(1, K + 1):
        if keep is None or k in keep:
            acc += Fraction(seq[k], seq[k + 1]) ** exponent
        out.append(acc)
    return out


def divisibility_profile(seq: IndexedSequence) -> list:
    """Indices ``k`` with ``n_k`` not dividing ``n_{k+1}``."""
    return [k for k in range(1, len(seq)) if seq[k + 1] % seq[k]]


@dataclass(frozen=True)
class FactorChain:
    S: tuple
    bases: tuple                 # p_l
    s_values: tuple              # per block (s_0=1, s_1, ..., s_r)
    q_values: tuple              # per block (q_0=1, q_1, ..., q_r)
    q_sums: tuple                # q_l
    starts: tuple                # 1-based index where block l begins
    prefix_certificate: bool = True

    def bound_holds(self) -> list:
        """``q_l <= 2 q_{r_l,l}`` per block."""
        return [ql <= 2 * qs[-1] for ql, qs in zip(self.q_sums, self.q_values)]

    def reconstruct(self) -> list:
        out = []
        for p, ss in zip(self.bases, self.s_values):
            acc = p
            for s in ss:
                acc *= s
                out.append(acc)
        return out

    def to_sequence(self) -> IndexedSequence:
        """The same terms viewed as a block sequence with bases ``p_l``."""
        return block_sequence(self.bases, self.q_values)


def factor_chain(seq: IndexedSequence, S: Iterable[int]) -> FactorChain:
    """Split ``seq`` into blocks that end at each index of ``S``.

    Inside a block consecutive terms must divide each other; a violation
    raises :class:`SequenceError` naming the index.  The final block runs to
    the end of the available terms (a finite-horizon prefix).
    """
    S = tuple(sorted(set(int(k) for k in S)))
    cuts = set(S)
    bases, s_values, q_values, starts = [], [], [], []
    cur_s: list = []
    for k in range(1, len(seq) + 1):
        if k == 1 or (k - 1) in cuts:
            if cur_s:
                s_values.append(tuple(cur_s))
            bases.append(seq[k])
            starts.append(k)
            cur_s = [1]
            continue
        prev, here = seq[k - 1], seq[k]
        if here % prev:
            raise SequenceError(
                f"n_{k - 1}={prev} does not divide n_{k}={here} but {k - 1} is not in S", k - 1)
        cur_s.append(here // prev)
    s_values.append(tuple(cur_s))
    for ss in s_values:
        qs, acc = [], 1
        for s in ss:
            acc *= s
            qs.append(acc)
        q_values.append(tuple(qs))
    return FactorChain(S, tuple(bases), tuple(s_values), tuple(q_values),
                       tuple(sum(q) for q in q_values), tuple(starts))


# ---------------------------------------------------------------------------
# Named families (CLI entry point)
# ---------------------------------------------------------------------------

def _gen_prop7(params: dict, count: int | None) -> IndexedSequence:
    L = int(params.get("L", count or 6))
    if "gamma" in params:
        gamma = [as_fraction(g) if not isinstance(g, float) else g for g in params["gamma"]]
        r = [int(x) for x in params["r"]]
        return prop7_sequence(gamma, r, L)
    g, r = prop7_default_rules()
    return prop7_sequence(g, r, L)


FAMILIES = {
    "erdos-taylor": lambda params, count: erdos_taylor(int(params.get("count", count or 10))),
    "th1": lambda params, count: th1_sequence(int(params.get("L", count or 3))),
    "prop7": _gen_prop7,
    "block": lambda params, count: block_sequence([int(x) for x in params["p"]],
                                                  [[int(x) for x in qs] for qs in params["q"]]),
    "pow2sq": lambda params, count: pow2sq_sequence(int(params.get("count", count or 12))),
    "power": lambda params, count: power_sequence(int(params.get("base", 2)),
                                                  int(params.get("count", count or 10)),
                                                  int(params.get("offset", 0))),
    "chain": lambda params, count: chain_sequence(int(params.get("L", count or 5)),
                                                  int(params.get("r", 2)), int(params.get("s", 2)),
                                                  int(params.get("jump", 16))),
    "explicit": lambda params, count: explicit_sequence(int(x) for x in params["terms"]),
}


def generate(family: str, params: dict | None = None, count: int | None = None) -> IndexedSequence:
    try:
        gen = FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}") from None
    return gen(params or {}, count)

"""Named, deterministic experiments.

Each experiment takes a flat parameter dict, runs the relevant checks and
returns a report.  ``run_experiment`` writes ``<name>.json``, one CSV per
table and a PNG figure; identical configs give byte-identical files.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from pathlib import Path
from typing import Callable

from .. import groups, ipcheck, kernels, oracle, riesz, sequences
from ..errors import RieszIPError
from ..numeric import (DEFAULT_PREC, RealBall, ball_decimal_pair, circle_constant,
                       circle_constant_lower_rational, circle_dist, fraction_str)
from ..reporting import COEFF_HEADER, coefficient_rows, plain, write_csv, write_json

__all__ = ["ExperimentConfig", "RunResult", "EXPERIMENTS", "run_experiment", "parse_params"]


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    params: dict = field(default_factory=dict)
    out: str = "out"
    precision: int = DEFAULT_PREC
    seed: int = 0


@dataclass
class Outcome:
    results: dict
    checks: list = field(default_factory=list)        # [claim, passed, detail]
    tables: dict = field(default_factory=dict)        # name -> (header, rows)
    series: dict = field(default_factory=dict)        # kind -> (header, rows)
    figure: str | None = None                         # series kind to plot

    def check(self, claim: str, passed: bool, detail="") -> bool:
        self.checks.append([claim, bool(passed), detail])
        return bool(passed)


@dataclass(frozen=True)
class RunResult:
    passed: bool
    report: Path
    files: tuple
    failed: tuple


def _ints(s) -> list:
    if isinstance(s, (list, tuple)):
        return [int(x) for x in s]
    return [int(x) for x in str(s).split(",") if x.strip()]


def _ball_str(b: RealBall) -> tuple:
    return ball_decimal_pair(b, 30)


def _sample_angles(rng: random.Random, count: int, qmax: int = 50) -> list:
    out = []
    while len(out) < count:
        q = rng.randint(3, qmax)
        a = rng.randint(1, q - 1)
        th = Fraction(a, q)
        if th not in out:
            out.append(th)
    return out


# ---------------------------------------------------------------------------

def _prop3_demo(p: dict, prec: int, rng) -> Outcome:
    terms, orders = _ints(p["terms"]), _ints(p["orders"])
    caps = tuple(1 for _ in orders) if all(m >= 2 for m in orders) else None
    spec = riesz.RieszSpec(tuple(terms), tuple(orders), caps)
    out = Outcome({"spec": spec})
    cert = riesz.check_dissociation(spec)
    out.results["certificate"] = cert
    out.check("riesz.dissociation", True, [str(l) for l in cert.lengths])

    ok = all(kernels.fejer_coeff(m, 0, prec).contains(1) for m in orders)
    mass = [oracle.quadrature_coeff(lambda t, pr, m=m: kernels.fejer_eval(m, t, pr), 0,
                                    bandwidth=m, prec=prec) for m in orders]
    out.check("kernel.normalization", ok and all(x.contains(1) for x in mass))

    spectrum = oracle.expand_product(spec, prec=prec)
    table = {n: riesz.riesz_coeff(n, spec, prec) for n in spectrum.frequencies()}
    cmp = oracle.compare(spectrum, table, Fraction(1, 10 ** 12))
    out.results["oracle"] = cmp
    out.check("riesz.oracle-agreement", cmp.passed, float(cmp.max_mid_diff))

    zero_ok = True
    for lo, hi in riesz.gap_intervals(spec):
        if hi - lo > 10 ** 6:
            continue
        zero_ok &= not any(n in spectrum and not spectrum[n].contains(0) for n in range(lo + 1, hi))
    out.check("riesz.gap-zeros", zero_ok)

    labels = list(spec.labels)
    unit_ok = True
    for r in range(1, len(labels) + 1):
        for F in combinations(labels, r):
            n = sum(spec.n(k) for k in F)
            unit_ok &= riesz.riesz_coeff(n, spec, prec).overlaps(riesz.unit_digit_product(F, spec, prec))
    out.check("riesz.unit-digit-product", unit_ok)

    if caps is not None:
        bound_ok = True
        for js in product(*(range(-c, c + 1) for c in caps)):
            n = sum(j * spec.n(k) for j, k in zip(js, labels))
            F = [k for j, k in zip(js, labels) if j]
            lb = riesz.coeff_lower_bound(F, spec, prec)
            bound_ok &= not lb.certainly_gt(riesz.riesz_coeff(n, spec, prec))
        out.check("riesz.product-lower-bound", bound_ok)

    freqs = [n for n in spectrum.frequencies() if n >= 0]
    rows = coefficient_rows(spec, freqs, prec)
    out.tables["coefficients"] = (COEFF_HEADER, rows)
    out.series["coefficients"] = (["n", "value"], [[r[0], r[1]] for r in rows])
    out.figure = "coefficients"
    return out


def _cor4(p: dict, prec: int, rng) -> Outcome:
    seq = sequences.generate(p["family"], {}, int(p["count"]))
    spec = riesz.choose_m_sequence(seq, prec=prec)
    cert = riesz.check_dissociation(spec)
    out = Outcome({"sequence": seq.family, "count": len(seq), "spec": spec, "certificate": cert})
    out.check("riesz.dissociation", True)
    out.check("riesz.gap-growth-prefix", cert.increasing)
    last = spec.labels[-1]
    k0, width = int(p["k0"]), int(p["width"])
    if k0 < spec.start or k0 > last:
        raise RieszIPError(f"k0={k0} is outside the factor range {spec.start}..{last}")
    rows, reports = [], []
    for k in range(spec.start, last + 1):
        w = min(width, last - k + 1)
        rep = ipcheck.ip_window_deviation(spec, seq, k, w, prec=prec)
        reports.append(rep)
        rows.append([k, w, *_ball_str(rep.deviation), _ball_str(rep.floor_unit)[0],
                     " ".join(map(str, rep.worst_subset))])
    main = next(r for r in reports if r.k0 == k0)
    out.results["window"] = main
    full = tuple(range(k0, k0 + main.w))
    out.check("ip.window-floor-equality",
              main.deviation.overlaps(main.floor_unit) and main.worst_subset == full,
              {"k0": k0, "w": main.w})
    mono = all(not b.deviation.certainly_gt(a.deviation) for a, b in zip(reports, reports[1:]))
    out.check("ip.window-monotone", mono)
    header = ["k0", "w", "deviation", "radius", "floor", "worst_subset"]
    out.tables["windows"] = (header, rows)
    out.series["deviation-vs-k0"] = (["k0", "deviation"], [[r[0], r[2]] for r in rows])
    out.figure = "deviation-vs-k0"
    return out


def _prop5(p: dict, prec: int, rng) -> Outcome:
    L, mults, growth = int(p["L"]), tuple(_ints(p["mults"])), int(p["growth"])
    bases = [1]
    for l in range(1, L):
        bases.append(bases[-1] * growth ** (l + 1))
    seq = sequences.block_sequence(bases, [mults] * L)
    target = Fraction(p["target"])
    spec = riesz.block_riesz_spec(seq, target=target, prec=prec)
    bound = riesz.coeff_lower_bound(spec.labels, spec, prec)
    out = Outcome({"bases": [str(b) for b in bases], "spec": spec, "bound": bound})
    out.check("blocks.caps", all(q <= kernels.max_cap(m) for q, m in zip(spec.caps, spec.orders)))
    out.check("blocks.certified-bound", bound.certainly_ge(target), float(bound))
    # exhaustive check over the last three factors
    labels = list(spec.labels)[-3:]
    digit_sets = {}
    for k in labels:
        blk = seq.block(k)
        sums = set()
        for r in range(1, len(blk.multipliers) + 1):
            for G in combinations(blk.multipliers, r):
                sums.add(sum(G))
        digit_sets[k] = sorted(sums)
    ok, rows = True, []
    for choice in product(*([0] + digit_sets[k] for k in labels)):
        F = [k for k, d in zip(labels, choice) if d]
        if not F:
            continue
        n = sum(d * spec.n(k) for k, d in zip(labels, choice))
        c = riesz.riesz_coeff(n, spec, prec)
        lb = riesz.coeff_lower_bound(F, spec, prec)
        ok &= not lb.certainly_gt(c)
        rows.append([str(n), " ".join(f"{k}:{d}" for k, d in zip(labels, choice) if d),
                     _ball_str(c)[0], _ball_str(lb)[0]])
    out.check("blocks.subset-sum-bound", ok, len(rows))
    out.tables["block_sums"] = (["n", "digits", "coefficient", "lower_bound"], rows)
    out.series["coefficients"] = (["n", "value"], [[r[0], r[2]] for r in rows])
    out.figure = "coefficients"
    return out


def _thm_cor6(p: dict, prec: int, rng) -> Outcome:
    seq = sequences.chain_sequence(int(p["L"]), int(p["r"]), int(p["s"]), int(p["jump"]))
    S = sequences.divisibility_profile(seq)
    chain = sequences.factor_chain(seq, S)
    out = Outcome({"S": S, "q_sums": [str(q) for q in chain.q_sums]})
    out.check("chain.reconstruction", chain.reconstruct() == list(seq.terms))
    out.check("chain.q-bound", all(chain.bound_holds()))
    # termwise: q_l p_l / p_{l+1} <= 2 n_k / n_{k+1} with k the index ending block l
    ends = [s for s in S]
    lhs_terms, rhs_terms = [], []
    for l in range(len(chain.bases) - 1):
        k = ends[l]
        lhs_terms.append(Fraction(chain.q_sums[l] * chain.bases[l], chain.bases[l + 1]))
        rhs_terms.append(2 * Fraction(seq[k], seq[k + 1]))
    out.check("chain.ratio-comparison", all(a <= b for a, b in zip(lhs_terms, rhs_terms)))
    lhs = sum(x * x for x in lhs_terms)
    rhs = sequences.ratio_series(seq, 2, len(seq) - 1, S)[-1]
    out.results["block_ratio_sum"] = float(lhs)
    out.results["S_ratio_sum"] = float(rhs)
    out.check("chain.series-bound", lhs <= 4 * rhs)
    spec = riesz.block_riesz_spec(chain.to_sequence(), prec=prec)
    bound = riesz.coeff_lower_bound(spec.labels, spec, prec)
    out.results["spec"] = spec
    out.results["bound"] = bound
    out.check("chain.certified-bound", bound.certainly_gt(0), float(bound))
    rows = [[l + 1, fraction_str(a * a), fraction_str(b * b)]
            for l, (a, b) in enumerate(zip(lhs_terms, rhs_terms))]
    out.tables["ratios"] = (["l", "block_ratio_sq", "twice_S_ratio_sq"], rows)
    acc, ser = Fraction(0), []
    for l, a in enumerate(lhs_terms, start=1):
        acc += a * a
        ser.append([l, float(acc)])
    out.series["partial-sums"] = (["l", "partial_sum"], ser)
    out.figure = "partial-sums"
    return out


def _prop7(p: dict, prec: int, rng) -> Outcome:
    g, r = sequences.prop7_default_rules()
    seq = sequences.prop7_sequence(g, r, int(p["L"]))
    samples = _sample_angles(rng, int(p["samples"]))
    scan = groups.prop7_negative_scan(seq, samples, prec=prec)
    out = Outcome({"bases": [str(b) for b in seq.bases], "samples": scan,
                   "label": "heuristic"})
    out.check("prop7.block-growth", all(seq.bases[l] > seq.blocks[l - 1].top
                                        for l in range(1, len(seq.blocks))))
    growing = sum(s.growing for s in scan)
    out.check("prop7.growing-samples", growing >= int(p["min_growing"]),
              {"growing": growing, "samples": len(scan), "label": "heuristic"})
    rows = []
    for s in scan:
        acc = RealBall.exact(0, prec)
        for l, _, d in s.block_sums:
            acc = acc + d
            rows.append([fraction_str(s.theta), l, _ball_str(acc)[0]])
    out.tables["block_sums"] = (["theta", "l", "partial_sum"], rows)
    out.series["partial-sums"] = (["theta", "l", "partial_sum"], rows)
    out.figure = "partial-sums"
    return out


def _thm_th1(p: dict, prec: int, rng) -> Outcome:
    depth = int(p["depth"])
    seq = sequences.th1_sequence(depth + 1)
    C = circle_constant_lower_rational()
    mid = groups.witness_search(seq.bases, C, depth, start=2)
    gen = groups.witness_search(seq.bases, C, depth, start=2, avoid_lattice=True)
    out = Outcome({"C": C, "midpoint_witness": mid, "witness": gen})
    out.check("witness.exact", groups.verify_witness(mid, seq.bases)
              and groups.verify_witness(gen, seq.bases))
    out.check("witness.non-degenerate", not gen.degenerate)
    two_pi = circle_constant(prec)
    dist_ok, rows = True, []
    for l, f, b in gen.entries:
        d = circle_dist(seq.bases[l - 1], gen.theta, prec)
        dist_ok &= not d.certainly_gt(two_pi * b)
        rows.append([l, str(seq.bases[l - 1]), fraction_str(f), fraction_str(b), _ball_str(d)[0]])
    out.check("witness.circle-bound", dist_ok)
    out.tables["witness"] = (["l", "p_l", "frac", "bound", "dist"], rows)
    partial = groups.series_partial_sums(gen.theta, sequences.th1_sequence(depth))
    out.results["series"] = [[l, a, b] for l, a, b in partial]
    out.series["partial-sums"] = (["l", "partial_sum"], [[l, _ball_str(b)[0]] for l, _, b in partial])
    out.figure = "partial-sums"
    return out


def _block_sumsets(p: dict, prec: int, rng) -> Outcome:
    cert = ipcheck.verify_lemma1(int(p["l"]), int(p["q"]))
    out = Outcome({"certificate": cert})
    out.check("sumset.exact", cert.exact)
    out.check("sumset.display-contained", cert.display_prefix)
    out.series["sumset"] = (["l", "q", "count"], [[cert.l, cert.q, cert.count]])
    return out


def _kahane(p: dict, prec: int, rng) -> Outcome:
    jmax, grid = int(p["jmax"]), int(p["grid"])
    phi = kernels.kahane_phi_function()
    a = kernels.kahane_normalizer()
    bound = kernels.derive_phi_bound()
    out = Outcome({"a": a, "pieces": [{"lo": pc.lo, "hi": pc.hi, "coefficients": list(pc.poly)}
                                      for pc in phi.pieces],
                   "c": bound.c, "gamma": bound.gamma, "j0": bound.j0})
    out.check("phi.normalizer", a == 9, fraction_str(a))
    out.check("phi.value-at-sixth", kernels.kahane_phi(Fraction(1, 6)) == Fraction(1, 4))
    out.check("phi.support", kernels.kahane_phi(Fraction(1, 3)) == 0 and kernels.kahane_phi(0) == 1)
    out.check("kahane.degree", all(kernels.KahanePoly(j).degree <= j // 3 for j in range(1, jmax + 1)))
    minima = []
    for j in sorted({j for j in (2, 7, 30, jmax) if j <= jmax}):
        rep = kernels.kahane_nonneg_check(j, max(grid, 4 * j), prec)
        minima.append([j, rep.grid, _ball_str(rep.minimum)[0], fraction_str(rep.argmin)])
    out.check("kahane.nonnegative", True, len(minima))
    out.tables["nonneg_minima"] = (["j", "grid", "minimum", "argmin"], minima)
    scan = [[j, fraction_str(kernels.kahane_phi(Fraction(1, j))), fraction_str(1 - bound.c / (j * j))]
            for j in range(bound.j0, jmax + 1)]
    out.check("kahane.first-coefficient-bound", all(bound.holds_for_index(j)
                                                    for j in range(bound.j0, jmax + 1)))
    out.tables["first_coefficient"] = (["j", "phi_1_over_j", "one_minus_c_over_j2"], scan)
    xs = [Fraction(s, 48) for s in range(0, 17)]
    ptab = [[fraction_str(x), fraction_str(phi(x))] for x in xs]
    out.tables["phi"] = (["x", "phi"], ptab)
    out.series["phi-table"] = (["x", "phi"], [[float(x), float(phi(x))] for x in xs])
    out.figure = "phi-table"
    return out


def _dyadic_blocks(p: dict, prec: int, rng) -> Outcome:
    qmax = int(p["qmax"])
    s62 = ipcheck.section62_sequence(qmax)
    samples = _sample_angles(rng, int(p["samples"]), 200)
    scan = ipcheck.section62_ginf_scan(samples, qmax, prec)
    out = Outcome({"blocks": {q: [str(n) for n in v] for q, v in s62.blocks.items()},
                   "scan": scan})
    out.check("sumset.first-block", s62.blocks[1] == [5, 16, 21])
    out.check("sumset.blocks-increasing", list(s62.sequence.terms) == sorted(s62.sequence.terms))
    out.check("additivity.no-violation", True, sum(r.pairs_in_hypothesis for r in scan))
    rows = [[fraction_str(r.theta), q, fraction_str(v)] for r in scan for q, v in r.block_frac_sums]
    out.tables["block_frac_sums"] = (["theta", "q", "frac_sum"], rows)
    out.series["block-frac-sums"] = (["theta", "q", "frac_sum"], rows)
    return out


EXPERIMENTS: dict[str, tuple[Callable, dict]] = {
    "prop3-demo": (_prop3_demo, {"terms": "1,10,100,1000", "orders": "2,2,3,3"}),
    "cor4": (_cor4, {"family": "pow2sq", "count": 12, "k0": 6, "width": 8}),
    "prop5": (_prop5, {"L": 8, "mults": "1,2", "growth": 10, "target": "9/10"}),
    "thm-cor6": (_thm_cor6, {"L": 6, "r": 2, "s": 2, "jump": 16}),
    "prop7": (_prop7, {"L": 10, "samples": 5, "min_growing": 4}),
    "thm-th1": (_thm_th1, {"depth": 5}),
    "lemma1": (_block_sumsets, {"l": 2, "q": 1}),
    "kahane-61": (_kahane, {"jmax": 50, "grid": 256}),
    "section-62": (_dyadic_blocks, {"qmax": 2, "samples": 10}),
}


def parse_params(name: str, given: dict) -> dict:
    if name not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {name!r}; choose from {sorted(EXPERIMENTS)}")
    defaults = EXPERIMENTS[name][1]
    unknown = set(given) - set(defaults)
    if unknown:
        raise ValueError(f"unknown parameters for {name}: {sorted(unknown)}")
    out = dict(defaults)
    for k, v in given.items():
        out[k] = type(defaults[k])(v)
    return out


def run_experiment(config: ExperimentConfig) -> RunResult:
    """Run one experiment and write its report, tables and figure under ``config.out``."""
    from .plotting import render_figure

    params = parse_params(config.name, config.params)
    fn = EXPERIMENTS[config.name][0]
    rng = random.Random(config.seed)
    outdir = Path(config.out)
    stem = config.name.replace("-", "_")
    report = {"experiment": config.name, "params": params, "precision": config.precision,
              "seed": config.seed}
    files = []
    try:
        res = fn(params, config.precision, rng)
    except RieszIPError as exc:
        check = getattr(exc, "check", type(exc).__name__)
        report.update({"passed": False, "error": {"check": check, "message": str(exc)},
                       "checks": [{"claim": check, "passed": False, "detail": str(exc)}]})
        path = write_json(outdir / f"{stem}.json", report)
        return RunResult(False, path, (path,), (check,))
    report["results"] = plain(res.results)
    report["checks"] = [{"claim": c, "passed": ok, "detail": plain(d)} for c, ok, d in res.checks]
    report["passed"] = all(ok for _, ok, _ in res.checks)
    report["series"] = {k: {"header": h, "rows": plain(rows)} for k, (h, rows) in res.series.items()}
    for name, (header, rows) in sorted(res.tables.items()):
        files.append(write_csv(outdir / f"{stem}_{name}.csv", header, rows))
    if res.figure:
        header, rows = res.series[res.figure]
        fig = outdir / f"{stem}.png"
        render_figure(header, rows, fig, config.name)
        files.append(fig)
    report["files"] = sorted(f.name for f in files)
    path = write_json(outdir / f"{stem}.json", report)
    failed = tuple(c for c, ok, _ in res.checks if not ok)
    return RunResult(not failed, path, (path, *files), failed)

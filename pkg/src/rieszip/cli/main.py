"""Command-line entry point."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .. import groups, ipcheck, kernels, oracle, riesz, sequences
from ..errors import RieszIPError
from ..numeric import (DEFAULT_PREC, RealBall, ball_decimal_pair, circle_constant_lower_rational,
                       fraction_str)
from ..reporting import COEFF_HEADER, coefficient_rows, csv_text, dumps
from .experiments import EXPERIMENTS, ExperimentConfig, run_experiment
from .plotting import PLOT_KINDS, emit_plotdata

__all__ = ["main", "build_parser"]


def _load_json(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _load_seq(path) -> sequences.IndexedSequence:
    return sequences.IndexedSequence.from_json(_load_json(path))


def _emit(text: str, out: str | None):
    if out:
        p = Path(out)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _parse_C(s: str) -> Fraction:
    return circle_constant_lower_rational() if s.lower() in ("2pi", "2*pi") else Fraction(s)


# -- subcommand handlers -----------------------------------------------------

def _cmd_seq(a):
    params = json.loads(a.params) if a.params else {}
    seq = sequences.generate(a.family, params, a.count)
    _emit(seq.dumps() + "\n", a.file)
    return 0


def _cmd_riesz(a):
    prec = a.precision
    if a.action == "choose":
        seq = _load_seq(a.seq)
        spec = (riesz.block_riesz_spec(seq, prec=prec) if a.blocks
                else riesz.choose_m_sequence(seq, prec=prec))
        _emit(dumps(spec), a.file)
        return 0
    spec = riesz.RieszSpec.from_json(_load_json(a.spec))
    if a.action == "certify":
        _emit(dumps(riesz.check_dissociation(spec)), a.file)
    elif a.action == "coeff":
        targets = [int(x) for x in _load_json(a.targets)] if a.targets else [0]
        _emit(csv_text(COEFF_HEADER, coefficient_rows(spec, targets, prec)), a.file)
    else:
        F = [int(x) for x in a.subset.split(",")] if a.subset else list(spec.labels)
        v, r = ball_decimal_pair(riesz.coeff_lower_bound(F, spec, prec))
        _emit(dumps({"subset": F, "bound": v, "radius": r}), a.file)
    return 0


def _cmd_kernel(a):
    prec = a.precision
    if a.action == "fejer":
        rows = [[p, *ball_decimal_pair(kernels.fejer_coeff(a.m, p, prec))]
                for p in range(-a.m, a.m + 1)]
        _emit(csv_text(["frequency", "value", "radius"], rows), a.file)
    elif a.action == "kahane":
        P = kernels.KahanePoly(a.j)
        rows = [[s, fraction_str(c)] for s, c in P.table().items()]
        _emit(csv_text(["frequency", "value"], rows), a.file)
    elif a.action == "nonneg":
        rep = kernels.kahane_nonneg_check(a.j, a.grid or 4 * a.j, prec)
        _emit(dumps({"j": a.j, "grid": rep.grid, "minimum": rep.minimum, "argmin": rep.argmin}),
              a.file)
    else:
        b = kernels.derive_phi_bound()
        _emit(dumps({"c": b.c, "gamma": b.gamma, "j0": b.j0, "taylor_c": b.taylor_c}), a.file)
    return 0


def _cmd_group(a):
    prec = a.precision
    if a.action == "scan":
        seq = _load_seq(a.seq)
        scan = groups.gp_partial_sums(Fraction(a.theta), seq, a.p, a.terms, prec)
        _emit(dumps(scan), a.file)
    elif a.action == "et":
        _emit(dumps(groups.et_divergence_check(Fraction(a.theta), a.terms, prec)), a.file)
    else:
        seq = _load_seq(a.seq)
        bases = list(seq.bases) if seq.bases else list(seq.terms)
        start = 2 if seq.family == "th1" else 1
        cert = groups.witness_search(bases, _parse_C(a.C), a.depth, start, a.avoid_lattice)
        _emit(dumps(cert), a.file)
    return 0


def _load_source(path: str, prec: int):
    p = Path(path)
    if p.suffix == ".csv":
        return oracle.SparseSpectrum.from_csv(p.read_text(encoding="utf-8"), prec).coeffs
    d = _load_json(p)
    if "atoms" in d:
        return ipcheck.AtomicMeasure.from_json(d)
    return riesz.RieszSpec.from_json(d)


def _cmd_ip(a):
    prec = a.precision
    if a.action == "check":
        seq = _load_seq(a.seq)
        src = _load_source(a.source, prec)
        if isinstance(src, ipcheck.AtomicMeasure):
            rep = ipcheck.atomic_ip_check(src, seq, a.k0, a.width, prec=prec)
        else:
            rep = ipcheck.ip_window_deviation(src, seq, a.k0, a.width, prec=prec)
        _emit(dumps(rep), a.file)
    elif a.action == "lemma1":
        _emit(dumps(ipcheck.verify_lemma1(a.l, a.q)), a.file)
    else:
        thetas = [Fraction(t) for t in a.theta.split(",")]
        _emit(dumps(ipcheck.section62_ginf_scan(thetas, a.qmax, prec)), a.file)
    return 0


def _cmd_oracle(a):
    prec = a.precision
    if a.action == "expand":
        spec = riesz.RieszSpec.from_json(_load_json(a.spec))
        _emit(oracle.expand_product(spec, a.factors, prec).to_csv(), a.file)
    else:
        x = oracle.SparseSpectrum.from_csv(Path(a.a).read_text(encoding="utf-8"), prec)
        y = oracle.SparseSpectrum.from_csv(Path(a.b).read_text(encoding="utf-8"), prec)
        rep = oracle.compare(x, y, Fraction(a.tol))
        _emit(dumps(rep), a.file)
        return 0 if rep.passed else 1
    return 0


def _kv_pairs(items: list) -> dict:
    out, i = {}, 0
    while i < len(items):
        key = items[i]
        if not key.startswith("--") or i + 1 >= len(items):
            raise ValueError(f"expected '--name value' pairs, got {items[i:]}")
        out[key[2:].replace("-", "_")] = items[i + 1]
        i += 2
    return out


def _cmd_run(a, extra):
    cfg = ExperimentConfig(a.experiment, _kv_pairs(extra), a.out, a.precision, a.seed)
    res = run_experiment(cfg)
    print(f"{a.experiment}: {'pass' if res.passed else 'FAIL'} -> {res.report}")
    for c in res.failed:
        print(f"  failed check: {c}", file=sys.stderr)
    return 0 if res.passed else 2


def _cmd_plotdata(a):
    _emit(emit_plotdata(a.report, a.kind), a.file)
    return 0


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    glob = argparse.ArgumentParser(add_help=False)
    glob.add_argument("--precision", type=int, default=argparse.SUPPRESS, help="working precision in bits")
    glob.add_argument("--out", default=argparse.SUPPRESS, help="output directory for run")
    glob.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="sampling seed")

    ap = argparse.ArgumentParser(prog="rieszip", description="Riesz products and IP-Dirichlet checks")
    ap.add_argument("--precision", type=int, default=DEFAULT_PREC)
    ap.add_argument("--out", default="out")
    ap.add_argument("--seed", type=int, default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("seq", parents=[glob], help="generate integer sequences")
    s.add_argument("action", choices=["gen"])
    s.add_argument("--family", required=True, choices=sorted(sequences.FAMILIES))
    s.add_argument("--params", default="")
    s.add_argument("--count", type=int)
    s.add_argument("--file", help="write here instead of stdout")

    s = sub.add_parser("riesz", parents=[glob], help="Riesz product specs and coefficients")
    s.add_argument("action", choices=["certify", "coeff", "bound", "choose"])
    s.add_argument("--spec")
    s.add_argument("--seq")
    s.add_argument("--blocks", action="store_true", help="choose orders over block bases")
    s.add_argument("--targets")
    s.add_argument("--subset", help="comma-separated factor labels for bound")
    s.add_argument("--file")

    s = sub.add_parser("kernel", parents=[glob], help="kernel tables and checks")
    s.add_argument("action", choices=["fejer", "kahane", "nonneg", "phi-bound"])
    s.add_argument("--m", type=int, default=1)
    s.add_argument("--j", type=int, default=7)
    s.add_argument("--grid", type=int)
    s.add_argument("--file")

    s = sub.add_parser("group", parents=[glob], help="G_p scans and witnesses")
    s.add_argument("action", choices=["scan", "et", "witness"])
    s.add_argument("--theta", default="1/2")
    s.add_argument("--seq")
    s.add_argument("--p", default="2")
    s.add_argument("--terms", type=int, default=30)
    s.add_argument("--C", default="2pi")
    s.add_argument("--depth", type=int, default=5)
    s.add_argument("--avoid-lattice", action="store_true")
    s.add_argument("--file")

    s = sub.add_parser("ip", parents=[glob], help="subset-sum window checks")
    s.add_argument("action", choices=["check", "lemma1", "section62"])
    s.add_argument("--source")
    s.add_argument("--seq")
    s.add_argument("--k0", type=int, default=1)
    s.add_argument("--width", type=int, default=6)
    s.add_argument("--l", type=int, default=2)
    s.add_argument("--q", type=int, default=0)
    s.add_argument("--qmax", type=int, default=2)
    s.add_argument("--theta", default="1/2")
    s.add_argument("--file")

    s = sub.add_parser("oracle", parents=[glob], help="brute-force expansions")
    s.add_argument("action", choices=["expand", "compare"])
    s.add_argument("--spec")
    s.add_argument("--factors", type=int)
    s.add_argument("--a")
    s.add_argument("--b")
    s.add_argument("--tol", default="1e-12")
    s.add_argument("--file")

    s = sub.add_parser("run", parents=[glob], help="run a named experiment")
    s.add_argument("experiment", choices=sorted(EXPERIMENTS))

    s = sub.add_parser("plotdata", parents=[glob], help="extract a CSV series from a report")
    s.add_argument("--report", required=True)
    s.add_argument("--kind", required=True, choices=PLOT_KINDS)
    s.add_argument("--file")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args, extra = ap.parse_known_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args, extra)
        if extra:
            ap.error(f"unrecognized arguments: {' '.join(extra)}")
        handler = {"seq": _cmd_seq, "riesz": _cmd_riesz, "kernel": _cmd_kernel,
                   "group": _cmd_group, "ip": _cmd_ip, "oracle": _cmd_oracle,
                   "plotdata": _cmd_plotdata}[args.command]
        return handler(args)
    except RieszIPError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

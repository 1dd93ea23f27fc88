"""Deterministic JSON and CSV output."""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .numeric import ComplexBall, RealBall, ball_decimal_pair, fraction_str
from .riesz import RieszSpec, decompose, riesz_coeff

__all__ = ["plain", "dumps", "write_json", "csv_text", "write_csv", "coefficient_rows",
           "COEFF_HEADER"]

COEFF_HEADER = ["n", "value", "radius", "digits"]


def plain(obj):
    """Convert nested results into JSON-ready values (balls keep their exact hex form)."""
    if hasattr(obj, "to_json"):
        return plain(obj.to_json())
    if isinstance(obj, RealBall):
        return obj.to_json()
    if isinstance(obj, ComplexBall):
        return {"re": obj.re.to_json(), "im": obj.im.to_json()}
    if isinstance(obj, Fraction):
        return fraction_str(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        # keep JSON numbers within double range so readers never round them
        return obj if abs(obj) < 2 ** 53 else str(obj)
    if isinstance(obj, float):
        return obj
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, range)):
        return [plain(v) for v in obj]
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(plain(obj), indent=2, sort_keys=True) + "\n"


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj), encoding="utf-8")
    return path


def csv_text(header: list, rows: Iterable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def write_csv(path, header: list, rows: Iterable) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(csv_text(header, rows), encoding="utf-8")
    return path


def coefficient_rows(spec: RieszSpec, targets: Iterable[int], prec: int) -> list:
    """Rows ``n, value, radius, digits`` for the coefficient CSV."""
    rows = []
    for n in targets:
        c = riesz_coeff(n, spec, prec)
        d = decompose(n, spec)
        value, radius = ball_decimal_pair(c)
        rows.append([str(n), value, radius, "none" if d is None else d.digits_str()])
    return rows

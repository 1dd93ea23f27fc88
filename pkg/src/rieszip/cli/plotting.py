"""Plot-data extraction and static figures."""

from __future__ import annotations

import json
from pathlib import Path

from ..reporting import csv_text

__all__ = ["emit_plotdata", "render_figure", "PLOT_KINDS"]

PLOT_KINDS = ("coefficients", "deviation-vs-k0", "partial-sums", "phi-table",
              "block-frac-sums", "sumset")


def emit_plotdata(report, kind: str) -> str:
    """CSV text for one series of a report (a dict or a path to its JSON)."""
    if kind not in PLOT_KINDS:
        raise ValueError(f"unknown plot kind {kind!r}; choose from {list(PLOT_KINDS)}")
    if not isinstance(report, dict):
        report = json.loads(Path(report).read_text(encoding="utf-8"))
    series = report.get("series", {})
    if kind not in series:
        raise ValueError(f"report {report.get('experiment')!r} has no {kind!r} series")
    s = series[kind]
    return csv_text(s["header"], s["rows"])


def render_figure(header: list, rows: list, path, title: str) -> Path:
    """Plot the last column against the second-to-last, one line per leading key
    when there are three columns."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4), dpi=100)
    if len(header) >= 3:
        groups: dict = {}
        for r in rows:
            groups.setdefault(str(r[0]), []).append((float(r[-2]), float(r[-1])))
        for key, pts in groups.items():
            ax.plot([x for x, _ in pts], [y for _, y in pts], marker="o", label=key)
        ax.legend(title=header[0], fontsize=7)
    else:
        xs = [float(r[0]) for r in rows]
        ys = [float(r[-1]) for r in rows]
        ax.plot(xs, ys, marker="o", linestyle="-" if len(xs) < 200 else "none", markersize=3)
    ax.set_xlabel(header[-2] if len(header) >= 3 else header[0])
    ax.set_ylabel(header[-1])
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="png", metadata={"Software": None})
    plt.close(fig)
    return path

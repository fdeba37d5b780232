"""Machine-readable reports (JSON, CSV) and the rendered summary figures.

Reports are byte-reproducible: floats are canonicalized through a 17
significant digit round-trip, keys are sorted, and no timestamps are
embedded.  Every report carries the fully resolved configuration that
produced it.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from pathlib import Path

import numpy as np


def canonical_float(x: float) -> float:
    """Round-trip through 17 significant digits (lossless for doubles)."""
    if isinstance(x, float) and math.isfinite(x):
        return float(f"{x:.17g}")
    return x


def to_jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(dataclasses.asdict(obj))
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return canonical_float(x) if math.isfinite(x) else str(x)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def dump_json(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n"


def write_json(path: str | Path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_json(obj), encoding="utf-8")
    return path


def format_cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def dump_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(v) for v in row])
    return buf.getvalue()


def write_csv(path: str | Path, header: list[str], rows: list[list]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_csv(header, rows), encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# figures


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def bound_fit_figure(reports: list[dict], path: str | Path) -> Path:
    """Bar chart of fitted constants with the stability ratios annotated."""
    plt = _pyplot()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = [r["name"] for r in reports]
    consts = [r["constant"] for r in reports]
    fig, ax = plt.subplots(figsize=(max(6.0, 0.6 * len(names) + 2), 4.5))
    bars = ax.bar(range(len(names)), consts, color="#3b6aa0")
    for i, r in enumerate(reports):
        s = r.get("stability_ratio")
        ok = r.get("stability_pass")
        if s is not None:
            bars[i].set_color("#3b6aa0" if ok else "#b0413e")
            ax.text(i, consts[i], f"{s:.3f}", ha="center", va="bottom", fontsize=7)
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=60, ha="right", fontsize=7)
    ax.set_ylabel("fitted constant")
    ax.set_yscale("log")
    ax.set_title("bound fits (annotation: sample-doubling stability ratio)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def ratio_grid_figure(entries: list[dict], path: str | Path, title: str) -> Path:
    """Scatter of norm ratios over the (alpha, sigma) plane."""
    plt = _pyplot()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    alphas = [e["alpha"] for e in entries]
    sigmas = [e.get("sigma") or 0.0 for e in entries]
    ratios = [e["constant"] for e in entries]
    sc = ax.scatter(alphas, sigmas, c=ratios, s=120, cmap="viridis")
    for e in entries:
        ax.annotate(f"{e['constant']:.2g}", (e["alpha"], e.get("sigma") or 0.0),
                    fontsize=6, xytext=(3, 3), textcoords="offset points")
    fig.colorbar(sc, ax=ax, label="norm ratio")
    ax.set_xlabel("alpha")
    ax.set_ylabel("sigma")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def value_table_figure(rows: list[list], header: list[str], path: str | Path,
                       title: str) -> Path:
    """Line plot of tabulated values (first column abscissa)."""
    plt = _pyplot()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    xs = [row[0] for row in rows]
    for j in range(1, len(header)):
        ax.plot(xs, [row[j] for row in rows], label=header[j], lw=1.2)
    ax.set_xlabel(header[0])
    ax.legend(fontsize=7)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path

"""Line-chart rendering over experiment CSVs.

Reads the harness CSV schema (one row per instance/method/k), aggregates
per-cell means exactly the way the harness summary does (float sum in row
order divided by count), and draws one panel per (generator, k) with one
series per method. Output is deterministic SVG: fixed hash salt, no embedded
timestamps.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

REQUIRED_COLUMNS = {
    "generator", "kind_param", "method", "k", "success_rate",
    "gcc_before", "gcc_after", "avg_lcc_before", "avg_lcc_after",
    "degree_cosine", "error",
}

Y_CHOICES = ("success_rate", "degree_cosine", "gcc_delta", "avg_lcc_delta")

Y_LABELS = {
    "success_rate": "mean success rate",
    "degree_cosine": "mean degree-sequence cosine",
    "gcc_delta": "mean |global clustering delta|",
    "avg_lcc_delta": "mean |avg local clustering delta|",
}

X_LABELS = {"er": "density", "ba": "edges per new vertex (m)"}


class SchemaError(ValueError):
    """The CSV is missing columns the renderer needs."""


@dataclass(frozen=True)
class PlotSpec:
    csv_path: str
    y: str = "success_rate"
    out_path: str = "figure.svg"

    def __post_init__(self):
        if self.y not in Y_CHOICES:
            raise ValueError(f"y must be one of {Y_CHOICES}, got {self.y!r}")


def _row_value(row: dict, y: str) -> float:
    if y == "gcc_delta":
        return abs(float(row["gcc_after"]) - float(row["gcc_before"]))
    if y == "avg_lcc_delta":
        return abs(float(row["avg_lcc_after"]) - float(row["avg_lcc_before"]))
    return float(row[y])


def cell_means(csv_path: str, y: str) -> dict[tuple[str, float, int, str], float]:
    """Mean of the chosen quantity per (generator, kind_param, k, method),
    skipping rows that recorded an error. Summation follows CSV row order so
    the result is bit-identical to the harness summary."""
    path = Path(csv_path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        missing = REQUIRED_COLUMNS - set(reader.fieldnames or ())
        if missing:
            raise SchemaError(f"{csv_path} lacks required columns: {sorted(missing)}")
        sums: dict[tuple, float] = {}
        counts: dict[tuple, int] = {}
        for row in reader:
            if row["error"]:
                continue
            key = (row["generator"], float(row["kind_param"]), int(row["k"]), row["method"])
            sums[key] = sums.get(key, 0.0) + _row_value(row, y)
            counts[key] = counts.get(key, 0) + 1
    return {k: sums[k] / counts[k] for k in sums}


def render(spec: PlotSpec) -> str:
    """Draw the panel grid and write the image; returns the output path."""
    means = cell_means(spec.csv_path, spec.y)
    generators = sorted({g for g, _, _, _ in means})
    ks = sorted({k for _, _, k, _ in means})
    methods = sorted({m for _, _, _, m in means})
    if not generators:
        raise SchemaError(f"{spec.csv_path} holds no clean rows")

    n_rows = len(ks)
    n_cols = len(generators)
    plt.rcParams["svg.hashsalt"] = "anonlab-plots"
    fig, axes = plt.subplots(
        n_rows, n_cols, figsize=(4.2 * n_cols, 2.9 * n_rows), squeeze=False
    )
    markers = {m: mk for m, mk in zip(methods, "osD^v")}
    for r, k in enumerate(ks):
        for c, gen in enumerate(generators):
            ax = axes[r][c]
            for method in methods:
                points = sorted(
                    (param, v)
                    for (g, param, kk, m), v in means.items()
                    if g == gen and kk == k and m == method
                )
                if not points:
                    continue
                xs = [p for p, _ in points]
                ys = [v for _, v in points]
                ax.plot(xs, ys, marker=markers[method], markersize=3.5,
                        linewidth=1.2, label=method)
            ax.set_title(f"{gen.upper()} graphs, k={k}", fontsize=9)
            ax.set_xlabel(X_LABELS.get(gen, "parameter"), fontsize=8)
            ax.set_ylabel(Y_LABELS[spec.y], fontsize=8)
            ax.tick_params(labelsize=7)
            ax.grid(True, alpha=0.3)
            ax.legend(fontsize=7)
    fig.tight_layout()
    out = Path(spec.out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, format=out.suffix.lstrip(".") or "svg", metadata={"Date": None})
    plt.close(fig)
    return str(out)

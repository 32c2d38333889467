#!/usr/bin/env python3
"""Render the four figure families from the desk-scale CSVs.

Requires the anonlab-plots package and a finished (or partial) desk run;
combines the ER and BA CSVs when both exist so each figure carries the
six-panel layout.
"""

import argparse
import csv
from pathlib import Path

from anonlab_plots.render import PlotSpec, Y_CHOICES, render

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--results-dir", default=str(ROOT / "results"))
    parser.add_argument("--out-dir", default=str(ROOT / "results" / "figures"))
    args = parser.parse_args()

    results = Path(args.results_dir)
    sources = [p for p in (results / "desk_er" / "results.csv",
                           results / "desk_ba" / "results.csv") if p.exists()]
    if not sources:
        raise SystemExit(f"no desk CSVs under {results}; run scripts/run_desk_experiment.py first")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    combined = out_dir / "combined.csv"
    rows = []
    header = None
    for src in sources:
        with open(src, newline="") as fh:
            reader = csv.reader(fh)
            head = next(reader)
            header = header or head
            rows.extend(reader)
    with open(combined, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)

    for y in Y_CHOICES:
        out = render(PlotSpec(csv_path=str(combined), y=y, out_path=str(out_dir / f"{y}.svg")))
        print(out)


if __name__ == "__main__":
    main()

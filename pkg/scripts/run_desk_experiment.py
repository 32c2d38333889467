#!/usr/bin/env python3
"""Run (or resume) the desk-scale sweeps feeding the trend/utility acceptance
tests and the figure pipeline.

    python scripts/run_desk_experiment.py            # ER sweep (5700 rows)
    python scripts/run_desk_experiment.py --with-ba  # plus the BA companion

Partial CSVs are resumed, so interrupting and restarting is safe.
"""

import argparse
from pathlib import Path

from anonlab.harness import desk_ba_config, desk_er_config, run_experiment

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--results-dir", default=str(ROOT / "results"))
    parser.add_argument("--with-ba", action="store_true")
    parser.add_argument("--workers", type=int, default=None)
    args = parser.parse_args()

    cfg = desk_er_config(args.results_dir, workers=args.workers)
    print(f"ER sweep -> {cfg.out_csv}")
    summary = run_experiment(cfg, progress=True)
    print(f"  {len(summary['cells'])} cells summarised")
    if args.with_ba:
        cfg = desk_ba_config(args.results_dir, workers=args.workers)
        print(f"BA sweep -> {cfg.out_csv}")
        summary = run_experiment(cfg, progress=True)
        print(f"  {len(summary['cells'])} cells summarised")


if __name__ == "__main__":
    main()

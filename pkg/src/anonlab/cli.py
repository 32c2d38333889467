"""Command-line entry points.

Exit codes: 0 success, 1 property violated (check subcommand), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from anonlab import fixtures as fixtures_mod
from anonlab.attack import pseudonymize, reidentify, success_rate_detailed
from anonlab.generators import (
    GeneratorSpec,
    ba_graph,
    er_graph,
    graph_rng,
    pick_seed_kind,
)
from anonlab.graph import load_edge_list, save_edge_list
from anonlab.harness import AttackSettings, ExperimentConfig, load_environment, run_experiment
from anonlab.kmatch import kmatch
from anonlab.oracle import enumerate_consistent_mappings, victim_success_probability
from anonlab.privacy import check_property


def _cmd_generate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = []
    for i in range(args.count):
        seed = args.seed + i
        if args.kind == "er":
            spec = GeneratorSpec(kind="er", n=args.n, rng_seed=seed, density=args.density)
            g = er_graph(spec)
            entry = {"kind": "er", "n": args.n, "density": args.density, "rng_seed": seed}
        else:
            spec = GeneratorSpec(
                kind="ba", n=args.n, rng_seed=seed, m=args.m, seed_order=args.seed_order
            )
            seed_kind = pick_seed_kind(graph_rng(seed, 1))
            g = ba_graph(spec, seed_kind)
            entry = {
                "kind": "ba", "n": args.n, "m": args.m,
                "seed_order": args.seed_order, "seed_kind": seed_kind, "rng_seed": seed,
            }
        path = out / f"{args.kind}_{i:05d}.el"
        save_edge_list(g, path)
        entry["path"] = str(path)
        manifest.append(entry)
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"wrote {args.count} graphs to {out}")
    return 0


def _cmd_anonymize(args) -> int:
    g = load_edge_list(args.input)
    if args.method == "kmatch":
        result = kmatch(g, args.k, rng_seed=args.seed)
        save_edge_list(result.graph_out, args.output)
        if args.vat:
            Path(args.vat).write_text(
                json.dumps(result.vat.to_json_dict(), indent=2) + "\n"
            )
        print(
            f"kmatch k={args.k}: {g.n} -> {result.graph_out.n} vertices, "
            f"added {len(result.added_edges)} edges"
        )
    else:
        pub, phi = pseudonymize(g, graph_rng(args.seed, 0))
        save_edge_list(pub, args.output)
        if args.vat:
            Path(args.vat).write_text(json.dumps({"phi": list(phi)}, indent=2) + "\n")
        print(f"pseudonymised {g.n} vertices")
    return 0


def _cmd_attack(args) -> int:
    g_original = load_edge_list(args.original)
    g_pub = load_edge_list(args.published)
    env, phi = load_environment(g_original, args.env)
    if phi is None:
        print("environment bundle lacks phi; cannot score the attack", file=sys.stderr)
        return 2
    settings = AttackSettings(
        theta=args.theta, cand_cap=args.cand_cap, node_budget=args.node_budget,
        delta_max_pseudonym=args.delta_max, delta_max_kmatch=args.delta_max,
    )
    t0 = time.perf_counter()
    res = reidentify(g_pub, env, settings.params_for("kmatch"))
    rate, match_trunc = success_rate_detailed(res, phi)
    y_sizes = []
    for x in res.candidates[: args.y_sizes]:
        count, _ = res.count_optimal_matchings(x)
        y_sizes.append(count)
    out = {
        "candidates": len(res.candidates),
        "best_score": res.best_score,
        "matching_tie_sizes": y_sizes,
        "truncated": bool(res.truncated or match_trunc),
        "success_rate": str(rate),
        "success_rate_decimal": float(rate),
        "ms": int((time.perf_counter() - t0) * 1000),
    }
    print(json.dumps(out))
    return 0


def _cmd_check(args) -> int:
    g = load_edge_list(args.graph)
    report = check_property(g, args.property, args.k, args.l)
    print(json.dumps(report.to_json_dict()))
    return 0 if report.holds else 1


def _cmd_oracle(args) -> int:
    g_original = load_edge_list(args.original)
    g_pub = load_edge_list(args.published)
    env, phi = load_environment(g_original, args.env)
    if phi is None:
        print("environment bundle lacks phi; cannot evaluate", file=sys.stderr)
        return 2
    knowledge, _ = env.knowledge()
    dist = enumerate_consistent_mappings(
        g_pub, knowledge, env.sybils, env.victims,
        max_pattern=args.max_pattern, max_host=args.max_host,
    )
    for u in env.victims:
        p = victim_success_probability(dist, phi, u)
        print(json.dumps({"victim": u, "probability": str(p), "decimal": float(p)}))
    return 0


def _cmd_experiment(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    if args.paper_scale:
        import dataclasses

        cfg = dataclasses.replace(cfg, instances=10_000)
    summary = run_experiment(cfg, progress=args.progress)
    print(f"rows summarised into {cfg.out_summary} ({len(summary['cells'])} cells)")
    return 0


def _cmd_fixtures(args) -> int:
    written = fixtures_mod.write_fixtures(args.out)
    for path in written:
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="anonlab")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a collection of random graphs")
    p.add_argument("--kind", choices=["er", "ba"], required=True)
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--m", type=int, default=5)
    p.add_argument("--seed-order", type=int, default=50)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("anonymize", help="anonymise an edge-list graph")
    p.add_argument("--method", choices=["kmatch", "pseudonym"], default="kmatch")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--vat", help="write the alignment table (or phi) as JSON")
    p.set_defaults(func=_cmd_anonymize)

    p = sub.add_parser("attack", help="run the re-identification stage")
    p.add_argument("original")
    p.add_argument("published")
    p.add_argument("--env", required=True, help="environment bundle JSON")
    p.add_argument("--theta", type=int, default=0)
    p.add_argument("--delta-max", type=int, default=None)
    p.add_argument("--cand-cap", type=int, default=10_000)
    p.add_argument("--node-budget", type=int, default=2_000_000)
    p.add_argument("--y-sizes", type=int, default=20,
                   help="report matching tie-set sizes for this many candidates")
    p.set_defaults(func=_cmd_attack)

    p = sub.add_parser("check", help="check a privacy property, exit 1 on violation")
    p.add_argument("--property", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, default=None)
    p.add_argument("graph")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("oracle", help="exact per-victim success probabilities")
    p.add_argument("original")
    p.add_argument("published")
    p.add_argument("--env", required=True)
    p.add_argument("--max-pattern", type=int, default=7)
    p.add_argument("--max-host", type=int, default=16)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("experiment", help="run a configured sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--progress", action="store_true")
    p.add_argument("--paper-scale", action="store_true",
                   help="raise instance counts to 10000 per cell, all else unchanged")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("fixtures", help="write the counterexample fixture graphs")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_fixtures)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

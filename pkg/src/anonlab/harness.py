"""End-to-end experiment orchestration.

Protocol per instance: generate a graph, run the sybil-injection stage once,
then for every (k, method) cell anonymise, pseudonymise, re-identify, and
score. One CSV row per (instance, method, k); per-cell means go into a summary
JSON. Everything except the wall-time column is a pure function of the config
and master seed: each stage draws from its own counter-based stream keyed by
(master seed, cell, instance, stage), so reruns and parallel workers produce
identical rows, and a partially written CSV is resumed by skipping the row
keys already present.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from anonlab.attack import (
    AttackEnvironment,
    AttackParams,
    inject_sybils,
    pseudonymize,
    reidentify,
    success_rate_detailed,
)
from anonlab.generators import ba_from_rng, er_edges, pick_seed_kind
from anonlab.graph import Graph, GraphInputError, induced_subgraph
from anonlab.kmatch import kmatch
from anonlab.metrics import utility_report

CSV_COLUMNS = [
    "generator", "kind_param", "n", "instance", "seed", "method", "k", "l",
    "success_rate", "gcc_before", "gcc_after", "avg_lcc_before", "avg_lcc_after",
    "degree_cosine", "cand_count", "truncated", "error", "ms",
]

METHODS = ("pseudonym", "kmatch")

ER_DENSITIES_DEFAULT = tuple(round(0.1 + 0.05 * i, 2) for i in range(19))
BA_MS_DEFAULT = tuple(range(5, 55, 5))

# stage tags feeding the seed streams
_STAGE_GENERATE = 1
_STAGE_ATTACK = 2
_STAGE_KMATCH = 3
_STAGE_PSEUDONYM = 4


@dataclass(frozen=True)
class AttackSettings:
    """Attack knobs as stored in the config file. delta_max is per method:
    pseudonymisation never changes degrees (tight window), edge-adding
    anonymisers push degrees up (unbounded above)."""

    theta: int = 0
    w_d: int = 1
    theta_d: int = 0
    delta_max_pseudonym: Optional[int] = 0
    delta_max_kmatch: Optional[int] = None
    cand_cap: int = 10_000
    match_cap: int = 500  # tie probabilities below 1/500 are reported truncated
    node_budget: int = 300_000
    match_node_budget: int = 100_000

    def params_for(self, method: str) -> AttackParams:
        delta = self.delta_max_pseudonym if method == "pseudonym" else self.delta_max_kmatch
        return AttackParams(
            theta=self.theta,
            w_d=self.w_d,
            theta_d=self.theta_d,
            delta_max=delta,
            cand_cap=self.cand_cap,
            match_cap=self.match_cap,
            node_budget=self.node_budget,
            match_node_budget=self.match_node_budget,
        )


@dataclass(frozen=True)
class ExperimentConfig:
    kinds: tuple[str, ...] = ("er",)
    n: int = 200
    er_densities: tuple[float, ...] = ER_DENSITIES_DEFAULT
    ba_ms: tuple[int, ...] = BA_MS_DEFAULT
    ba_seed_order: int = 50
    instances: int = 50
    k_values: tuple[int, ...] = (2, 5, 8)
    methods: tuple[str, ...] = METHODS
    l: Optional[int] = None  # None: ceil(log2 n)
    victim_count: Optional[int] = None  # None: min(n // 10, 2^l - 1)
    master_seed: int = 0
    attack: AttackSettings = field(default_factory=AttackSettings)
    align_budget: int = 1_000_000
    workers: int = 1
    out_csv: str = "results.csv"
    out_summary: str = "summary.json"

    def __post_init__(self):
        if self.instances < 1:
            raise GraphInputError("instances must be >= 1")
        if any(k < 2 for k in self.k_values):
            raise GraphInputError("k values must be >= 2 for the anonymiser")
        if self.sybil_count() < 1:
            raise GraphInputError("l must be >= 1")
        for m in self.methods:
            if m not in METHODS:
                raise GraphInputError(f"unknown method {m!r}")
        for kind in self.kinds:
            if kind not in ("er", "ba"):
                raise GraphInputError(f"unknown generator kind {kind!r}")

    def sybil_count(self) -> int:
        return self.l if self.l is not None else max(1, math.ceil(math.log2(self.n)))

    def victims_per_instance(self) -> int:
        l = self.sybil_count()
        if self.victim_count is not None:
            return self.victim_count
        return max(1, min(self.n // 10, 2**l - 1))

    def cells(self) -> list[tuple[str, float]]:
        out: list[tuple[str, float]] = []
        for kind in self.kinds:
            params = self.er_densities if kind == "er" else self.ba_ms
            out.extend((kind, p) for p in params)
        return out

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    @staticmethod
    def from_json_dict(d: dict) -> "ExperimentConfig":
        attack = AttackSettings(**d.pop("attack", {}))
        listy = {
            "kinds", "er_densities", "ba_ms", "k_values", "methods",
        }
        clean = {k: tuple(v) if k in listy else v for k, v in d.items()}
        return ExperimentConfig(attack=attack, **clean)

    @staticmethod
    def load(path: str | os.PathLike) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return ExperimentConfig.from_json_dict(json.load(fh))


def _param_tag(kind: str, param: float) -> int:
    return int(round(param * 1000)) if kind == "er" else int(param)


def _stream(cfg: ExperimentConfig, kind: str, param: float, instance: int, stage: int,
            extra: int = 0) -> np.random.Generator:
    entropy = (cfg.master_seed, 0 if kind == "er" else 1, _param_tag(kind, param),
               instance, stage, extra)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def instance_seed(cfg: ExperimentConfig, kind: str, param: float, instance: int) -> int:
    ss = np.random.SeedSequence(
        (cfg.master_seed, 0 if kind == "er" else 1, _param_tag(kind, param), instance)
    )
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _generate(cfg: ExperimentConfig, kind: str, param: float, instance: int) -> Graph:
    rng = _stream(cfg, kind, param, instance, _STAGE_GENERATE)
    if kind == "er":
        return Graph(cfg.n, er_edges(cfg.n, param, rng))
    seed_kind = pick_seed_kind(rng)
    return ba_from_rng(cfg.n, int(param), cfg.ba_seed_order, seed_kind, rng)


def _unit_rows(cfg: ExperimentConfig, kind: str, param: float, instance: int,
               wanted: Optional[set] = None) -> list[dict]:
    g = _generate(cfg, kind, param, instance)
    l = cfg.sybil_count()
    n_vic = cfg.victims_per_instance()
    rng_attack = _stream(cfg, kind, param, instance, _STAGE_ATTACK)
    victims = sorted(int(v) for v in rng_attack.choice(cfg.n, size=n_vic, replace=False))
    env = inject_sybils(g, l, victims, rng_attack)
    seed = instance_seed(cfg, kind, param, instance)
    rows: list[dict] = []
    for k in cfg.k_values:
        for method in cfg.methods:
            key = (kind, str(param), str(cfg.n), str(instance), method, str(k))
            if wanted is not None and key not in wanted:
                continue
            t0 = time.perf_counter()
            base = {
                "generator": kind, "kind_param": param, "n": cfg.n,
                "instance": instance, "seed": seed, "method": method, "k": k, "l": l,
            }
            try:
                if method == "kmatch":
                    km = kmatch(env.g_plus, k, rng_seed=seed + k,
                                align_budget=cfg.align_budget)
                    anon = km.graph_out
                else:
                    anon = env.g_plus
                rng_pub = _stream(cfg, kind, param, instance, _STAGE_PSEUDONYM,
                                  extra=k * 10 + (1 if method == "kmatch" else 0))
                pub, phi = pseudonymize(anon, rng_pub)
                res = reidentify(pub, env, cfg.attack.params_for(method))
                rate, match_trunc = success_rate_detailed(res, phi)
                real_images = [phi[v] for v in range(env.g_plus.n)]
                after_real, _ = induced_subgraph(pub, real_images)
                util = utility_report(env.g_plus, after_real)
                base.update({
                    "success_rate": repr(float(rate)),
                    "gcc_before": repr(util.gcc_before),
                    "gcc_after": repr(util.gcc_after),
                    "avg_lcc_before": repr(util.avg_lcc_before),
                    "avg_lcc_after": repr(util.avg_lcc_after),
                    "degree_cosine": repr(util.degree_cosine),
                    "cand_count": len(res.candidates),
                    "truncated": int(res.truncated or match_trunc),
                    "error": "",
                })
            except Exception as exc:  # row-level failure: record, keep going
                base.update({
                    "success_rate": "", "gcc_before": "", "gcc_after": "",
                    "avg_lcc_before": "", "avg_lcc_after": "", "degree_cosine": "",
                    "cand_count": "", "truncated": "", "error": repr(exc),
                })
            base["ms"] = int((time.perf_counter() - t0) * 1000)
            rows.append(base)
    return rows


def _existing_keys(path: str) -> set:
    keys = set()
    if not os.path.exists(path):
        return keys
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            keys.add((row["generator"], row["kind_param"], row["n"], row["instance"],
                      row["method"], row["k"]))
    return keys


def _expected_keys(cfg: ExperimentConfig, kind: str, param: float, instance: int) -> set:
    return {
        (kind, str(param), str(cfg.n), str(instance), method, str(k))
        for k in cfg.k_values
        for method in cfg.methods
    }


def run_experiment(cfg: ExperimentConfig, progress: bool = False) -> dict:
    """Run (or resume) the configured sweep; returns the summary dict.

    Rows are appended in deterministic unit order; wall-time is the only
    non-reproducible column. A rerun with an existing CSV recomputes only
    missing (instance, method, k) rows.
    """
    done = _existing_keys(cfg.out_csv)
    units = [
        (kind, param, instance)
        for kind, param in cfg.cells()
        for instance in range(cfg.instances)
    ]
    pending = []
    for kind, param, instance in units:
        missing = _expected_keys(cfg, kind, param, instance) - done
        if missing:
            pending.append((kind, param, instance, missing))

    header_needed = not os.path.exists(cfg.out_csv) or os.path.getsize(cfg.out_csv) == 0
    out_dir = os.path.dirname(os.path.abspath(cfg.out_csv))
    os.makedirs(out_dir, exist_ok=True)
    with open(cfg.out_csv, "a", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        if header_needed:
            writer.writeheader()
            fh.flush()

        def emit(rows: list[dict]) -> None:
            for row in rows:
                writer.writerow(row)
            fh.flush()

        if cfg.workers > 1 and pending:
            import multiprocessing as mp

            with mp.Pool(cfg.workers) as pool:
                args = [(cfg, kind, param, inst, missing)
                        for kind, param, inst, missing in pending]
                for i, rows in enumerate(pool.imap(_unit_rows_star, args, chunksize=1)):
                    emit(rows)
                    if progress and (i + 1) % 25 == 0:
                        print(f"  {i + 1}/{len(pending)} units", flush=True)
        else:
            for i, (kind, param, inst, missing) in enumerate(pending):
                emit(_unit_rows(cfg, kind, param, inst, wanted=missing))
                if progress and (i + 1) % 25 == 0:
                    print(f"  {i + 1}/{len(pending)} units", flush=True)

    summary = summarize(cfg.out_csv)
    with open(cfg.out_summary, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


def _unit_rows_star(args) -> list[dict]:
    cfg, kind, param, inst, missing = args
    return _unit_rows(cfg, kind, param, inst, wanted=missing)


def summarize(csv_path: str) -> dict:
    """Per-cell means over clean rows, keyed by generator/param/method/k.

    Mean = sum of the column's floats in CSV row order divided by the count,
    which is exactly what downstream plotting must reproduce.
    """
    cells: dict[tuple, dict] = {}
    with open(csv_path, "r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            if row["error"]:
                key = (row["generator"], row["kind_param"], row["method"], row["k"])
                cell = cells.setdefault(key, _new_cell())
                cell["errors"] += 1
                continue
            key = (row["generator"], row["kind_param"], row["method"], row["k"])
            cell = cells.setdefault(key, _new_cell())
            cell["count"] += 1
            cell["success_sum"] += float(row["success_rate"])
            cell["gcc_delta_sum"] += abs(float(row["gcc_after"]) - float(row["gcc_before"]))
            cell["lcc_delta_sum"] += abs(
                float(row["avg_lcc_after"]) - float(row["avg_lcc_before"])
            )
            cell["degree_cosine_sum"] += float(row["degree_cosine"])
            cell["truncated"] += int(row["truncated"])
    out = {"cells": []}
    for (generator, kind_param, method, k), cell in sorted(cells.items()):
        n = cell["count"]
        out["cells"].append({
            "generator": generator,
            "kind_param": float(kind_param),
            "method": method,
            "k": int(k),
            "rows": n,
            "errors": cell["errors"],
            "truncated_rows": cell["truncated"],
            "mean_success_rate": cell["success_sum"] / n if n else None,
            "mean_abs_gcc_delta": cell["gcc_delta_sum"] / n if n else None,
            "mean_abs_lcc_delta": cell["lcc_delta_sum"] / n if n else None,
            "mean_degree_cosine": cell["degree_cosine_sum"] / n if n else None,
        })
    return out


def _new_cell() -> dict:
    return {
        "count": 0, "errors": 0, "truncated": 0, "success_sum": 0.0,
        "gcc_delta_sum": 0.0, "lcc_delta_sum": 0.0, "degree_cosine_sum": 0.0,
    }


def desk_er_config(results_dir: str | os.PathLike, workers: Optional[int] = None) -> ExperimentConfig:
    """The desk-scale ER sweep behind the trend and utility acceptance
    criteria: n=200, 19 densities, 50 instances per cell, k in {2,5,8}."""
    out = os.path.join(os.fspath(results_dir), "desk_er")
    os.makedirs(out, exist_ok=True)
    return ExperimentConfig(
        kinds=("er",),
        n=200,
        instances=50,
        k_values=(2, 5, 8),
        master_seed=1,
        attack=AttackSettings(),
        out_csv=os.path.join(out, "results.csv"),
        out_summary=os.path.join(out, "summary.json"),
        workers=workers if workers is not None else max(1, (os.cpu_count() or 1)),
    )


def desk_ba_config(results_dir: str | os.PathLike, workers: Optional[int] = None) -> ExperimentConfig:
    """Smaller scale-free companion sweep (10 m values, 10 instances/cell)
    so the figure pipeline has both generator families to draw."""
    out = os.path.join(os.fspath(results_dir), "desk_ba")
    os.makedirs(out, exist_ok=True)
    return ExperimentConfig(
        kinds=("ba",),
        n=200,
        instances=10,
        k_values=(2, 5, 8),
        master_seed=2,
        attack=AttackSettings(),
        out_csv=os.path.join(out, "results.csv"),
        out_summary=os.path.join(out, "summary.json"),
        workers=workers if workers is not None else max(1, (os.cpu_count() or 1)),
    )


# ---------------------------------------------------------------------------
# environment bundles (attack / oracle CLI interchange)


def save_environment(env: AttackEnvironment, phi: Optional[list[int]], path: str) -> None:
    data = {
        "sybils": list(env.sybils),
        "victims": list(env.victims),
        "fingerprints": {str(v): sorted(env.fingerprints[v]) for v in env.victims},
        "sybil_edges": sorted(
            [u, v] for u, v in env.g_plus.edges
            if u in set(env.sybils) and v in set(env.sybils)
        ),
        "phi": list(phi) if phi is not None else None,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")


def load_environment(g_original: Graph, path: str) -> tuple[AttackEnvironment, Optional[list[int]]]:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    sybils = tuple(data["sybils"])
    victims = tuple(sorted(data["victims"]))
    fingerprints = {int(v): frozenset(fp) for v, fp in data["fingerprints"].items()}
    edges = list(g_original.edges)
    edges.extend((u, v) for u, v in data["sybil_edges"])
    for v, fp in fingerprints.items():
        edges.extend((v, s) for s in fp)
    n_plus = max(sybils) + 1 if sybils else g_original.n
    env = AttackEnvironment(
        g_original=g_original,
        g_plus=Graph(n_plus, edges),
        sybils=sybils,
        victims=victims,
        fingerprints=fingerprints,
    )
    env.validate()
    phi = data.get("phi")
    return env, phi

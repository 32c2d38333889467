"""Deterministic seeded random-graph generation (ER and preferential attachment).

Every graph is produced from its own counter-based stream (Philox keyed by
(master seed, stream index)), so whole collections are reproducible bit-for-bit
regardless of generation order or platform, and distinct graphs can be built in
parallel without sharing generator state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from anonlab.graph import Graph, GraphInputError

SEED_KINDS = ("complete", "ring_lattice", "er_half")


def graph_rng(rng_seed: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for stream `stream` of master seed `rng_seed`."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((rng_seed, stream))))


@dataclass(frozen=True)
class GeneratorSpec:
    """One graph's recipe. kind is "er" (density d) or "ba" (m edges per new
    vertex grown on a seed graph of order seed_order up to n vertices)."""

    kind: str
    n: int
    rng_seed: int
    density: float | None = None
    m: int | None = None
    seed_order: int | None = None

    def __post_init__(self):
        if self.kind not in ("er", "ba"):
            raise GraphInputError(f"unknown generator kind {self.kind!r}")
        if self.n < 0:
            raise GraphInputError("n must be >= 0")
        if self.kind == "er":
            if self.density is None or not (0.0 <= self.density <= 1.0):
                raise GraphInputError(f"ER density must be in [0,1], got {self.density}")
        else:
            if self.m is None or self.m < 1:
                raise GraphInputError(f"BA m must be >= 1, got {self.m}")
            if self.seed_order is None or self.seed_order < self.m:
                raise GraphInputError(
                    f"BA seed order must be >= m, got n0={self.seed_order}, m={self.m}"
                )
            if self.n < self.seed_order:
                raise GraphInputError("BA n must be >= seed order")

    @property
    def growth(self) -> int:
        if self.kind != "ba":
            raise GraphInputError("growth only defined for BA specs")
        return self.n - self.seed_order


def er_edges(n: int, density: float, rng: np.random.Generator) -> list[tuple[int, int]]:
    if n < 2 or density <= 0.0:
        # still consume nothing: empty pair set or zero density adds no edges
        if density < 0.0 or density > 1.0:
            raise GraphInputError(f"density must be in [0,1], got {density}")
        return []
    iu, ju = np.triu_indices(n, k=1)
    mask = rng.random(iu.shape[0]) < density
    return list(zip(iu[mask].tolist(), ju[mask].tolist()))


def er_graph(spec: GeneratorSpec, stream: int = 0) -> Graph:
    """Erdos-Renyi G(n, d): each vertex pair kept independently w.p. d."""
    if spec.kind != "er":
        raise GraphInputError("er_graph requires an ER spec")
    rng = graph_rng(spec.rng_seed, stream)
    return Graph(spec.n, er_edges(spec.n, spec.density, rng))


def complete_graph(n: int) -> Graph:
    return Graph(n, ((i, j) for i in range(n) for j in range(i + 1, n)))


def ring_lattice(n: int, m: int) -> Graph:
    """m-regular ring lattice: each vertex joined to the floor(m/2) nearest on
    each side, plus the diametrically opposite vertex when m is odd (requires
    even n so that the pairing works out)."""
    if m >= n:
        raise GraphInputError(f"ring lattice needs m < n, got m={m}, n={n}")
    if m % 2 == 1 and n % 2 == 1:
        raise GraphInputError("odd-m ring lattice needs even n for the diameter edges")
    edges = []
    half = m // 2
    for v in range(n):
        for step in range(1, half + 1):
            edges.append((v, (v + step) % n))
        if m % 2 == 1:
            edges.append((v, (v + n // 2) % n))
    return Graph(n, edges)


def pick_seed_kind(rng: np.random.Generator) -> str:
    """Uniform over the three BA seed families."""
    return SEED_KINDS[int(rng.integers(3))]


def ba_from_rng(
    n: int, m: int, seed_order: int, seed_kind: str, rng: np.random.Generator
) -> Graph:
    """Preferential-attachment growth from a chosen seed graph, drawing from
    the given stream. Each new vertex wires to m distinct existing vertices
    sampled proportionally to current degree (repeated-node list, duplicates
    redrawn)."""
    if seed_kind not in SEED_KINDS:
        raise GraphInputError(f"unknown seed kind {seed_kind!r}")
    if seed_kind == "complete":
        seed = complete_graph(seed_order)
    elif seed_kind == "ring_lattice":
        seed = ring_lattice(seed_order, m)
    else:
        seed = Graph(seed_order, er_edges(seed_order, 0.5, rng))

    edges = list(seed.edges)
    # chances[i] repeats each vertex once per incident edge
    chances: list[int] = []
    for u, v in edges:
        chances.append(u)
        chances.append(v)
    for new in range(seed_order, n):
        existing = new
        if m > existing:
            raise GraphInputError(f"cannot attach {m} edges to a graph of order {existing}")
        targets: set[int] = set()
        while len(targets) < m:
            if chances:
                t = chances[int(rng.integers(len(chances)))]
            else:
                t = int(rng.integers(existing))
            if t in targets:
                # redraw, unless the positive-degree pool is exhausted
                pool = len(set(chances)) if chances else existing
                if pool <= len(targets):
                    remaining = [v for v in range(existing) if v not in targets]
                    t = remaining[int(rng.integers(len(remaining)))]
                else:
                    continue
            targets.add(t)
        for t in sorted(targets):
            edges.append((t, new))
            chances.append(t)
            chances.append(new)
    return Graph(n, edges)


def ba_graph(spec: GeneratorSpec, seed_kind: str, stream: int = 0) -> Graph:
    """BA graph from a spec's own seeded stream."""
    if spec.kind != "ba":
        raise GraphInputError("ba_graph requires a BA spec")
    rng = graph_rng(spec.rng_seed, stream)
    return ba_from_rng(spec.n, spec.m, spec.seed_order, seed_kind, rng)

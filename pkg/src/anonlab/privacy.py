"""Checkers for the privacy-property hierarchy.

Passive-attack side: degree anonymity, neighbourhood anonymity, symmetry
(orbit sizes), and the weaker automorphism-count property whose fixed-point
loophole the double-broom fixture demonstrates. Active-attack side: the
distance-vector and adjacency-vector anonymity properties quantified over all
candidate sybil sets up to size l.

Exact checkers refuse work beyond an explicit enumeration budget instead of
silently sampling; a separate Monte-Carlo search gives a one-sided
"violation found / none found in N samples" verdict for larger instances.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter, deque
from dataclasses import dataclass
from typing import Optional

import numpy as np

from anonlab.automorphism import automorphism_orbits, find_isomorphism
from anonlab.graph import BudgetExceededError, Graph, GraphInputError, induced_subgraph

PROPERTY_NAMES = (
    "k-degree",
    "k-neighbourhood",
    "k-automorphism",
    "k-symmetry",
    "kl-anonymity",
    "kl-adjacency-anonymity",
)

DEFAULT_SUBSET_BUDGET = 2_000_000
AUTOMORPHISM_ENUM_MAX_N = 10
AUTOMORPHISM_ENUM_CAP = 50_000
UNREACHABLE = -1  # sentinel inside distance vectors


@dataclass(frozen=True)
class PropertyReport:
    property: str
    k: int
    l: Optional[int]
    holds: bool
    witness: Optional[str]

    def __post_init__(self):
        if self.holds and self.witness is not None:
            raise ValueError("witness only accompanies a violated property")
        if not self.holds and self.witness is None:
            raise ValueError("violated property needs a witness")

    def to_json_dict(self) -> dict:
        return {
            "property": self.property,
            "k": self.k,
            "l": self.l,
            "holds": self.holds,
            "witness": self.witness,
        }


def max_k_degree(g: Graph) -> int:
    """Largest k for which every degree value is shared by >= k vertices."""
    if g.n == 0:
        raise GraphInputError("degree anonymity needs at least one vertex")
    return min(Counter(g.degrees()).values())


def _rooted_neighbourhood(g: Graph, v: int) -> tuple[Graph, int]:
    sub, old_of_new = induced_subgraph(g, {v, *g.neighbors(v)})
    return sub, old_of_new.index(v)


def neighbourhood_classes(g: Graph) -> list[list[int]]:
    """Group vertices by rooted isomorphism of their closed neighbourhoods."""
    items = [(v, *_rooted_neighbourhood(g, v)) for v in range(g.n)]
    # cheap invariant first: (order, size, root degree, degree multiset)
    buckets: dict[tuple, list[tuple[int, Graph, int]]] = {}
    for v, sub, root in items:
        key = (sub.n, sub.edge_count, sub.degree(root), tuple(sorted(sub.degrees())))
        buckets.setdefault(key, []).append((v, sub, root))
    classes: list[list[int]] = []
    for bucket in buckets.values():
        reps: list[tuple[Graph, int, list[int]]] = []
        for v, sub, root in bucket:
            for rep_sub, rep_root, members in reps:
                if find_isomorphism(rep_sub, sub, pins=[(rep_root, root)]) is not None:
                    members.append(v)
                    break
            else:
                reps.append((sub, root, [v]))
        classes.extend(members for _, _, members in reps)
    return classes


def max_k_neighbourhood(g: Graph) -> int:
    if g.n == 0:
        raise GraphInputError("neighbourhood anonymity needs at least one vertex")
    return min(len(c) for c in neighbourhood_classes(g))


def is_k_symmetric(g: Graph, k: int) -> bool:
    """Every automorphism orbit has size >= k."""
    if k < 1:
        raise GraphInputError(f"k must be >= 1, got {k}")
    if g.n == 0:
        return True
    return automorphism_orbits(g).min_block_size >= k


def enumerate_automorphisms(g: Graph, cap: int = AUTOMORPHISM_ENUM_CAP) -> list[tuple[int, ...]]:
    """All automorphisms of a small graph, identity included."""
    if g.n > AUTOMORPHISM_ENUM_MAX_N:
        raise BudgetExceededError(
            f"automorphism enumeration limited to n <= {AUTOMORPHISM_ENUM_MAX_N}, got {g.n}"
        )
    n = g.n
    adj = [frozenset(g.neighbors(v)) for v in range(n)]
    out: list[tuple[int, ...]] = []
    img = [-1] * n
    used = [False] * n

    def rec(i: int) -> None:
        if len(out) > cap:
            raise BudgetExceededError(f"more than {cap} automorphisms")
        if i == n:
            out.append(tuple(img))
            return
        for w in range(n):
            if used[w]:
                continue
            if all((j in adj[i]) == (img[j] in adj[w]) for j in range(i)):
                img[i] = w
                used[w] = True
                rec(i + 1)
                used[w] = False
        img[i] = -1

    rec(0)
    return out


def is_k_automorphic(g: Graph, k: int) -> bool:
    """The automorphism-count property: k-1 non-trivial automorphisms with
    pairwise-distinct images at every vertex. Fixed points are allowed, which
    is exactly why this is weaker than the orbit-size property (a graph can
    pass at k=2 while one vertex stays unique by degree)."""
    if k < 1:
        raise GraphInputError(f"k must be >= 1, got {k}")
    if k == 1:
        return True
    if g.n == 0:
        return False
    if k == 2:
        # one non-trivial automorphism exists iff some orbit is non-singleton
        return any(len(b) >= 2 for b in automorphism_orbits(g).blocks)
    identity = tuple(range(g.n))
    auts = [a for a in enumerate_automorphisms(g) if a != identity]
    need = k - 1
    if len(auts) < need:
        return False
    compatible = [
        [all(a[v] != b[v] for v in range(g.n)) for b in auts] for a in auts
    ]

    chosen: list[int] = []

    def extend(start: int) -> bool:
        if len(chosen) == need:
            return True
        for i in range(start, len(auts)):
            if all(compatible[i][j] for j in chosen):
                chosen.append(i)
                if extend(i + 1):
                    return True
                chosen.pop()
        return False

    return extend(0)


def _all_pairs_distances(g: Graph) -> list[list[int]]:
    dist = []
    for s in range(g.n):
        d = [UNREACHABLE] * g.n
        d[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for w in g.neighbors(u):
                if d[w] == UNREACHABLE:
                    d[w] = d[u] + 1
                    q.append(w)
        dist.append(d)
    return dist


def _subset_count(n: int, l: int) -> int:
    return sum(math.comb(n, j) for j in range(1, min(l, n) + 1))


def _check_vector_anonymity(
    g: Graph,
    k: int,
    l: int,
    adjacency: bool,
    max_subsets: int,
) -> tuple[bool, Optional[str]]:
    if k < 1 or l < 1:
        raise GraphInputError(f"k and l must be >= 1, got k={k}, l={l}")
    count = _subset_count(g.n, l)
    if not (g.n <= 30 or l <= 3) or count > max_subsets:
        raise BudgetExceededError(
            f"exact (k,l) check needs {count} candidate sets for n={g.n}, l={l}, "
            f"over the budget of {max_subsets}; use the sampling mode instead"
        )
    dist = None if adjacency else _all_pairs_distances(g)
    vertices = range(g.n)
    for size in range(1, min(l, g.n) + 1):
        for s_set in itertools.combinations(vertices, size):
            members = set(s_set)
            classes: Counter = Counter()
            vec_of: dict[int, tuple] = {}
            for u in vertices:
                if u in members:
                    continue
                if adjacency:
                    vec = tuple(1 if g.has_edge(u, s) else 0 for s in s_set)
                else:
                    vec = tuple(dist[s][u] for s in s_set)
                vec_of[u] = vec
                classes[vec] += 1
            for u, vec in vec_of.items():
                if classes[vec] < k:
                    return False, f"vertex {u} shared by only {classes[vec]} for sybil set {s_set}"
    return True, None


def is_kl_anonymous(g: Graph, k: int, l: int, max_subsets: int = DEFAULT_SUBSET_BUDGET) -> bool:
    """Every vertex outside each candidate sybil set S (|S| <= l) shares its
    distance vector to S with >= k-1 other outside vertices."""
    holds, _ = _check_vector_anonymity(g, k, l, adjacency=False, max_subsets=max_subsets)
    return holds


def is_kl_adjacency_anonymous(
    g: Graph, k: int, l: int, max_subsets: int = DEFAULT_SUBSET_BUDGET
) -> bool:
    """Same quantification with adjacency bit-vectors instead of distances."""
    holds, _ = _check_vector_anonymity(g, k, l, adjacency=True, max_subsets=max_subsets)
    return holds


def kl_violation_search(
    g: Graph,
    k: int,
    l: int,
    samples: int,
    rng: np.random.Generator,
    adjacency: bool = False,
) -> Optional[str]:
    """Monte-Carlo mode: sample candidate sybil sets; return a witness string
    if a violation is found, None if none surfaced in `samples` draws (which
    is a one-sided verdict, not a proof)."""
    if g.n < 1:
        return None
    dist = None if adjacency else _all_pairs_distances(g)
    for _ in range(samples):
        size = int(rng.integers(1, min(l, g.n) + 1))
        s_set = tuple(sorted(rng.choice(g.n, size=size, replace=False).tolist()))
        members = set(s_set)
        classes: Counter = Counter()
        vec_of: dict[int, tuple] = {}
        for u in range(g.n):
            if u in members:
                continue
            if adjacency:
                vec = tuple(1 if g.has_edge(u, s) else 0 for s in s_set)
            else:
                vec = tuple(dist[s][u] for s in s_set)
            vec_of[u] = vec
            classes[vec] += 1
        for u, vec in vec_of.items():
            if classes[vec] < k:
                return f"vertex {u} shared by only {classes[vec]} for sybil set {s_set}"
    return None


def check_property(
    g: Graph,
    name: str,
    k: int,
    l: Optional[int] = None,
    max_subsets: int = DEFAULT_SUBSET_BUDGET,
) -> PropertyReport:
    """Uniform entry point used by the CLI; returns a report with a witness
    when the property fails."""
    if name not in PROPERTY_NAMES:
        raise GraphInputError(f"unknown property {name!r}; choose from {PROPERTY_NAMES}")
    witness: Optional[str] = None
    if name == "k-degree":
        best = max_k_degree(g)
        holds = best >= k
        if not holds:
            degs = Counter(g.degrees())
            value, cnt = min(degs.items(), key=lambda it: (it[1], it[0]))
            witness = f"degree value {value} shared by only {cnt} vertices"
    elif name == "k-neighbourhood":
        classes = neighbourhood_classes(g)
        smallest = min(classes, key=len)
        holds = len(smallest) >= k
        if not holds:
            witness = f"neighbourhood class {smallest} has size {len(smallest)}"
    elif name == "k-symmetry":
        orbits = automorphism_orbits(g) if g.n else None
        holds = orbits is None or orbits.min_block_size >= k
        if not holds:
            block = min(orbits.blocks, key=len)
            witness = f"orbit {block} has size {len(block)}"
    elif name == "k-automorphism":
        holds = is_k_automorphic(g, k)
        if not holds:
            witness = f"no {k - 1} compatible non-trivial automorphisms exist"
    else:
        adjacency = name == "kl-adjacency-anonymity"
        if l is None:
            raise GraphInputError(f"property {name} requires l")
        holds, witness = _check_vector_anonymity(g, k, l, adjacency, max_subsets)
    return PropertyReport(property=name, k=k, l=l, holds=holds, witness=witness)

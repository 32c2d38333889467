"""Graph isomorphism testing and automorphism-orbit computation.

The engine is classical individualisation-refinement: iterated neighbour-colour
refinement shrinks the search space, and a backtracking search over
individualisation choices finds explicit vertex mappings. Orbits are obtained
by union-ing the images of discovered automorphisms, using pinned-pair searches
(u forced onto v) so that a failed search certifies "different orbit" and a
successful one merges entire orbits at once.

Everything here is exact. Refinement alone is only a necessary condition, so
every candidate mapping is verified edge-by-edge before it is accepted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from anonlab.graph import BudgetExceededError, Graph

BRUTEFORCE_MAX_N = 10


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra > rb:
                ra, rb = rb, ra
            self.parent[rb] = ra


@dataclass(frozen=True)
class OrbitPartition:
    """Partition of {0..n-1} into automorphism orbits."""

    blocks: tuple[tuple[int, ...], ...]
    block_of: tuple[int, ...]

    @property
    def min_block_size(self) -> int:
        return min(len(b) for b in self.blocks)

    @staticmethod
    def from_union_find(uf: _UnionFind, n: int) -> "OrbitPartition":
        groups: dict[int, list[int]] = {}
        for v in range(n):
            groups.setdefault(uf.find(v), []).append(v)
        blocks = tuple(tuple(sorted(b)) for b in sorted(groups.values(), key=min))
        block_of = [0] * n
        for i, b in enumerate(blocks):
            for v in b:
                block_of[v] = i
        return OrbitPartition(blocks, tuple(block_of))


def _refine(n: int, adj: Sequence[Sequence[int]], colours: list[int]) -> list[int]:
    """Stable colouring under iterated neighbour-colour hashing.

    Colour values are canonical (renumbered by sorted signature), so they are
    comparable across graphs refined with the same procedure.
    """
    ncolours = len(set(colours))
    while True:
        sigs = [
            (colours[v], tuple(sorted(colours[w] for w in adj[v])))
            for v in range(n)
        ]
        index = {s: i for i, s in enumerate(sorted(set(sigs)))}
        colours = [index[sigs[v]] for v in range(n)]
        if len(index) == ncolours:
            return colours
        ncolours = len(index)


def _classes(colours: list[int]) -> dict[int, list[int]]:
    out: dict[int, list[int]] = {}
    for v, c in enumerate(colours):
        out.setdefault(c, []).append(v)
    return out


def find_isomorphism(
    g1: Graph,
    g2: Graph,
    pins: Sequence[tuple[int, int]] = (),
) -> Optional[tuple[int, ...]]:
    """Mapping m with {u,v} in E1 iff {m[u],m[v]} in E2, or None.

    `pins` is a list of (v1, v2) pairs forced into the mapping; it is how the
    orbit computation asks "is there an automorphism sending v1 to v2".
    Absence of an isomorphism is a normal result, not an error.
    """
    n1, n2 = g1.n, g2.n
    if n1 != n2 or g1.edge_count != g2.edge_count:
        return None
    if sorted(g1.degrees()) != sorted(g2.degrees()):
        return None
    n = n1 + n2
    adj: list[tuple[int, ...]] = [g1.neighbors(v) for v in range(n1)]
    adj += [tuple(w + n1 for w in g2.neighbors(v)) for v in range(n2)]

    colours = [0] * n
    for i, (a, b) in enumerate(pins, start=1):
        colours[a] = i
        colours[b + n1] = i

    edges2 = g2.edges

    def balanced(cls: dict[int, list[int]]) -> bool:
        for members in cls.values():
            left = sum(1 for v in members if v < n1)
            if 2 * left != len(members):
                return False
        return True

    def extract(cls: dict[int, list[int]]) -> Optional[tuple[int, ...]]:
        mapping = [-1] * n1
        for members in cls.values():
            a, b = members
            if a >= n1:
                a, b = b, a
            mapping[a] = b - n1
        for u, v in g1.edges:
            mu, mv = mapping[u], mapping[v]
            if mu > mv:
                mu, mv = mv, mu
            if (mu, mv) not in edges2:
                return None
        return tuple(mapping)

    def search(colours: list[int]) -> Optional[tuple[int, ...]]:
        colours = _refine(n, adj, colours)
        cls = _classes(colours)
        if not balanced(cls):
            return None
        target: list[int] | None = None
        for c in sorted(cls):
            if len(cls[c]) > 2:
                target = cls[c]
                break
        if target is None:
            return extract(cls)
        u = min(v for v in target if v < n1)
        fresh = n  # strictly larger than any refined colour value
        for w in sorted(v for v in target if v >= n1):
            branch = list(colours)
            branch[u] = fresh
            branch[w] = fresh
            result = search(branch)
            if result is not None:
                return result
        return None

    return search(colours)


def automorphism_orbits(g: Graph) -> OrbitPartition:
    """Exact orbit partition of the automorphism group of g.

    Vertices are grouped by their stable refinement colour first (a necessary
    condition for equivalence); within a colour class, pinned isomorphism
    searches decide orbit membership, and each discovered automorphism merges
    all of its vertex pairs so later queries short-circuit.
    """
    n = g.n
    uf = _UnionFind(n)
    if n == 0:
        return OrbitPartition((), ())
    adj = [g.neighbors(v) for v in range(n)]
    stable = _refine(n, adj, [0] * n)
    for members in _classes(stable).values():
        reps: list[int] = []
        for v in members:
            if any(uf.find(v) == uf.find(r) for r in reps):
                continue
            for r in reps:
                mapping = find_isomorphism(g, g, pins=[(r, v)])
                if mapping is not None:
                    for x, y in enumerate(mapping):
                        uf.union(x, y)
                    break
            else:
                reps.append(v)
    return OrbitPartition.from_union_find(uf, n)


def orbits_bruteforce(g: Graph) -> OrbitPartition:
    """Independent orbit oracle: complete enumeration of edge-preserving
    permutations (depth-first over images with prefix consistency checks,
    which visits exactly the automorphisms an n! scan would keep).

    Refuses graphs with more than BRUTEFORCE_MAX_N vertices.
    """
    n = g.n
    if n > BRUTEFORCE_MAX_N:
        raise BudgetExceededError(
            f"brute-force orbit enumeration limited to n <= {BRUTEFORCE_MAX_N}, got n={n}"
        )
    uf = _UnionFind(n)
    if n == 0:
        return OrbitPartition((), ())
    adj = [frozenset(g.neighbors(v)) for v in range(n)]
    img = [-1] * n
    used = [False] * n

    def rec(i: int) -> None:
        if i == n:
            for v in range(n):
                uf.union(v, img[v])
            return
        adj_i = adj[i]
        for w in range(n):
            if used[w]:
                continue
            adj_w = adj[w]
            ok = True
            for j in range(i):
                if (j in adj_i) != (img[j] in adj_w):
                    ok = False
                    break
            if ok:
                img[i] = w
                used[w] = True
                rec(i + 1)
                used[w] = False
        img[i] = -1

    rec(0)
    return OrbitPartition.from_union_find(uf, n)

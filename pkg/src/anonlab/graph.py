"""Undirected simple graphs with dense integer vertex ids, plus edge-list I/O.

Graphs are immutable after construction so they can be shared freely across
parallel workers. Adjacency is kept both as an edge set (O(1) membership) and
as per-vertex sorted neighbour tuples (O(deg) scans, which dominate the attack
search kernels).
"""

from __future__ import annotations

import os
from typing import Iterable, Sequence


class GraphInputError(ValueError):
    """A caller handed a graph operation invalid vertices or parameters."""


class EdgeListParseError(ValueError):
    """An edge-list file violates the interchange format."""

    def __init__(self, path: str, lineno: int, message: str):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = path
        self.lineno = lineno


class BudgetExceededError(RuntimeError):
    """An exact enumeration would exceed its configured budget."""


class Graph:
    """Simple undirected graph on vertices {0, ..., n-1}."""

    __slots__ = ("n", "_edges", "_adj")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise GraphInputError(f"vertex count must be >= 0, got {n}")
        self.n = n
        norm: set[tuple[int, int]] = set()
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphInputError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise GraphInputError(f"self-loop at vertex {u}")
            if u > v:
                u, v = v, u
            if (u, v) in norm:
                continue
            norm.add((u, v))
            adj[u].append(v)
            adj[v].append(u)
        self._edges = frozenset(norm)
        self._adj = tuple(tuple(sorted(nb)) for nb in adj)

    @property
    def edges(self) -> frozenset[tuple[int, int]]:
        """Edge set as (u, v) pairs with u < v."""
        return self._edges

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    def neighbors(self, v: int) -> tuple[int, ...]:
        self._check_vertex(v)
        return self._adj[v]

    def degree(self, v: int) -> int:
        self._check_vertex(v)
        return len(self._adj[v])

    def degrees(self) -> list[int]:
        return [len(nb) for nb in self._adj]

    def has_edge(self, u: int, v: int) -> bool:
        if u > v:
            u, v = v, u
        return (u, v) in self._edges

    def adjacency_sets(self) -> list[set[int]]:
        """Mutable copy of the adjacency, for algorithms that build on it."""
        return [set(nb) for nb in self._adj]

    def with_extra_vertices(self, extra: int) -> "Graph":
        """Same edges, `extra` additional isolated vertices appended."""
        if extra < 0:
            raise GraphInputError("extra vertex count must be >= 0")
        return Graph(self.n + extra, self._edges)

    def relabel(self, phi: Sequence[int]) -> "Graph":
        """Image of the graph under the bijection v -> phi[v]."""
        if len(phi) != self.n or sorted(phi) != list(range(self.n)):
            raise GraphInputError("relabelling must be a bijection on {0..n-1}")
        return Graph(self.n, ((phi[u], phi[v]) for u, v in self._edges))

    def _check_vertex(self, v: int) -> None:
        if not (0 <= v < self.n):
            raise GraphInputError(f"vertex {v} out of range for n={self.n}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((self.n, self._edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edge_count})"


def induced_subgraph(g: Graph, members: Iterable[int]) -> tuple[Graph, tuple[int, ...]]:
    """Subgraph on `members`, relabelled to dense ids.

    Returns (subgraph, old_of_new) where old_of_new[new_id] gives the vertex's
    id in `g`, so callers can translate results back.
    """
    old_of_new = tuple(sorted(set(members)))
    for v in old_of_new:
        if not (0 <= v < g.n):
            raise GraphInputError(f"member {v} out of range for n={g.n}")
    new_of_old = {old: new for new, old in enumerate(old_of_new)}
    keep = set(old_of_new)
    edges = [
        (new_of_old[u], new_of_old[v])
        for u, v in g.edges
        if u in keep and v in keep
    ]
    return Graph(len(old_of_new), edges), old_of_new


def load_edge_list(path: str | os.PathLike) -> Graph:
    """Read the edge-list interchange format.

    Line 1 is the vertex count; every further non-empty, non-`#` line is
    "u v" with u < v. Malformed input raises EdgeListParseError with the
    offending line number.
    """
    path = os.fspath(path)
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    n: int | None = None
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if n is None:
            try:
                n = int(line)
            except ValueError:
                raise EdgeListParseError(path, lineno, f"expected vertex count, got {line!r}")
            if n < 0:
                raise EdgeListParseError(path, lineno, f"negative vertex count {n}")
            continue
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListParseError(path, lineno, f"expected 'u v', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListParseError(path, lineno, f"non-integer endpoint in {line!r}")
        if u == v:
            raise EdgeListParseError(path, lineno, f"self-loop at vertex {u}")
        if not (u < v):
            raise EdgeListParseError(path, lineno, f"endpoints must satisfy u < v, got {u} {v}")
        if not (0 <= u and v < n):
            raise EdgeListParseError(path, lineno, f"edge ({u},{v}) out of range for n={n}")
        if (u, v) in seen:
            raise EdgeListParseError(path, lineno, f"duplicate edge ({u},{v})")
        seen.add((u, v))
        edges.append((u, v))
    if n is None:
        raise EdgeListParseError(path, 1, "empty file: missing vertex count line")
    return Graph(n, edges)


def save_edge_list(g: Graph, path: str | os.PathLike, header: str | None = None) -> None:
    """Write the interchange format; load_edge_list(save_edge_list(g)) == g."""
    path = os.fspath(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        fh.write(f"{g.n}\n")
        for u, v in sorted(g.edges):
            fh.write(f"{u} {v}\n")

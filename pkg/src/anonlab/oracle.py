"""Exact brute-force adversary: enumerate every mapping of the attacker's
vertices into the published graph that is consistent with the attacker's own
knowledge, weight them uniformly, and read off per-victim re-identification
probabilities in exact rational arithmetic.

Support choice: a mapping is consistent when the attacker subgraph it induces
in the published graph matches the knowledge graph edge-for-edge under the
mapping itself (victim-victim pairs ignored on both sides). Mappings that
contradict the attacker's knowledge get probability zero; the equal-weight
rule for isomorphic candidate subgraphs then forces uniformity over what is
left. This is the strongest-adversary reading, and upper-bound statements
such as the 1/k ceiling for k-symmetric graphs hold for it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from anonlab.attack import adversary_knowledge
from anonlab.graph import BudgetExceededError, Graph, GraphInputError

DEFAULT_MAX_PATTERN = 7
DEFAULT_MAX_HOST = 16
DEFAULT_SUPPORT_CAP = 2_000_000


@dataclass(frozen=True)
class MappingDistribution:
    """Uniform distribution over consistent mappings.

    order[j] is the attacker vertex (original id) at local index j; each
    mapping is the tuple of its images in the published graph. All mappings in
    the support induce subgraphs isomorphic to the knowledge graph, hence fall
    in a single isomorphism class and share one weight.
    """

    order: tuple[int, ...]
    n_sybils: int
    mappings: tuple[tuple[int, ...], ...]

    @property
    def weight(self) -> Fraction:
        return Fraction(1, len(self.mappings)) if self.mappings else Fraction(0)

    def total_weight(self) -> Fraction:
        return self.weight * len(self.mappings)


def enumerate_consistent_mappings(
    g_pub: Graph,
    knowledge: Graph,
    sybils: Sequence[int],
    victims: Sequence[int],
    max_pattern: int = DEFAULT_MAX_PATTERN,
    max_host: int = DEFAULT_MAX_HOST,
    support_cap: int = DEFAULT_SUPPORT_CAP,
) -> MappingDistribution:
    """All injective rho: S u I -> V(g_pub) whose induced attacker subgraph
    equals the knowledge graph under rho (edge iff edge, victim-victim pairs
    exempt on both sides), uniformly weighted.

    `knowledge` uses local ids: sorted sybils first, then sorted victims,
    matching adversary_knowledge(). Budgets guard the factorial enumeration.
    """
    s_sorted = tuple(sorted(set(sybils)))
    i_sorted = tuple(sorted(set(victims)))
    order = s_sorted + i_sorted
    n_total = len(order)
    n_s = len(s_sorted)
    if knowledge.n != n_total:
        raise GraphInputError(
            f"knowledge graph has {knowledge.n} vertices, expected {n_total}"
        )
    if n_total > max_pattern:
        raise BudgetExceededError(
            f"attacker set of size {n_total} over the pattern budget {max_pattern}"
        )
    if g_pub.n > max_host:
        raise BudgetExceededError(
            f"published graph of order {g_pub.n} over the host budget {max_host}"
        )

    # constraints[b] = (edge-wanted partners, nonedge-wanted partners) among a < b
    constraints: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
    for b in range(n_total):
        want_edge, want_gap = [], []
        for a in range(b):
            if a >= n_s and b >= n_s:
                continue
            if knowledge.has_edge(a, b):
                want_edge.append(a)
            else:
                want_gap.append(a)
        constraints.append((tuple(want_edge), tuple(want_gap)))

    adj = [frozenset(g_pub.neighbors(v)) for v in range(g_pub.n)]
    images = [-1] * n_total
    used = [False] * g_pub.n
    found: list[tuple[int, ...]] = []

    def rec(j: int) -> None:
        if j == n_total:
            if len(found) >= support_cap:
                raise BudgetExceededError(
                    f"consistent-mapping support exceeds the cap {support_cap}"
                )
            found.append(tuple(images))
            return
        want_edge, want_gap = constraints[j]
        for v in range(g_pub.n):
            if used[v]:
                continue
            nb = adj[v]
            if any(images[a] not in nb for a in want_edge):
                continue
            if any(images[a] in nb for a in want_gap):
                continue
            images[j] = v
            used[v] = True
            rec(j + 1)
            used[v] = False
        images[j] = -1

    rec(0)
    return MappingDistribution(order=order, n_sybils=n_s, mappings=tuple(found))


def victim_success_probability(
    dist: MappingDistribution, phi: Sequence[int], victim: int
) -> Fraction:
    """Probability mass of mappings placing `victim` on its true pseudonym."""
    if victim not in dist.order[dist.n_sybils:]:
        raise GraphInputError(f"vertex {victim} is not a victim of this instance")
    if not dist.mappings:
        return Fraction(0)
    j = dist.order.index(victim)
    target = phi[victim]
    hits = sum(1 for m in dist.mappings if m[j] == target)
    return Fraction(hits, len(dist.mappings))


def pattern_self_mapping_count(
    knowledge: Graph,
    n_sybils: int,
    max_pattern: int = 12,
) -> int:
    """Number of consistent mappings of the attacker pattern onto itself
    (always >= 1 for the identity). A count of 1 certifies that the sybil
    structure is unique: no reordering or role swap explains the knowledge
    equally well, so pseudonymisation alone cannot hide the placement."""
    n_total = knowledge.n
    sybils = tuple(range(n_sybils))
    victims = tuple(range(n_sybils, n_total))
    dist = enumerate_consistent_mappings(
        knowledge,
        knowledge,
        sybils,
        victims,
        max_pattern=max_pattern,
        max_host=max(knowledge.n, 1),
    )
    return len(dist.mappings)


def max_attack_success(
    g: Graph,
    l: int,
    max_pattern: int = DEFAULT_MAX_PATTERN,
    max_host: int = DEFAULT_MAX_HOST,
) -> Fraction:
    """Worst-case per-victim probability over every attack that could have
    produced the published graph g with at most l sybils.

    A hypothesis picks sybil images S with |S| <= l (possibly empty). Attack
    coherence then pins the rest: adversary edges are confined to
    S x (S u I), so the victim set must contain every g-neighbour of S, each
    such victim's fingerprint (its adjacency to S) must be non-empty by
    construction, and fingerprints must be pairwise distinct or the attacker
    could never tell the victims apart. At most one additional fingerprint-free
    victim may be declared (a pure guess; with zero sybils this is the
    uniform-guess adversary). The consistent-mapping distribution of each
    coherent hypothesis is enumerated and the maximum per-victim probability
    wins.
    """
    if g.n > max_host:
        raise BudgetExceededError(
            f"published graph of order {g.n} over the host budget {max_host}"
        )
    if l < 0:
        raise GraphInputError("sybil budget must be >= 0")
    best = Fraction(0)
    vertices = range(g.n)
    identity_phi = list(range(g.n))
    for s_size in range(0, min(l, g.n) + 1):
        for s_set in itertools.combinations(vertices, s_size):
            s_members = set(s_set)
            forced: set[int] = set()
            for s in s_set:
                forced.update(u for u in g.neighbors(s) if u not in s_members)
            fps = [frozenset(w for w in g.neighbors(v) if w in s_members) for v in sorted(forced)]
            if len(set(fps)) != len(fps):
                continue  # indistinguishable victims: not a valid attack
            free = [v for v in vertices if v not in s_members and v not in forced]
            victim_choices: list[tuple[int, ...]] = []
            if forced:
                victim_choices.append(tuple(sorted(forced)))
            victim_choices.extend(tuple(sorted(forced | {x})) for x in free)
            for i_set in victim_choices:
                if s_size + len(i_set) > max_pattern:
                    continue
                knowledge, _ = adversary_knowledge(g, s_set, i_set)
                dist = enumerate_consistent_mappings(
                    g, knowledge, s_set, i_set,
                    max_pattern=max_pattern, max_host=max_host,
                )
                for u in i_set:
                    p = victim_success_probability(dist, identity_phi, u)
                    if p > best:
                        best = p
    return best

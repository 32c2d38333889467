"""The three-stage attacker-defender game.

Stage 1 (attacker): inject l sybil vertices, wire them with a random internal
pattern kept connected by a forced spanning path, and give every victim a
distinct non-empty random subset of sybils as its fingerprint.

Stage 2 (defender): anonymise (elsewhere) and pseudonymise.

Stage 3 (attacker): retrieve candidate sybil placements in the published graph
by a pruned depth-first search scoring structural distance against the known
sybil pattern, then match victims to published vertices by fingerprint Hamming
cost. The scoring is a parameterised reconstruction of the robust attack:
exact-tie semantics at theta=0, degrading gracefully for theta>0.

Success is scored by the published success-rate formula: the mean over
equally-most-likely placements X of 1/|Y_X| when the ground-truth matching is
among the cost-optimal matchings Y_X for that placement, 0 otherwise. All of
it in exact rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from anonlab.graph import Graph, GraphInputError


@dataclass(frozen=True)
class AttackEnvironment:
    """One full game instance: original graph, sybil-extended graph, roles."""

    g_original: Graph
    g_plus: Graph
    sybils: tuple[int, ...]
    victims: tuple[int, ...]
    fingerprints: dict[int, frozenset[int]]

    def knowledge(self) -> tuple[Graph, tuple[int, ...]]:
        return adversary_knowledge(self.g_plus, self.sybils, self.victims)

    def validate(self) -> None:
        s = set(self.sybils)
        i = set(self.victims)
        if s & i:
            raise GraphInputError("sybil and victim sets overlap")
        new_edges = self.g_plus.edges - self.g_original.edges
        for u, v in new_edges:
            if not (u in s or v in s):
                raise GraphInputError(f"adversary edge ({u},{v}) touches no sybil")
            other = v if u in s else u
            if other not in s and other not in i:
                raise GraphInputError(f"adversary edge ({u},{v}) leaves S x (S u I)")
        fps = list(self.fingerprints.values())
        if any(not fp for fp in fps):
            raise GraphInputError("empty fingerprint")
        if len(set(fps)) != len(fps):
            raise GraphInputError("duplicate fingerprints")


def inject_sybils(
    g: Graph, l: int, victims: Sequence[int], rng: np.random.Generator
) -> AttackEnvironment:
    """Append l sybils to g and realise fingerprints as edges.

    Inter-sybil pairs are drawn with probability 1/2 on top of a forced
    spanning path; victims get pairwise-distinct non-empty sybil subsets.
    """
    victims = tuple(sorted(set(victims)))
    if l < 1:
        raise GraphInputError(f"need at least one sybil, got l={l}")
    if not 1 <= len(victims) <= 2**l - 1:
        raise GraphInputError(
            f"victim count must be in [1, 2^l - 1] = [1, {2**l - 1}], got {len(victims)}"
        )
    for v in victims:
        if not (0 <= v < g.n):
            raise GraphInputError(f"victim {v} not a vertex of the original graph")
    n = g.n
    sybils = tuple(range(n, n + l))
    edges = list(g.edges)
    for a in range(l):
        for b in range(a + 1, l):
            forced = b == a + 1
            if forced or rng.random() < 0.5:
                edges.append((sybils[a], sybils[b]))
    fingerprints: dict[int, frozenset[int]] = {}
    seen: set[frozenset[int]] = set()
    for v in victims:
        while True:
            bits = rng.integers(0, 2, size=l)
            fp = frozenset(sybils[j] for j in range(l) if bits[j])
            if fp and fp not in seen:
                break
        seen.add(fp)
        fingerprints[v] = fp
        for s in sorted(fp):
            edges.append((v, s))
    env = AttackEnvironment(
        g_original=g,
        g_plus=Graph(n + l, edges),
        sybils=sybils,
        victims=victims,
        fingerprints=fingerprints,
    )
    env.validate()
    return env


def adversary_knowledge(
    g_plus: Graph, sybils: Sequence[int], victims: Sequence[int]
) -> tuple[Graph, tuple[int, ...]]:
    """Subgraph on S u I without victim-victim edges.

    Returns (knowledge, order): local vertex j of the knowledge graph is
    order[j], with sorted sybils first, then sorted victims.
    """
    s_sorted = tuple(sorted(set(sybils)))
    i_sorted = tuple(sorted(set(victims)))
    if set(s_sorted) & set(i_sorted):
        raise GraphInputError("sybil and victim sets overlap")
    order = s_sorted + i_sorted
    local = {v: j for j, v in enumerate(order)}
    n_s = len(s_sorted)
    edges = []
    for a in range(len(order)):
        for b in range(a + 1, len(order)):
            if a >= n_s and b >= n_s:
                continue  # victim-victim edges are not adversary knowledge
            if g_plus.has_edge(order[a], order[b]):
                edges.append((a, b))
    return Graph(len(order), edges), order


def pseudonymize(g: Graph, rng: np.random.Generator) -> tuple[Graph, tuple[int, ...]]:
    """Uniformly random relabelling; phi[old] = published id."""
    phi = tuple(int(x) for x in rng.permutation(g.n))
    return g.relabel(phi), phi


@dataclass(frozen=True)
class AttackParams:
    """Knobs of the reconstructed attack.

    theta: admit candidates scoring within theta of the minimum (0 = exact ties).
    w_d: weight of the per-position degree-deficit penalty.
    theta_d / delta_max: published degree must lie in
        [knowledge degree - theta_d, knowledge degree + delta_max];
        delta_max=None means unbounded above (right default when the defender
        only ever adds edges).
    cand_cap / match_cap: tie-set size caps; exceeding flags truncation.
    node_budget / match_node_budget: expansion caps for the placement search
        and the matching tie enumeration; exceeding flags truncation.
    """

    theta: int = 0
    w_d: int = 1
    theta_d: int = 0
    delta_max: Optional[int] = None
    cand_cap: int = 10_000
    match_cap: int = 10_000
    node_budget: int = 2_000_000
    match_node_budget: int = 500_000


@dataclass
class ReidentificationResult:
    """Candidate sybil placements plus everything needed to score them."""

    candidates: list[tuple[int, ...]]
    best_score: int
    truncated: bool
    g_pub: Graph
    sybil_order: tuple[int, ...]  # original sybil ids, position order
    victim_order: tuple[int, ...]  # original victim ids, sorted
    fingerprint_rows: np.ndarray  # m x l over sybil positions
    params: AttackParams
    _adj: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        if self._adj is None:
            self._adj = _adjacency(self.g_pub)

    def _cost_matrix(self, x: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
        """Hamming costs victims x free vertices, and the free-vertex ids."""
        free = np.ones(self.g_pub.n, dtype=bool)
        free[list(x)] = False
        free_ids = np.nonzero(free)[0]
        bits = self._adj[np.ix_(free_ids, list(x))]  # n_free x l
        f = self.fingerprint_rows
        cost = f @ (1 - bits.T) + (1 - f) @ bits.T  # m x n_free
        return cost.astype(np.int64), free_ids

    def optimal_matching_cost(self, x: tuple[int, ...]) -> int:
        cost, _ = self._cost_matrix(x)
        rows, cols = linear_sum_assignment(cost)
        return int(cost[rows, cols].sum())

    def matchings(self, x: tuple[int, ...]) -> tuple[list[dict[int, int]], bool]:
        """All cost-minimal injective victim matchings for placement x
        (capped at params.match_cap; the flag reports truncation)."""
        cost, free_ids = self._cost_matrix(x)
        opt = self.optimal_matching_cost(x)
        assignments, truncated = _enumerate_optimal(
            cost, opt, self.params.match_cap, node_budget=self.params.match_node_budget
        )
        out = [
            {self.victim_order[i]: int(free_ids[col]) for i, col in enumerate(cols)}
            for cols in assignments
        ]
        return out, truncated

    def count_optimal_matchings(self, x: tuple[int, ...]) -> tuple[int, bool]:
        cost, _ = self._cost_matrix(x)
        opt = self.optimal_matching_cost(x)
        return _count_optimal(
            cost, opt, self.params.match_cap, node_budget=self.params.match_node_budget
        )


def _adjacency(g: Graph) -> np.ndarray:
    a = np.zeros((g.n, g.n), dtype=np.int8)
    for u, v in g.edges:
        a[u, v] = 1
        a[v, u] = 1
    return a


_BIG = np.iinfo(np.int64).max // 4


def _greedy_ub(cost: np.ndarray) -> int:
    """Cost of the row-by-row greedy assignment; an upper bound on the
    optimum, and equal to it whenever it meets the row-minima lower bound."""
    masked = cost.copy()
    total = 0
    for i in range(cost.shape[0]):
        j = int(np.argmin(masked[i]))
        total += int(masked[i, j])
        masked[:, j] = _BIG
    return total


def _exact_cost(cost: np.ndarray, lb: int) -> int:
    """Optimal assignment cost, dodging the solver when bounds pin it."""
    ub = _greedy_ub(cost)
    if ub == lb:
        return lb
    rows, cols = linear_sum_assignment(cost)
    return int(cost[rows, cols].sum())


def _enumerate_optimal(
    cost: np.ndarray,
    opt: int,
    cap: int,
    node_budget: int = 500_000,
    count_only: bool = False,
) -> tuple[list[tuple[int, ...]] | int, bool]:
    """Branch-and-bound over victims: all injective column choices with total
    cost == opt, up to cap ties and node_budget expansions (either limit sets
    the truncation flag). Columns are tried in ascending-cost order per row so
    optimal assignments surface early; the bound uses the row-minima suffix.
    """
    m, n = cost.shape
    row_min = cost.min(axis=1)
    suffix = np.zeros(m + 1, dtype=np.int64)
    for i in range(m - 1, -1, -1):
        suffix[i] = suffix[i + 1] + row_min[i]
    order = np.argsort(cost, axis=1, kind="stable")
    out: list[tuple[int, ...]] = []
    count = 0
    nodes = 0
    used = np.zeros(n, dtype=bool)
    chosen: list[int] = []
    truncated = False

    def rec(i: int, acc: int) -> None:
        nonlocal count, nodes, truncated
        if truncated:
            return
        if i == m:
            if acc != opt:  # only reachable if opt was not actually optimal
                return
            count += 1
            if not count_only:
                out.append(tuple(chosen))
            if count >= cap:
                truncated = True
            return
        row = cost[i]
        budget = opt - acc - suffix[i + 1]
        for col in order[i]:
            c = row[col]
            if c > budget:
                break  # columns are cost-sorted; the rest only cost more
            if used[col]:
                continue
            nodes += 1
            if nodes > node_budget:
                truncated = True
                return
            used[col] = True
            chosen.append(col)
            rec(i + 1, acc + int(c))
            chosen.pop()
            used[col] = False

    rec(0, 0)
    return (count if count_only else out), truncated


def _count_optimal(
    cost: np.ndarray, opt: int, cap: int, node_budget: int = 500_000
) -> tuple[int, bool]:
    """Number of injective assignments achieving opt, capped and budgeted."""
    count, truncated = _enumerate_optimal(
        cost, opt, cap, node_budget=node_budget, count_only=True
    )
    return count, truncated


def reidentify(
    g_pub: Graph, env: AttackEnvironment, params: AttackParams = AttackParams()
) -> ReidentificationResult:
    """Stage 3: retrieve candidate sybil placements and prepare matching data.

    The search assigns sybil positions one by one (reordered so that highly
    constrained positions come first), pruning on partial structural score
    against the best found so far plus theta, and on per-position degree
    windows. All placements tying within theta of the final minimum are kept,
    up to the candidate cap.
    """
    know, order = env.knowledge()
    l = len(env.sybils)
    m = len(env.victims)
    if g_pub.n < l + m:
        raise GraphInputError("published graph smaller than the attacker subgraph")
    know_deg = [know.degree(j) for j in range(l)]  # over S u I, = true sybil degrees
    sybil_adj = [[know.has_edge(a, b) for b in range(l)] for a in range(l)]

    # position order: most constrained first (many edges to already-placed)
    pub_degs = g_pub.degrees()
    pools: list[list[int]] = []
    for j in range(l):
        lo = know_deg[j] - params.theta_d
        hi = None if params.delta_max is None else know_deg[j] + params.delta_max
        pools.append(
            [v for v in range(g_pub.n) if pub_degs[v] >= lo and (hi is None or pub_degs[v] <= hi)]
        )
    remaining = set(range(l))
    seq: list[int] = []
    while remaining:
        best_j = min(
            remaining,
            key=lambda j: (
                -sum(1 for q in seq if sybil_adj[j][q]),
                len(pools[j]),
                j,
            ),
        )
        seq.append(best_j)
        remaining.discard(best_j)

    adj_sets = [frozenset(g_pub.neighbors(v)) for v in range(g_pub.n)]
    theta = params.theta
    w_d = params.w_d
    best = None  # best leaf score seen
    scored: list[tuple[int, tuple[int, ...]]] = []
    nodes = 0
    cap_overflow = False  # tie window overflowed at the *current* best
    budget_hit = False
    placed: list[int] = []  # vertex chosen for seq[d]
    placed_set: set[int] = set()

    def leaf_admit(score: int) -> None:
        nonlocal best, cap_overflow, scored
        if best is None or score < best:
            best = score
            scored = [(s, x) for s, x in scored if s <= best + theta]
            if len(scored) < params.cand_cap:
                cap_overflow = False
        if score <= best + theta:
            if len(scored) >= params.cand_cap:
                cap_overflow = True
            else:
                x = [0] * l
                for d, j in enumerate(seq):
                    x[j] = placed[d]
                scored.append((score, tuple(x)))

    def rec(d: int, acc: int) -> bool:
        """Returns False when the search must stop entirely."""
        nonlocal nodes, budget_hit
        if d == l:
            leaf_admit(acc)
            # nothing can beat an exact-match window already at capacity
            return not (cap_overflow and best == 0)
        j = seq[d]
        kd = know_deg[j]
        for v in pools[j]:
            if v in placed_set:
                continue
            nodes += 1
            if nodes > params.node_budget:
                budget_hit = True
                return False
            score = acc + w_d * max(0, kd - len(adj_sets[v]))
            for q_idx in range(d):
                want = sybil_adj[j][seq[q_idx]]
                have = placed[q_idx] in adj_sets[v]
                if want != have:
                    score += 1
                    if best is not None and score > best + theta:
                        break
            if best is not None and score > best + theta:
                continue
            placed.append(v)
            placed_set.add(v)
            ok = rec(d + 1, score)
            placed.pop()
            placed_set.discard(v)
            if not ok:
                return False
        return True

    rec(0, 0)
    truncated = cap_overflow or budget_hit

    fp_rows = np.zeros((m, l), dtype=np.int64)
    for i, u in enumerate(env.victims):
        for j, s in enumerate(env.sybils):
            if s in env.fingerprints[u]:
                fp_rows[i, j] = 1
    structural = [x for s, x in sorted(scored) if best is not None and s <= best + theta]
    result = ReidentificationResult(
        candidates=structural,
        best_score=best if best is not None else -1,
        truncated=truncated,
        g_pub=g_pub,
        sybil_order=env.sybils,
        victim_order=env.victims,
        fingerprint_rows=fp_rows,
        params=params,
    )
    result.candidates = _fingerprint_tiebreak(result)
    return result


def _fingerprint_tiebreak(result: ReidentificationResult) -> list[tuple[int, ...]]:
    """Keep only the structurally tied placements whose best fingerprint
    matching cost is minimal. Two placements related by an automorphism of
    the published graph have identical matching costs, so this filter never
    breaks the tie protection that an orbit provides; what it does break are
    spurious reorderings of one placement that fingerprints can rule out.

    Candidates are processed in lower-bound order so the exact solve runs
    only while the bound can still tie the current minimum."""
    if len(result.candidates) <= 1:
        return result.candidates
    lbs = np.empty(len(result.candidates), dtype=np.int64)
    costs: list[np.ndarray] = []
    for idx, x in enumerate(result.candidates):
        cost, _ = result._cost_matrix(x)
        costs.append(cost)
        lbs[idx] = cost.min(axis=1).sum()
    order = np.argsort(lbs, kind="stable")
    best_cost: Optional[int] = None
    kept: list[tuple[int, ...]] = []
    for idx in order.tolist():
        lb = int(lbs[idx])
        if best_cost is not None and lb > best_cost:
            break
        c = _exact_cost(costs[idx], lb)
        if best_cost is None or c < best_cost:
            best_cost = c
            kept = [result.candidates[idx]]
        elif c == best_cost:
            kept.append(result.candidates[idx])
    kept.sort()
    return kept


def success_rate_detailed(
    result: ReidentificationResult, phi: Sequence[int]
) -> tuple[Fraction, bool]:
    """Success rate plus a flag for matching-stage tie-set truncation."""
    if not result.candidates:
        return Fraction(0), False
    truth_imgs = [phi[u] for u in result.victim_order]
    total = Fraction(0)
    any_truncated = False
    col_of = np.empty(result.g_pub.n, dtype=np.int64)
    for x in result.candidates:
        x_set = set(x)
        if any(img in x_set for img in truth_imgs):
            continue
        cost, free_ids = result._cost_matrix(x)
        col_of[free_ids] = np.arange(free_ids.shape[0])
        truth_cost = int(sum(cost[i, col_of[img]] for i, img in enumerate(truth_imgs)))
        # bound sandwich: solve exactly only when the bounds cannot already
        # accept (truth meets the lower bound) or reject (greedy beats truth)
        lb = int(cost.min(axis=1).sum())
        if truth_cost == lb:
            opt = lb
        else:
            ub = _greedy_ub(cost)
            if ub < truth_cost:
                continue
            rows, cols = linear_sum_assignment(cost)
            opt = int(cost[rows, cols].sum())
        if truth_cost != opt:
            continue
        n_ties, truncated = _count_optimal(
            cost, opt, result.params.match_cap,
            node_budget=result.params.match_node_budget,
        )
        any_truncated = any_truncated or truncated
        # under a tripped budget the truth is still a witness that at least
        # one optimal matching exists
        total += Fraction(1, max(n_ties, 1))
    return total / len(result.candidates), any_truncated


def success_rate(result: ReidentificationResult, phi: Sequence[int]) -> Fraction:
    """The two-stage success formula, exactly:

    0 when no placement was retrieved; otherwise the mean over placements X of
    1/|Y_X| if the ground-truth victim matching is cost-optimal for X (and its
    images avoid X), else 0.
    """
    rate, _ = success_rate_detailed(result, phi)
    return rate

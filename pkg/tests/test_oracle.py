from fractions import Fraction

import pytest

from anonlab.attack import AttackParams, inject_sybils, pseudonymize, reidentify, success_rate
from anonlab.fixtures import uneven_barbell
from anonlab.generators import GeneratorSpec, complete_graph, er_graph, graph_rng
from anonlab.graph import BudgetExceededError, Graph, GraphInputError
from anonlab.oracle import (
    enumerate_consistent_mappings,
    max_attack_success,
    pattern_self_mapping_count,
    victim_success_probability,
)

SINGLE_EDGE_KNOWLEDGE = Graph(2, [(0, 1)])  # one sybil wired to one victim


def cycle(n):
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


class TestEnumerate:
    def test_complete_graph_support(self):
        dist = enumerate_consistent_mappings(complete_graph(4), SINGLE_EDGE_KNOWLEDGE, [0], [1])
        assert len(dist.mappings) == 12
        assert dist.weight == Fraction(1, 12)
        assert dist.total_weight() == 1

    def test_support_closed_under_automorphism(self):
        g = cycle(6)
        dist = enumerate_consistent_mappings(g, SINGLE_EDGE_KNOWLEDGE, [0], [1])
        support = set(dist.mappings)
        rotate = lambda v: (v + 1) % 6
        for m in dist.mappings:
            assert tuple(rotate(x) for x in m) in support

    def test_weights_sum_to_one_exactly(self):
        g = er_graph(GeneratorSpec(kind="er", n=9, rng_seed=5, density=0.5))
        dist = enumerate_consistent_mappings(g, SINGLE_EDGE_KNOWLEDGE, [0], [1])
        assert dist.total_weight() == 1

    def test_pattern_budget_refusal(self):
        g = complete_graph(10)
        know = Graph(8, [])
        with pytest.raises(BudgetExceededError):
            enumerate_consistent_mappings(g, know, list(range(4)), list(range(4, 8)))

    def test_host_budget_refusal(self):
        with pytest.raises(BudgetExceededError):
            enumerate_consistent_mappings(complete_graph(17), SINGLE_EDGE_KNOWLEDGE, [0], [1])


class TestVictimProbability:
    def test_k5_single_sybil(self):
        # marginal of the victim's image is uniform over the five vertices
        dist = enumerate_consistent_mappings(complete_graph(5), SINGLE_EDGE_KNOWLEDGE, [0], [1])
        assert len(dist.mappings) == 20
        p = victim_success_probability(dist, list(range(5)), 1)
        assert p == Fraction(1, 5)

    def test_not_a_victim(self):
        dist = enumerate_consistent_mappings(complete_graph(4), SINGLE_EDGE_KNOWLEDGE, [0], [1])
        with pytest.raises(GraphInputError):
            victim_success_probability(dist, list(range(4)), 0)

    def test_empty_support_probability_zero(self):
        # knowledge demands an edge but the host graph has none
        host = Graph(3, [])
        dist = enumerate_consistent_mappings(host, SINGLE_EDGE_KNOWLEDGE, [0], [1])
        assert len(dist.mappings) == 0
        assert victim_success_probability(dist, [0, 1, 2], 1) == 0


class TestMaxAttack:
    def test_k4_one_sybil(self):
        assert max_attack_success(complete_graph(4), 1) == Fraction(1, 4)

    def test_vertex_transitive_no_sybils(self):
        assert max_attack_success(cycle(5), 0) == Fraction(1, 5)

    def test_barbell_two_sybils_bounded(self):
        assert max_attack_success(uneven_barbell(), 2) <= Fraction(1, 2)

    def test_l_zero_complete(self):
        assert max_attack_success(complete_graph(6), 0) == Fraction(1, 6)


class TestTheoremOneBound:
    @pytest.mark.parametrize("k", [2, 3])
    def test_k_symmetric_publication_caps_probability(self, k):
        from anonlab.kmatch import kmatch
        from anonlab.privacy import is_k_symmetric

        for seed in range(6):
            rng = graph_rng(900 + k, seed)
            g = er_graph(GeneratorSpec(kind="er", n=4, rng_seed=seed, density=0.5))
            env = inject_sybils(g, 2, [0, 2], rng)
            km = kmatch(env.g_plus, k, rng_seed=seed)
            pub, phi = pseudonymize(km.graph_out, rng)
            assert is_k_symmetric(pub, k)
            know, _ = env.knowledge()
            dist = enumerate_consistent_mappings(pub, know, env.sybils, env.victims)
            for u in env.victims:
                assert victim_success_probability(dist, phi, u) <= Fraction(1, k)


class TestOracleAttackConsistency:
    def test_unique_pattern_gives_both_probability_one(self):
        # when the attacker pattern occurs exactly once in the published
        # graph, the oracle pins every victim and the search scores 1
        checked = 0
        for seed in range(40):
            rng = graph_rng(321, seed)
            g = er_graph(GeneratorSpec(kind="er", n=8, rng_seed=seed, density=0.35))
            victims = sorted(int(v) for v in rng.choice(8, size=3, replace=False))
            env = inject_sybils(g, 4, victims, rng)
            pub, phi = pseudonymize(env.g_plus, rng)
            know, _ = env.knowledge()
            dist = enumerate_consistent_mappings(pub, know, env.sybils, env.victims)
            if len(dist.mappings) != 1:
                continue
            checked += 1
            for u in env.victims:
                assert victim_success_probability(dist, phi, u) == 1
            res = reidentify(pub, env, AttackParams(delta_max=0))
            assert success_rate(res, phi) == 1
        assert checked >= 5

    def test_self_mapping_count_identity_floor(self):
        rng = graph_rng(5, 5)
        env = inject_sybils(Graph(6, [(0, 1)]), 3, [2, 3], rng)
        know, _ = env.knowledge()
        assert pattern_self_mapping_count(know, 3) >= 1

import itertools

import pytest

from anonlab.automorphism import automorphism_orbits
from anonlab.generators import GeneratorSpec, er_graph
from anonlab.graph import Graph, GraphInputError
from anonlab.kmatch import (
    KMatchResult,
    VertexAlignmentTable,
    build_vat,
    edge_copy_closure,
    kmatch,
    partition_vertices,
    verify_kmatch_conditions,
)
from anonlab.privacy import is_k_symmetric

# the published worked example: a 3-column table over nine vertices.
# Labels A..F map to 0..5, probe vertices 1,2,3 map to 6,7,8.
WORKED_TABLE = VertexAlignmentTable(rows=((6, 5, 3), (2, 0, 1), (7, 8, 4)), dummies=frozenset())
A, B, C, D, E, F = range(6)
P1, P2, P3 = 6, 7, 8


class TestVAT:
    def test_worked_table_is_valid(self):
        WORKED_TABLE.validate(9)

    def test_gamma_shift_reads_rows(self):
        g1 = WORKED_TABLE.gamma(1)
        assert g1[A] == B and g1[B] == C and g1[C] == A
        assert g1[P1] == F and g1[F] == D and g1[D] == P1
        g2 = WORKED_TABLE.gamma(2)
        assert g2[A] == C and g2[B] == A

    def test_gamma_conditions_structurally(self):
        k = WORKED_TABLE.k
        total = WORKED_TABLE.total
        for t in range(1, k):
            gt = WORKED_TABLE.gamma(t)
            assert all(gt[v] != v for v in range(total))
        for i, j in itertools.combinations(range(1, k), 2):
            gi, gj = WORKED_TABLE.gamma(i), WORKED_TABLE.gamma(j)
            assert all(gi[v] != gj[v] for v in range(total))
        for i in range(1, k):
            for j in range(i, k):
                gi, gj, gij = (WORKED_TABLE.gamma(t) for t in (i, j, i + j))
                assert all(gij[v] == gi[gj[v]] == gj[gi[v]] for v in range(total))

    def test_rejects_non_bijection(self):
        bad = VertexAlignmentTable(rows=((0, 1), (1, 2)), dummies=frozenset())
        with pytest.raises(GraphInputError):
            bad.validate(4)

    def test_rejects_small_k(self):
        with pytest.raises(GraphInputError):
            build_vat(Graph(4, []), 1, 0)

    def test_padding_arithmetic(self):
        vat = build_vat(Graph(7, [(0, 1)]), 3, 0)
        assert vat.r == 3 and vat.k == 3
        assert sorted(vat.dummies) == [7, 8]

    def test_empty_graph_two_columns(self):
        vat = build_vat(Graph(4, []), 2, 0)
        assert vat.r == 2 and vat.k == 2 and not vat.dummies


class TestClosure:
    def test_edge_ab_forces_ca(self):
        res = edge_copy_closure(Graph(9, [(A, B)]), WORKED_TABLE)
        assert res.graph_out.has_edge(C, A)
        assert res.graph_out.has_edge(B, C)
        assert res.graph_out.edge_count == 3

    def test_edge_be_forces_a3(self):
        res = edge_copy_closure(Graph(9, [(B, E)]), WORKED_TABLE)
        assert res.graph_out.has_edge(A, P3)
        assert res.graph_out.has_edge(C, P2)

    def test_path_mirror_adds_nothing(self):
        p4 = Graph(4, [(0, 1), (1, 2), (2, 3)])
        vat = VertexAlignmentTable(rows=((0, 3), (1, 2)), dummies=frozenset())
        assert edge_copy_closure(p4, vat).added_edges == ()

    def test_idempotent(self):
        g = er_graph(GeneratorSpec(kind="er", n=12, rng_seed=5, density=0.4))
        vat = build_vat(g, 3, 7)
        first = edge_copy_closure(g, vat)
        second = edge_copy_closure(first.graph_out, vat)
        assert second.added_edges == ()
        assert second.graph_out == first.graph_out

    def test_deterministic_for_fixed_table(self):
        g = er_graph(GeneratorSpec(kind="er", n=10, rng_seed=8, density=0.5))
        vat = build_vat(g, 2, 3)
        assert edge_copy_closure(g, vat).graph_out == edge_copy_closure(g, vat).graph_out

    def test_output_is_supergraph(self):
        g = er_graph(GeneratorSpec(kind="er", n=11, rng_seed=2, density=0.3))
        res = kmatch(g, 3, 0)
        assert g.edges <= res.graph_out.edges
        assert res.graph_out.n >= g.n

    def test_wrong_order_rejected(self):
        with pytest.raises(GraphInputError):
            edge_copy_closure(Graph(5, []), WORKED_TABLE)


class TestKMatch:
    @pytest.mark.parametrize("k", [2, 3, 5])
    def test_output_k_symmetric(self, k):
        g = er_graph(GeneratorSpec(kind="er", n=17, rng_seed=40 + k, density=0.3))
        res = kmatch(g, k, rng_seed=k)
        assert is_k_symmetric(res.graph_out, k)

    def test_orbit_sizes_via_independent_engine(self):
        g = er_graph(GeneratorSpec(kind="er", n=14, rng_seed=3, density=0.4))
        res = kmatch(g, 3, rng_seed=1)
        assert automorphism_orbits(res.graph_out).min_block_size >= 3

    def test_already_symmetric_empty_graph(self):
        res = kmatch(Graph(6, []), 2, 0)
        assert res.added_edges == ()

    def test_conditions_verify(self):
        g = er_graph(GeneratorSpec(kind="er", n=13, rng_seed=9, density=0.35))
        res = kmatch(g, 3, rng_seed=2)
        ok, violations = verify_kmatch_conditions(res)
        assert ok and not violations

    def test_corrupted_result_reported(self):
        g = er_graph(GeneratorSpec(kind="er", n=13, rng_seed=9, density=0.35))
        res = kmatch(g, 3, rng_seed=2)
        copied = sorted(res.added_edges)[0]
        pruned = Graph(res.graph_out.n, res.graph_out.edges - {copied})
        broken = KMatchResult(
            graph_out=pruned, vat=res.vat, added_edges=res.added_edges,
            gammas=res.gammas, original_n=res.original_n,
        )
        ok, violations = verify_kmatch_conditions(broken)
        assert not ok
        assert any("shift" in v for v in violations)


class TestPartitioner:
    def test_sizes_balanced(self):
        g = er_graph(GeneratorSpec(kind="er", n=50, rng_seed=12, density=0.15))
        import numpy as np

        parts = partition_vertices(g, 4, np.random.Generator(np.random.Philox(0)))
        sizes = sorted(len(p) for p in parts)
        assert sum(sizes) == 50
        assert max(sizes) <= 13  # ceil(50/4)

    def test_covers_all_vertices(self):
        g = er_graph(GeneratorSpec(kind="er", n=23, rng_seed=1, density=0.3))
        import numpy as np

        parts = partition_vertices(g, 3, np.random.Generator(np.random.Philox(1)))
        assert sorted(v for p in parts for v in p) == list(range(23))

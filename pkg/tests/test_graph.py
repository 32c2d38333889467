import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anonlab.graph import (
    EdgeListParseError,
    Graph,
    GraphInputError,
    induced_subgraph,
    load_edge_list,
    save_edge_list,
)


def complete(n):
    return Graph(n, ((i, j) for i in range(n) for j in range(i + 1, n)))


@st.composite
def graphs(draw, max_n=12):
    n = draw(st.integers(min_value=0, max_value=max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph(n, edges)


class TestConstruction:
    def test_rejects_self_loop(self):
        with pytest.raises(GraphInputError):
            Graph(3, [(0, 0)])

    def test_rejects_out_of_range(self):
        with pytest.raises(GraphInputError):
            Graph(3, [(0, 3)])

    def test_parallel_edges_collapse(self):
        g = Graph(3, [(0, 1), (1, 0), (0, 1)])
        assert g.edge_count == 1

    def test_neighbors_sorted(self):
        g = Graph(4, [(2, 0), (0, 3), (0, 1)])
        assert g.neighbors(0) == (1, 2, 3)


class TestDegree:
    def test_complete_graph(self):
        g = complete(4)
        assert all(g.degree(v) == 3 for v in range(4))

    def test_double_broom_centre(self):
        from anonlab.fixtures import double_broom

        assert double_broom().degree(6) == 2

    def test_shared_bowtie_vertex(self):
        # centre of the two triangles touches all four others
        from anonlab.fixtures import bowtie

        assert bowtie().degree(2) == 4

    def test_out_of_range(self):
        with pytest.raises(GraphInputError):
            complete(4).degree(4)

    @given(graphs())
    def test_handshake(self, g):
        assert sum(g.degree(v) for v in range(g.n)) == 2 * g.edge_count


class TestInducedSubgraph:
    def test_complete_hereditary(self):
        sub, back = induced_subgraph(complete(4), [0, 2, 3])
        assert sub == complete(3)
        assert back == (0, 2, 3)

    def test_triangle_block_of_barbell(self):
        from anonlab.fixtures import uneven_barbell

        sub, back = induced_subgraph(uneven_barbell(), [4, 5, 6])
        assert sub == complete(3)

    def test_empty_set(self):
        sub, back = induced_subgraph(complete(4), [])
        assert sub.n == 0 and back == ()

    def test_invalid_member(self):
        with pytest.raises(GraphInputError):
            induced_subgraph(complete(3), [0, 5])

    @given(graphs())
    def test_full_set_is_identity(self, g):
        sub, back = induced_subgraph(g, range(g.n))
        assert sub == g


class TestEdgeListIO:
    def test_path_graph_literal(self, tmp_path):
        p = tmp_path / "p3.el"
        p.write_text("3\n0 1\n1 2\n")
        assert load_edge_list(p) == Graph(3, [(0, 1), (1, 2)])

    def test_self_loop_rejected(self, tmp_path):
        p = tmp_path / "bad.el"
        p.write_text("2\n0 0\n")
        with pytest.raises(EdgeListParseError) as exc:
            load_edge_list(p)
        assert exc.value.lineno == 2

    def test_duplicate_rejected(self, tmp_path):
        p = tmp_path / "dup.el"
        p.write_text("3\n0 1\n0 1\n")
        with pytest.raises(EdgeListParseError):
            load_edge_list(p)

    def test_unordered_endpoints_rejected(self, tmp_path):
        p = tmp_path / "rev.el"
        p.write_text("3\n1 0\n")
        with pytest.raises(EdgeListParseError):
            load_edge_list(p)

    def test_comments_and_blanks_skipped(self, tmp_path):
        p = tmp_path / "c.el"
        p.write_text("# a comment\n3\n\n0 1\n")
        assert load_edge_list(p).edge_count == 1

    @given(g=graphs())
    @settings(max_examples=40)
    def test_round_trip(self, g, tmp_path_factory):
        p = tmp_path_factory.mktemp("io") / "g.el"
        save_edge_list(g, p)
        assert load_edge_list(p) == g

    def test_relabel_bijection_required(self):
        with pytest.raises(GraphInputError):
            complete(3).relabel([0, 0, 1])

"""Tests for the graph core: construction, pair ranking, cliques and edge-list IO."""

from itertools import combinations
from math import comb

import networkx as nx
import pytest
from hypothesis import given, settings

from tfree_lab.errors import InvalidInputError
from tfree_lab.graph import (
    build_graph,
    common_neighborhood,
    complete_graph,
    cycle_graph,
    edge_bits,
    edge_count,
    empty_graph,
    enumerate_cliques,
    format_edge_list,
    graph_from_bits,
    has_clique,
    is_clique_free,
    is_triangle_free,
    load_graph,
    mask_of,
    pair_from_index,
    pair_index,
    path_graph,
    read_edge_list,
    save_graph,
    vertices_of,
)

from .strategies import graphs, to_networkx


class TestBuildGraph:
    """Tests for build_graph and the standard constructors."""

    def test_edges_are_sorted_and_counted(self):
        """Test edges come back normalized and sorted."""
        graph = build_graph(4, [(3, 1), (4, 2), (1, 2)])
        assert graph.edges() == [(1, 2), (1, 3), (2, 4)]
        assert graph.m == 3
        assert graph.degree(1) == 2
        assert graph.neighbors(2) == frozenset({1, 4})

    def test_loop_rejected(self):
        """Test a loop names the offending pair."""
        with pytest.raises(InvalidInputError, match=r"\(2, 2\)"):
            build_graph(3, [(2, 2)])

    def test_duplicate_rejected(self):
        """Test the same pair given in both orders is a duplicate."""
        with pytest.raises(InvalidInputError, match="duplicate"):
            build_graph(3, [(1, 2), (2, 1)])

    def test_out_of_range_rejected(self):
        """Test vertices must lie in 1..n."""
        with pytest.raises(InvalidInputError, match="outside"):
            build_graph(3, [(1, 4)])
        with pytest.raises(InvalidInputError):
            build_graph(0, [])

    def test_invalid_input_is_a_value_error(self):
        """Test callers catching ValueError still see invalid input."""
        with pytest.raises(ValueError):
            build_graph(2, [(1, 1)])

    def test_constructors(self):
        """Test K_n, C_n, P_n and the empty graph."""
        assert complete_graph(5).m == 10
        assert cycle_graph(5).edges() == [(1, 2), (1, 5), (2, 3), (3, 4), (4, 5)]
        assert path_graph(4).edges() == [(1, 2), (2, 3), (3, 4)]
        assert empty_graph(3).m == 0
        with pytest.raises(InvalidInputError):
            cycle_graph(2)

    def test_with_and_without_edges(self):
        """Test adding a present edge or removing a missing one fails."""
        graph = path_graph(3)
        closed = graph.with_edges([(1, 3)])
        assert closed.m == 3
        assert closed.without_edges([(2, 3)]).edges() == [(1, 2), (1, 3)]
        with pytest.raises(InvalidInputError, match="already present"):
            graph.with_edges([(2, 1)])
        with pytest.raises(InvalidInputError, match="not present"):
            graph.without_edges([(1, 3)])

    def test_subgraph_and_non_edges(self):
        """Test the subgraph relation and the non-edge listing."""
        assert path_graph(4).is_subgraph_of(complete_graph(4))
        assert not complete_graph(4).is_subgraph_of(path_graph(4))
        assert path_graph(3).non_edges() == [(1, 3)]


class TestPairIndex:
    """Tests for the row-major ranking of pairs."""

    def test_row_major_order(self):
        """Test pairs are ranked 12, 13, ..., 1n, 23, ..."""
        n = 5
        pairs = list(combinations(range(1, n + 1), 2))
        assert [pair_index(u, v, n) for u, v in pairs] == list(range(comb(n, 2)))
        assert pair_index(4, 2, n) == pair_index(2, 4, n)

    def test_inverse(self):
        """Test pair_from_index undoes pair_index."""
        for n in range(2, 8):
            for k in range(comb(n, 2)):
                u, v = pair_from_index(k, n)
                assert pair_index(u, v, n) == k

    def test_masks(self):
        """Test vertex masks encode vertex v as bit v-1."""
        assert mask_of([1, 3], 4) == 0b101
        assert vertices_of(0b1010) == (2, 4)
        with pytest.raises(InvalidInputError):
            mask_of([5], 4)

    @given(graphs(max_n=7))
    def test_edge_bits_round_trip(self, graph):
        """Test the pair bitmask encodes the edge set exactly."""
        assert graph_from_bits(graph.n, edge_bits(graph)) == graph


class TestEdgeCount:
    """Tests for e(G;X) and e(G;X,Y)."""

    def test_inside(self, k4):
        """Test edges inside a set."""
        assert edge_count(k4, [1, 2]) == 1
        assert edge_count(k4, [1, 2, 3]) == 3

    def test_between_overlapping_sets(self, k4):
        """Test pairs inside the overlap are counted once."""
        assert edge_count(k4, [1, 2], [2, 3]) == 3
        assert edge_count(k4, [1, 2], [3, 4]) == 4


class TestCliques:
    """Tests for clique enumeration."""

    def test_listing_is_lexicographic_and_truncated(self, k4):
        """Test the first cliques in order and the truncation flag."""
        listing = enumerate_cliques(k4, 3, limit=2)
        assert listing.cliques == ((1, 2, 3), (1, 2, 4))
        assert listing.truncated
        assert not listing.certifies_free

    def test_free_certificate(self, c5):
        """Test an empty untruncated listing certifies freeness."""
        listing = enumerate_cliques(c5, 3, limit=10)
        assert listing.cliques == ()
        assert listing.certifies_free
        assert is_triangle_free(c5)

    def test_bad_arguments(self, k4):
        """Test clique size and limit are validated."""
        with pytest.raises(InvalidInputError):
            enumerate_cliques(k4, 1, limit=1)
        with pytest.raises(InvalidInputError):
            enumerate_cliques(k4, 3, limit=0)

    def test_clique_free(self, k4):
        """Test K_l containment on K4."""
        assert has_clique(k4, 4)
        assert is_clique_free(k4, 5)

    @settings(max_examples=60)
    @given(graphs(max_n=8))
    def test_triangles_match_networkx(self, graph):
        """Test the triangle listing agrees with networkx."""
        expected = sorted(
            tuple(sorted(c)) for c in nx.enumerate_all_cliques(to_networkx(graph)) if len(c) == 3
        )
        listing = enumerate_cliques(graph, 3, limit=10_000)
        assert list(listing.cliques) == expected

    def test_common_neighborhood(self, k4):
        """Test the common neighbourhood restricted to a target set."""
        assert common_neighborhood(k4, (1, 2), [3, 4]) == 2
        assert common_neighborhood(path_graph(3), (1, 3), [1, 2, 3]) == 1
        with pytest.raises(InvalidInputError):
            common_neighborhood(k4, (1, 1), [3])
        with pytest.raises(InvalidInputError, match="outside 1..4"):
            common_neighborhood(k4, (1, 5), [3])


class TestEdgeList:
    """Tests for the edge-list text format."""

    def test_canonical_output(self, c5):
        """Test the header and sorted pair lines."""
        assert format_edge_list(c5) == "5 5\n1 2\n1 5\n2 3\n3 4\n4 5\n"

    def test_read_accepts_any_order(self):
        """Test parsing is insensitive to line order and pair orientation."""
        graph = read_edge_list("3 2\n3 2\n2 1\n")
        assert graph.edges() == [(1, 2), (2, 3)]

    def test_wrong_count_rejected(self):
        """Test the header's edge count is enforced."""
        with pytest.raises(InvalidInputError, match="announces 2"):
            read_edge_list("3 2\n1 2\n")
        with pytest.raises(InvalidInputError):
            read_edge_list("")

    def test_file_round_trip(self, tmp_path, c5):
        """Test save_graph then load_graph."""
        path = tmp_path / "c5.txt"
        save_graph(c5, path)
        assert load_graph(path) == c5

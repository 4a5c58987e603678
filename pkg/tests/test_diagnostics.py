"""Tests for horizontal/missing degrees, chords, exceptional sets and density checks."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tfree_lab.cuts import bipartition_from_mask, cross_edges, inside_edges, make_partition
from tfree_lab.diagnostics import (
    count_chords,
    degree_profile,
    density_deviation,
    exceptional_sets,
    find_density_violation,
    horizontal_excess,
    horizontal_swap,
    neighborhood_violations,
)
from tfree_lab.errors import InstanceTooLargeError, InvalidInputError
from tfree_lab.graph import build_graph, complete_graph, empty_graph, graph_from_pairs

from .strategies import graphs


@st.composite
def subgraph_instances(draw):
    """G, a subgraph T of G and a bipartition."""
    graph = draw(graphs(min_n=2, max_n=7))
    kept = draw(st.lists(st.booleans(), min_size=graph.m, max_size=graph.m))
    sub = graph_from_pairs(graph.n, [e for e, keep in zip(graph.edges(), kept) if keep])
    partition = bipartition_from_mask(draw(st.integers(0, (1 << graph.n) - 1)), graph.n)
    return graph, sub, partition


def _complete_bipartite_cut(n):
    half = n // 2
    graph = complete_graph(n)
    partition = make_partition([range(1, half + 1), range(half + 1, n + 1)], n)
    return graph, partition, graph_from_pairs(n, cross_edges(graph, partition))


class TestDegreeProfile:
    """Tests for d_H and d_M."""

    def test_triangle(self, triangle, split_12_3):
        """Test T = {12, 13} inside K3."""
        profile = degree_profile(triangle, build_graph(3, [(1, 2), (1, 3)]), split_12_3)
        assert profile.horizontal == (1, 1, 0)
        assert profile.missing == (0, 1, 1)
        assert profile.horizontal_edges == 1
        assert profile.missing_edges == 1

    def test_not_a_subgraph(self, split_12_3):
        """Test T must be a subgraph of G."""
        with pytest.raises(InvalidInputError):
            degree_profile(empty_graph(3), build_graph(3, [(1, 2)]), split_12_3)

    @given(subgraph_instances())
    def test_sums(self, instance):
        """Test both degree sums are even and count the right edges."""
        graph, sub, partition = instance
        profile = degree_profile(graph, sub, partition)
        assert sum(profile.missing) % 2 == 0
        assert profile.horizontal_edges == len(inside_edges(sub, partition))
        assert profile.missing_edges == len(cross_edges(graph, partition)) - len(
            cross_edges(sub, partition)
        )


class TestChords:
    """Tests for chord counting."""

    def test_bipartition(self, triangle, split_12_3):
        """Test the single chord (2, 1, 3) of T = {12, 13} in K3."""
        sub = build_graph(3, [(1, 2), (1, 3)])
        assert count_chords(triangle, sub, split_12_3, [1, 2], [3]) == 1
        assert count_chords(triangle, sub, split_12_3, [], [3]) == 0

    def test_restrictions(self, triangle, split_12_3):
        """Test restrictions must each lie in one part, and in different parts."""
        with pytest.raises(InvalidInputError, match="different parts"):
            count_chords(triangle, triangle, split_12_3, [1], [2])
        with pytest.raises(InvalidInputError, match="single part"):
            count_chords(triangle, triangle, split_12_3, [1, 3], [3])

    def test_three_parts(self, k4):
        """Test a chord of a 3-partition needs one missing pair besides the horizontal edge."""
        partition = make_partition([[1, 2], [3], [4]], 4)
        sub = k4.without_edges([(1, 3)])
        assert count_chords(k4, sub, partition, [1, 2], [3, 4]) == 1
        assert count_chords(k4, k4, partition, [1, 2], [3, 4]) == 0


class TestNeighborhoodViolations:
    """Tests for k-tuples with atypical common neighbourhoods."""

    def test_single_vertices(self, triangle):
        """Test degrees into U against (1±c)p|U|."""
        assert neighborhood_violations(triangle, [1, 2, 3], 1, 0.5, 1.0).clean
        report = neighborhood_violations(triangle, [1, 2, 3], 1, 0.1, 1.0)
        assert report.violating == ((1,), (2,), (3,))
        assert report.cover == frozenset({1, 2, 3})

    def test_pairs_and_greedy_cover(self, k4):
        """Test every pair of K4 violates and the cover picks smallest labels on ties."""
        report = neighborhood_violations(k4, [1, 2, 3, 4], 2, 0.1, 1.0)
        assert len(report.violating) == 6
        assert report.cover == frozenset({1, 2, 3})

    def test_invalid(self, k4):
        """Test k, c and p ranges."""
        with pytest.raises(InvalidInputError):
            neighborhood_violations(k4, [1], 0, 0.5, 0.5)
        with pytest.raises(InvalidInputError):
            neighborhood_violations(k4, [1], 1, 1.0, 0.5)
        with pytest.raises(InvalidInputError):
            neighborhood_violations(k4, [1], 1, 0.5, 0.0)


class TestExceptionalSets:
    """Tests for X1, X2 and X3."""

    def test_dense_cut_is_clean(self):
        """Test the complete bipartite cut of K24 with p=1 has no exceptional vertex."""
        graph, partition, sub = _complete_bipartite_cut(24)
        sets = exceptional_sets(graph, partition, sub, 0.1, 1.0)
        assert not sets.all_x1
        assert not sets.all_x2
        assert not sets.all_x3

    def test_horizontal_and_missing_degrees(self):
        """Test a vertex with three horizontal edges and one missing all its cross edges."""
        graph, partition, sub = _complete_bipartite_cut(24)
        sub = sub.with_edges([(1, 2), (1, 3), (1, 4)])
        sub = sub.without_edges([(v, 24) for v in range(1, 13)])
        sets = exceptional_sets(graph, partition, sub, 0.1, 1.0)
        assert sets.x2 == (frozenset({1}), frozenset())
        assert sets.x3 == (frozenset(), frozenset({24}))

    def test_sparse_graph_is_all_x1(self):
        """Test an edgeless graph is far from p|U| everywhere and X1 takes priority."""
        graph = empty_graph(8)
        partition = make_partition([[1, 2, 3, 4], [5, 6, 7, 8]], 8)
        sets = exceptional_sets(graph, partition, graph, 0.1, 0.5)
        assert sets.all_x1 == frozenset(range(1, 9))
        assert not sets.all_x2
        assert not sets.all_x3

    def test_small_parts_skipped(self):
        """Test a part below n/(2l) vertices does not feed X1."""
        graph = complete_graph(8)
        partition = make_partition([[1], range(2, 9)], 8)
        sets = exceptional_sets(graph, partition, graph, 0.1, 0.9)
        assert not sets.all_x1
        assert sets.x2 == (frozenset(), frozenset(range(2, 9)))

    def test_invalid(self, triangle, split_12_3):
        """Test eps and p ranges."""
        with pytest.raises(InvalidInputError):
            exceptional_sets(triangle, split_12_3, triangle, 0.0, 0.5)
        with pytest.raises(InvalidInputError):
            exceptional_sets(triangle, split_12_3, triangle, 0.1, 1.5)


class TestHorizontalSwap:
    """Tests for trading horizontal edges for missing ones."""

    def test_improving_swap(self, k4):
        """Test {12, 13, 24} in K4 swaps to the 4-cycle across {1,2}|{3,4}."""
        partition = make_partition([[1, 2], [3, 4]], 4)
        outcome = horizontal_swap(k4, build_graph(4, [(1, 2), (1, 3), (2, 4)]), partition)
        assert outcome.before == 3
        assert outcome.after == 4
        assert outcome.improves

    def test_neutral_swap(self, triangle, split_12_3):
        """Test a swap of equal size does not improve."""
        outcome = horizontal_swap(triangle, build_graph(3, [(1, 2), (1, 3)]), split_12_3)
        assert outcome.after == 2
        assert outcome.triangle_free
        assert not outcome.improves


class TestHorizontalExcess:
    """Tests for edges left inside the parts of the best partition."""

    def test_examples(self, c5, triangle):
        """Test C5 keeps one edge inside, K3 none with three parts."""
        assert horizontal_excess(c5) == 1
        assert horizontal_excess(triangle, 3) == 0


class TestDensity:
    """Tests for edge-density deviations between disjoint sets."""

    def test_deviation(self, k4):
        """Test |e(X,Y) - p|X||Y||."""
        assert density_deviation(k4, [1, 2], [3, 4], 0.5) == pytest.approx(2.0)
        with pytest.raises(InvalidInputError):
            density_deviation(k4, [1, 2], [2, 3], 0.5)

    def test_violation_search(self, k4):
        """Test the first violating pair, a dense graph with none, and the guards."""
        assert find_density_violation(empty_graph(4), 0.5, min_size=1) == (
            frozenset({1}),
            frozenset({4}),
        )
        assert find_density_violation(k4, 1.0, min_size=1) is None
        assert find_density_violation(empty_graph(4), 0.5) is None
        with pytest.raises(InstanceTooLargeError):
            find_density_violation(empty_graph(11), 0.5)

"""Pytest configuration and shared fixtures."""

import pytest

from tfree_lab.config import SolverBudgets
from tfree_lab.cuts import make_partition
from tfree_lab.graph import build_graph, complete_graph, cycle_graph


@pytest.fixture
def triangle():
    """K3."""
    return complete_graph(3)


@pytest.fixture
def c5():
    """The 5-cycle, the smallest graph whose maximum triangle-free subgraph is not bipartite."""
    return cycle_graph(5)


@pytest.fixture
def k4():
    """K4."""
    return complete_graph(4)


@pytest.fixture
def octahedron():
    """K6 minus a perfect matching."""
    return complete_graph(6).without_edges([(1, 2), (3, 4), (5, 6)])


@pytest.fixture
def bowtie():
    """Two triangles sharing vertex 3."""
    return build_graph(5, [(1, 2), (1, 3), (2, 3), (3, 4), (3, 5), (4, 5)])


@pytest.fixture
def split_12_3():
    """The bipartition {1,2} | {3}."""
    return make_partition([[1, 2], [3]], 3)


@pytest.fixture
def tight_budgets():
    """Budgets small enough to trip every guard on tiny instances."""
    return SolverBudgets(
        maxcut_max_n=6,
        maxcut_enumeration_below_n=4,
        maxcut_max_assignment_bits=6.0,
        event_max_n=4,
        tfree_max_n=4,
        tfree_max_m=4,
        tfree_node_budget=1,
        hitting_set_node_budget=1,
        coloring_max_n=4,
        fkg_max_n=3,
        packing_exact_max_candidates=2,
        rejection_max_n=4,
        witness_limit=2,
    )

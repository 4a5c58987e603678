"""Perturbation events of a partition: E, its split into E1 and E2, and d-perturbations."""

import logging
from collections.abc import Callable, Iterable
from dataclasses import dataclass

from .config import DEFAULT_BUDGETS, SolverBudgets
from .cuts import (
    Partition,
    cut_size,
    iter_bipartition_cuts,
    iter_partition_cuts,
    mask_distance,
    max_cut,
    partition_distance,
)
from .errors import BudgetExceededError, InstanceTooLargeError, InvalidInputError
from .extremal import HittingSetSolution, clique_edge_masks, min_hitting_set
from .graph import Edge, Graph, graph_from_pairs, has_clique, normalize_edge

logger = logging.getLogger(__name__)

GraphEvent = Callable[[Graph], bool]


def _check_partition(graph: Graph, partition: Partition) -> None:
    if partition.n != graph.n:
        raise InvalidInputError(
            f"partition of {partition.n} vertices used with a graph on {graph.n}"
        )


def _check_added(
    graph: Graph, partition: Partition, added: Iterable[Edge], require_subgraph: bool
) -> list[Edge]:
    _check_partition(graph, partition)
    labels = partition.assignment()
    out = []
    for u, v in added:
        if not (1 <= u <= graph.n and 1 <= v <= graph.n) or u == v:
            raise InvalidInputError(f"edge ({u}, {v}) is not a pair of distinct vertices")
        if labels[u - 1] != labels[v - 1]:
            raise InvalidInputError(f"edge ({u}, {v}) crosses the partition")
        if require_subgraph and not graph.has_edge(u, v):
            raise InvalidInputError(f"edge ({u}, {v}) is not an edge of the graph")
        out.append(normalize_edge(u, v))
    if len(set(out)) != len(out):
        raise InvalidInputError("added edges repeat a pair")
    return sorted(out)


def min_cross_deletions(
    graph: Graph,
    partition: Partition,
    added: Iterable[Edge],
    require_subgraph: bool = True,
    budgets: SolverBudgets = DEFAULT_BUDGETS,
) -> HittingSetSolution:
    """Smallest X ⊆ E(G;Π) such that (E(G;Π) \\ X) ∪ S is triangle-free.

    Only cross edges may be deleted; a triangle made of edges of S alone makes the
    problem infeasible.

    Raises:
        InvalidInputError: If S has an edge crossing Π, or (with ``require_subgraph``)
            an edge missing from G.
    """
    extra = _check_added(graph, partition, added, require_subgraph)
    labels = partition.assignment()
    cross = [(u, v) for u, v in graph.edges() if labels[u - 1] != labels[v - 1]]
    host = graph_from_pairs(graph.n, cross + extra)
    index = {e: i for i, e in enumerate(cross)}
    triangles = clique_edge_masks(host, 3, index)
    return min_hitting_set(triangles, node_budget=budgets.hitting_set_node_budget)


def _decide(solution: HittingSetSolution, allowed: int, what: str) -> bool:
    if allowed < 0:
        return False
    verdict = solution.decides_at_most(allowed)
    if verdict is None:
        raise BudgetExceededError(
            f"{what}: search stopped with the minimum between "
            f"{solution.lower_bound} and {solution.size}"
        )
    return verdict


@dataclass(frozen=True)
class PerturbationReport:
    """Both perturbation events for one (G, Π, S) with the quantities deciding them."""

    gap: int
    added: int
    min_deletions: int | None
    event_E: bool  # noqa: N815
    event_E2: bool  # noqa: N815

    def to_dict(self) -> dict[str, object]:
        """JSON form {event_E, event_E2, gap, ...}."""
        return {
            "event_E": self.event_E,
            "event_E2": self.event_E2,
            "gap": self.gap,
            "added": self.added,
            "min_deletions": self.min_deletions,
        }


def perturbation_report(
    graph: Graph,
    partition: Partition,
    added: Iterable[Edge],
    budgets: SolverBudgets = DEFAULT_BUDGETS,
) -> PerturbationReport:
    """Evaluate E and E2 together, sharing one hitting-set search."""
    extra = _check_added(graph, partition, added, True)
    solution = min_cross_deletions(graph, partition, extra, True, budgets)
    g = max_cut(graph, partition.ell, budgets).b_value - cut_size(graph, partition)
    return PerturbationReport(
        gap=g,
        added=len(extra),
        min_deletions=solution.size if solution.optimal else None,
        event_E=_decide(solution, len(extra) - g, "event E"),
        event_E2=_decide(solution, len(extra), "event E2"),
    )


def perturbation_event(
    graph: Graph,
    partition: Partition,
    added: Iterable[Edge],
    budgets: SolverBudgets = DEFAULT_BUDGETS,
) -> bool:
    """Event E: (E(G;Π) \\ X) ∪ S triangle-free for some X ⊆ E(G;Π), |S| - |X| >= gap(G;Π).

    Raises:
        InvalidInputError: If S is not a set of edges of G inside the parts of Π.
        BudgetExceededError: If the search budget leaves the answer open.
    """
    return perturbation_report(graph, partition, added, budgets).event_E


def event_E2(  # noqa: N802
    graph: Graph,
    partition: Partition,
    added: Iterable[Edge],
    require_subgraph: bool = True,
    budgets: SolverBudgets = DEFAULT_BUDGETS,
) -> bool:
    """Event E2: some X ⊆ E(G;Π) with |X| <= |S| makes (E(G;Π) \\ X) ∪ S triangle-free.

    With ``require_subgraph=False`` S may contain non-edges of G, which is how the
    event is read as a property of every graph on the lattice.
    """
    extra = _check_added(graph, partition, added, require_subgraph)
    solution = min_cross_deletions(graph, partition, extra, require_subgraph, budgets)
    return _decide(solution, len(extra), "event E2")


def event_E1(  # noqa: N802
    graph: Graph,
    partition: Partition,
    r0: int,
    s0: int,
    budgets: SolverBudgets = DEFAULT_BUDGETS,
) -> bool:
    """Event E1: gap(G;Π) <= r0, and Π' within distance s0 whenever |E(G;Π)| - |E(G;Π')| <= r0.

    Raises:
        InstanceTooLargeError: If n exceeds the enumeration guard.
    """
    _check_partition(graph, partition)
    if graph.n > budgets.event_max_n:
        raise InstanceTooLargeError(f"event E1 with n={graph.n}", f"n <= {budgets.event_max_n}")
    own = cut_size(graph, partition)
    if partition.ell == 2:
        base = partition.masks[0]
        cuts = list(iter_bipartition_cuts(graph))
        if max(cut for _, cut in cuts) - own > r0:
            return False
        return all(
            mask_distance(base, mask, graph.n) <= s0 for mask, cut in cuts if own - cut <= r0
        )
    listed = list(iter_partition_cuts(graph, partition.ell))
    if max(cut for _, cut in listed) - own > r0:
        return False
    return all(
        partition_distance(partition, other) <= s0 for other, cut in listed if own - cut <= r0
    )


def is_d_perturbation(graph: Graph, partition: Partition, candidate: Graph, d: int) -> bool:
    """Whether T is a triangle-free d-perturbation of the cut E(G;Π).

    That is, T is obtained from E(G;Π) by deleting cross edges and adding at most
    d edges of G that lie inside the parts.
    """
    _check_partition(graph, partition)
    if not candidate.is_subgraph_of(graph):
        return False
    crossing = cut_size(candidate, partition)
    if candidate.m - crossing > d:
        return False
    return not has_clique(candidate, 3)


def indicator_E1(  # noqa: N802
    partition: Partition, r0: int, s0: int, budgets: SolverBudgets = DEFAULT_BUDGETS
) -> GraphEvent:
    """The 0/1 function of E1 for a fixed (Π, r0, s0); increasing in the partition order."""

    def event(graph: Graph) -> bool:
        return event_E1(graph, partition, r0, s0, budgets)

    return event


def indicator_E2(  # noqa: N802
    partition: Partition, added: Iterable[Edge], budgets: SolverBudgets = DEFAULT_BUDGETS
) -> GraphEvent:
    """The 0/1 function of E2 for fixed (Π, S) on all graphs; decreasing in the partition order."""
    fixed = tuple(added)

    def event(graph: Graph) -> bool:
        return event_E2(graph, partition, fixed, require_subgraph=False, budgets=budgets)

    return event

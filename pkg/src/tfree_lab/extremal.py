"""Maximum K_ell-free subgraphs, k-colorability and edge-disjoint clique packings.

t(G) is computed as m minus a minimum edge set hitting every ell-clique. The
same hitting-set search decides the perturbation events in :mod:`.perturb`.
"""

import logging
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

from .config import DEFAULT_BUDGETS, SolverBudgets
from .cuts import Partition, max_cut, partition_from_assignment
from .errors import InstanceTooLargeError, InvalidInputError, SolverInvariantError
from .graph import Edge, Graph, has_clique, iter_clique_masks, mask_of, pair_index, vertices_of

logger = logging.getLogger(__name__)


class _BudgetHit(Exception):
    pass


class _Enough(Exception):
    pass


@dataclass(frozen=True)
class HittingSetSolution:
    """Result of a minimum hitting-set search over edge bitmasks.

    ``size`` is None when some clique has no deletable edge (nothing can hit it).
    When ``optimal`` is False the search ran out of nodes: ``size`` is the best
    hitting set found and ``lower_bound`` a proven bound below it.
    """

    size: Optional[int]
    optimal: bool
    lower_bound: int
    solutions: tuple[int, ...]
    truncated: bool
    nodes: int

    @property
    def feasible(self) -> bool:
        """Whether some edge set hits every clique."""
        return self.size is not None

    def decides_at_most(self, k: int) -> Optional[bool]:
        """Whether a hitting set of size <= k exists (None if the budget left it open)."""
        if self.size is None:
            return False
        if self.size <= k:
            return True
        if self.optimal or self.lower_bound > k:
            return False
        return None


MEMO_MAX_EDGES = 64


def greedy_packing(masks: Iterable[int]) -> int:
    """Count of masks taken in order whenever disjoint from those already taken."""
    used = 0
    count = 0
    for mask in masks:
        if not mask & used:
            used |= mask
            count += 1
    return count


def min_hitting_set(
    cliques: Sequence[int],
    incumbent: Optional[int] = None,
    node_budget: int = DEFAULT_BUDGETS.hitting_set_node_budget,
    witness_limit: int = 0,
    memoize: bool = True,
) -> HittingSetSolution:
    """Minimum set of edge bits meeting every mask in ``cliques``.

    Branches on the unhit clique with the fewest available edges; child i deletes
    the i-th edge and keeps the earlier ones, so every minimum set is reached once.
    Nodes are pruned with a greedy packing of edge-disjoint unhit cliques and, when
    the cliques span at most 64 edges, by the shallowest depth at which the same
    remaining cliques were already searched.

    Args:
        cliques: Bitmasks of the deletable edges of each clique.
        incumbent: A known hitting set; defaults to every deletable edge.
        node_budget: Search nodes per phase.
        witness_limit: How many minimum sets to enumerate (0 skips enumeration).
        memoize: Whether to remember searched subproblems.
    """
    if any(c == 0 for c in cliques):
        return HittingSetSolution(None, True, 0, (), False, 0)
    pool = sorted(set(cliques), key=lambda c: (c.bit_count(), c))
    universe = 0
    for c in pool:
        universe |= c
    if incumbent is None:
        incumbent = universe
    if any(c & incumbent == 0 for c in pool):
        raise InvalidInputError("incumbent does not hit every clique")

    def remaining(deleted: int, kept: int) -> list[int]:
        return [c & ~kept for c in pool if not c & deleted]

    memo: Optional[dict[tuple[int, ...], int]] = None
    if memoize and universe.bit_length() <= MEMO_MAX_EDGES:
        memo = {}
    nodes = 0
    best = incumbent.bit_count()
    best_set = incumbent
    root_bound = greedy_packing(pool)

    def improve(deleted: int, kept: int, depth: int) -> None:
        nonlocal nodes, best, best_set
        nodes += 1
        if nodes > node_budget:
            raise _BudgetHit
        unhit = remaining(deleted, kept)
        if not unhit:
            if depth < best:
                best, best_set = depth, deleted
            return
        if 0 in unhit:
            return
        if memo is not None:
            key = tuple(sorted(set(unhit)))
            seen = memo.get(key)
            if seen is not None and seen <= depth:
                return
            memo[key] = depth
        if depth + greedy_packing(unhit) >= best:
            return
        rest = min(unhit, key=int.bit_count)
        while rest:
            low = rest & -rest
            rest ^= low
            improve(deleted | low, kept, depth + 1)
            kept |= low

    try:
        improve(0, 0, 0)
    except _BudgetHit:
        logger.warning(
            "hitting-set search stopped after %d nodes: best %d, lower bound %d",
            node_budget,
            best,
            root_bound,
        )
        return HittingSetSolution(best, False, min(root_bound, best), (best_set,), True, nodes)

    found: list[int] = []
    truncated = False
    if witness_limit > 0:
        walked = 0

        def collect(deleted: int, kept: int, depth: int) -> None:
            nonlocal walked
            walked += 1
            if walked > node_budget:
                raise _BudgetHit
            unhit = remaining(deleted, kept)
            if not unhit:
                if depth == best:
                    found.append(deleted)
                    if len(found) > witness_limit:
                        raise _Enough
                return
            if 0 in unhit or depth + greedy_packing(unhit) > best:
                return
            rest = min(unhit, key=int.bit_count)
            while rest:
                low = rest & -rest
                rest ^= low
                collect(deleted | low, kept, depth + 1)
                kept |= low

        try:
            collect(0, 0, 0)
        except _Enough:
            truncated = True
            del found[witness_limit:]
        except _BudgetHit:
            logger.warning("witness enumeration stopped after %d nodes", node_budget)
            truncated = True
        nodes += walked
    logger.debug("minimum hitting set %d after %d nodes", best, nodes)
    return HittingSetSolution(best, True, best, tuple(found), truncated, nodes)


@dataclass(frozen=True)
class Colorability:
    """Verdict of :func:`is_k_partite` with its certificate."""

    k: int
    colorable: bool
    coloring: Optional[tuple[int, ...]] = None
    odd_cycle: Optional[tuple[int, ...]] = None

    def partition(self) -> Partition:
        """The coloring as a k-partition (k >= 2)."""
        if self.coloring is None:
            raise InvalidInputError("no coloring available")
        return partition_from_assignment(self.coloring, max(self.k, 2))


def _shortest_odd_cycle(graph: Graph) -> tuple[int, ...]:
    n = graph.n
    best: Optional[tuple[int, ...]] = None
    for root in range(n):
        dist = [-1] * n
        parent = [-1] * n
        dist[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in vertices_of(graph.rows[u]):
                w = v - 1
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue.append(w)
                elif dist[w] == dist[u] and u < w:
                    length = 2 * dist[u] + 1
                    if best is not None and length >= len(best):
                        continue
                    left = [u]
                    right = [w]
                    while left[-1] != right[-1]:
                        left.append(parent[left[-1]])
                        right.append(parent[right[-1]])
                    cycle = left + right[-2::-1]
                    best = tuple(x + 1 for x in cycle)
    assert best is not None
    return best


def is_k_partite(graph: Graph, k: int, budgets: SolverBudgets = DEFAULT_BUDGETS) -> Colorability:
    """Exact k-colorability with a coloring, or an odd cycle certificate when k = 2.

    Raises:
        InvalidInputError: If k < 1.
        InstanceTooLargeError: If k >= 3 and n exceeds the coloring guard.
    """
    if k < 1:
        raise InvalidInputError(f"k must be at least 1, got {k}")
    n = graph.n
    if k == 1:
        if graph.m:
            return Colorability(k, False)
        return Colorability(k, True, coloring=(0,) * n)
    if k == 2:
        colors = [-1] * n
        for start in range(n):
            if colors[start] >= 0:
                continue
            colors[start] = 0
            queue = deque([start])
            while queue:
                u = queue.popleft()
                for v in vertices_of(graph.rows[u]):
                    if colors[v - 1] < 0:
                        colors[v - 1] = 1 - colors[u]
                        queue.append(v - 1)
                    elif colors[v - 1] == colors[u]:
                        return Colorability(k, False, odd_cycle=_shortest_odd_cycle(graph))
        return Colorability(k, True, coloring=tuple(colors))
    if k >= n:
        return Colorability(k, True, coloring=tuple(range(n)))
    if n > budgets.coloring_max_n:
        raise InstanceTooLargeError(f"{k}-coloring with n={n}", f"n <= {budgets.coloring_max_n}")
    colors = [-1] * n
    order = sorted(range(n), key=lambda v: (-graph.rows[v].bit_count(), v))

    def assign(i: int, used: int) -> bool:
        if i == n:
            return True
        v = order[i]
        taken = {colors[u - 1] for u in vertices_of(graph.rows[v])}
        for c in range(min(used + 1, k)):
            if c in taken:
                continue
            colors[v] = c
            if assign(i + 1, max(used, c + 1)):
                return True
        colors[v] = -1
        return False

    if assign(0, 0):
        return Colorability(k, True, coloring=tuple(colors))
    return Colorability(k, False)


def clique_edge_masks(graph: Graph, ell: int, index: dict[Edge, int]) -> list[int]:
    """Every ell-clique as a bitmask over the edge numbering ``index`` (missing edges skipped)."""
    out = []
    for clique in iter_clique_masks(graph, ell):
        mask = 0
        for u, v in combinations(vertices_of(clique), 2):
            bit = index.get((u, v))
            if bit is not None:
                mask |= 1 << bit
        out.append(mask)
    return out


@dataclass(frozen=True)
class ExtremalSolution:
    """t(G) for K_ell-free subgraphs with enumerated maximum witnesses."""

    ell: int
    t_value: int
    optimal: bool
    witnesses: tuple[Graph, ...]
    truncated: bool
    all_k_partite: Optional[bool]
    non_partite_witness: Optional[Graph] = None
    nodes: int = 0

    @property
    def partial(self) -> bool:
        """The k-partite verdict covers only some maximum subgraphs."""
        return self.truncated or not self.optimal

    def to_dict(self) -> dict[str, object]:
        """JSON form {t, witnesses, all_k_partite, ...}."""
        return {
            "t": self.t_value,
            "l": self.ell,
            "optimal": self.optimal,
            "witnesses": [[list(e) for e in w.edges()] for w in self.witnesses],
            "truncated": self.truncated,
            "all_k_partite": self.all_k_partite,
            "partial": self.partial,
            "non_partite_witness": (
                None
                if self.non_partite_witness is None
                else [list(e) for e in self.non_partite_witness.edges()]
            ),
        }


def max_clique_free(
    graph: Graph,
    ell: int = 3,
    witness_limit: Optional[int] = None,
    budgets: SolverBudgets = DEFAULT_BUDGETS,
) -> ExtremalSolution:
    """Exact maximum number of edges of a K_ell-free subgraph, with witnesses.

    Every witness is checked K_ell-free and tested for (ell-1)-partiteness. When the
    node budget runs out the best subgraph found is returned with ``optimal=False``.

    Raises:
        InvalidInputError: If ell < 2.
        InstanceTooLargeError: If both n and m exceed the solver guard.
    """
    if ell < 2:
        raise InvalidInputError(f"clique size must be at least 2, got {ell}")
    if graph.n > budgets.tfree_max_n and graph.m > budgets.tfree_max_m:
        raise InstanceTooLargeError(
            f"K_{ell}-free subgraph with n={graph.n}, m={graph.m}",
            f"n <= {budgets.tfree_max_n} or m <= {budgets.tfree_max_m}",
        )
    limit = budgets.witness_limit if witness_limit is None else witness_limit
    edges = graph.edges()
    index = {e: i for i, e in enumerate(edges)}
    cliques = clique_edge_masks(graph, ell, index)

    b_value: Optional[int] = None
    incumbent: Optional[int] = None
    if ell >= 3 and cliques:
        try:
            survey = max_cut(graph, ell - 1, budgets)
        except InstanceTooLargeError:
            logger.debug("no cut incumbent for %s", graph)
        else:
            b_value = survey.b_value
            labels = survey.canonical.assignment()
            incumbent = 0
            for i, (u, v) in enumerate(edges):
                if labels[u - 1] == labels[v - 1]:
                    incumbent |= 1 << i

    result = min_hitting_set(cliques, incumbent, budgets.tfree_node_budget, max(limit, 1))
    assert result.size is not None
    t_value = graph.m - result.size
    if result.optimal and b_value is not None and t_value < b_value:
        raise SolverInvariantError(f"t={t_value} below b_{ell - 1}={b_value}")

    witnesses = []
    for deleted in result.solutions:
        witness = graph.without_edges(e for i, e in enumerate(edges) if deleted >> i & 1)
        if has_clique(witness, ell):
            raise SolverInvariantError(f"witness {witness} contains K_{ell}")
        witnesses.append(witness)
    witnesses.sort(key=lambda w: w.edges())
    if limit == 0:
        witnesses = []

    verdict: Optional[bool] = True
    offender = None
    for witness in witnesses:
        try:
            colorable = is_k_partite(witness, ell - 1, budgets).colorable
        except InstanceTooLargeError:
            verdict = None
            break
        if not colorable:
            verdict = False
            offender = witness
            break
    if not witnesses:
        verdict = None
    logger.debug("t_%d(%s) = %d (optimal=%s)", ell, graph, t_value, result.optimal)
    return ExtremalSolution(
        ell=ell,
        t_value=t_value,
        optimal=result.optimal,
        witnesses=tuple(witnesses),
        truncated=result.truncated,
        all_k_partite=verdict,
        non_partite_witness=offender,
        nodes=result.nodes,
    )


def _transversal_cliques(graph: Graph, masks: list[int]) -> list[int]:
    """Cliques with one vertex in each set, as pair-index bitmasks, lexicographically."""
    n = graph.n
    out: list[int] = []

    def extend(i: int, chosen: list[int], common: int) -> None:
        if i == len(masks):
            bits = 0
            for u, v in combinations(chosen, 2):
                bits |= 1 << pair_index(u, v, n)
            out.append(bits)
            return
        for v in vertices_of(masks[i] & common):
            chosen.append(v)
            extend(i + 1, chosen, common & graph.rows[v - 1])
            chosen.pop()

    extend(0, [], graph.vertex_mask)
    return out


def clique_packing(
    graph: Graph,
    sets: Sequence[Sequence[int]],
    exact: bool = False,
    budgets: SolverBudgets = DEFAULT_BUDGETS,
) -> int:
    """Edge-disjoint K_t's with one vertex in each of the t given sets.

    Greedy mode takes candidates in lexicographic order whenever they are disjoint
    from those already taken; exact mode searches for a maximum packing.

    Raises:
        InvalidInputError: If the sets overlap or fewer than two are given.
        InstanceTooLargeError: In exact mode, when there are too many candidates.
    """
    if len(sets) < 2:
        raise InvalidInputError(f"a packing needs at least 2 sets, got {len(sets)}")
    masks = [mask_of(s, graph.n) for s in sets]
    seen = 0
    for mask in masks:
        if seen & mask:
            raise InvalidInputError(f"sets overlap in vertices {vertices_of(seen & mask)}")
        seen |= mask
    candidates = _transversal_cliques(graph, masks)
    if not exact:
        return greedy_packing(candidates)
    if len(candidates) > budgets.packing_exact_max_candidates:
        raise InstanceTooLargeError(
            f"exact packing over {len(candidates)} candidates",
            f"<= {budgets.packing_exact_max_candidates}",
        )
    best = 0

    def search(i: int, used: int, count: int) -> None:
        nonlocal best
        best = max(best, count)
        if count + len(candidates) - i <= best:
            return
        for j in range(i, len(candidates)):
            if count + len(candidates) - j <= best:
                return
            if not candidates[j] & used:
                search(j + 1, used | candidates[j], count + 1)

    search(0, 0, 0)
    return best

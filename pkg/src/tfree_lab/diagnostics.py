"""Structure of a candidate subgraph T against a partition of its host graph G.

Horizontal edges are edges of T inside a part; missing edges are cross edges of G
that T leaves out. Exceptional vertices, chords and neighbourhood statistics
describe how far T is from the cut it is measured against.
"""

import logging
import math
from collections.abc import Iterable
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

from .config import DEFAULT_BUDGETS, SolverBudgets
from .cuts import Partition, max_cut
from .errors import InstanceTooLargeError, InvalidInputError
from .graph import Edge, Graph, VertexSet, graph_from_pairs, has_clique, mask_of, vertices_of

logger = logging.getLogger(__name__)


def _check_pair(graph: Graph, sub: Graph, partition: Partition) -> None:
    if partition.n != graph.n:
        raise InvalidInputError(
            f"partition of {partition.n} vertices used with a graph on {graph.n}"
        )
    if not sub.is_subgraph_of(graph):
        raise InvalidInputError("T must be a subgraph of G on the same vertex set")


def _own_part(partition: Partition, v: int) -> int:
    return partition.masks[partition.part_of(v)]


@dataclass(frozen=True)
class DegreeProfile:
    """Horizontal degree d_H and missing degree d_M of every vertex 1..n."""

    horizontal: tuple[int, ...]
    missing: tuple[int, ...]

    @property
    def horizontal_edges(self) -> int:
        """Number of horizontal edges (half the sum of d_H)."""
        return sum(self.horizontal) // 2

    @property
    def missing_edges(self) -> int:
        """Number of missing edges (half the sum of d_M)."""
        return sum(self.missing) // 2


def degree_profile(graph: Graph, sub: Graph, partition: Partition) -> DegreeProfile:
    """d_H(v) = d(T; v, own part) and d_M(v) = d(G; v, other parts) - d(T; v, other parts).

    Raises:
        InvalidInputError: If T is not a subgraph of G.
    """
    _check_pair(graph, sub, partition)
    horizontal = []
    missing = []
    for v in range(1, graph.n + 1):
        own = _own_part(partition, v)
        others = graph.vertex_mask & ~own
        horizontal.append((sub.rows[v - 1] & own).bit_count())
        missing.append(((graph.rows[v - 1] & ~sub.rows[v - 1]) & others).bit_count())
    return DegreeProfile(tuple(horizontal), tuple(missing))


def _part_containing(partition: Partition, mask: int, what: str) -> int:
    for i, part in enumerate(partition.masks):
        if mask & ~part == 0:
            return i
    raise InvalidInputError(f"{what} {vertices_of(mask)} is not inside a single part")


def count_chords(
    graph: Graph,
    sub: Graph,
    partition: Partition,
    restrict_a: Iterable[int],
    restrict_b: Iterable[int],
) -> int:
    """Count chords of T.

    For a bipartition these are ordered triples (x, y, z) with x, y in ``restrict_a``,
    {x, y} a horizontal edge, z in ``restrict_b``, {y, z} in G and {x, z} missing.
    With l >= 3 parts a chord is a horizontal edge {x, y} inside ``restrict_a`` plus
    one vertex of ``restrict_b`` in each other part, all pairs in G and at least
    one pair other than {x, y} missing.

    Raises:
        InvalidInputError: If T is not a subgraph of G, or a restriction is not
            inside one part (for a bipartition, the two must use different parts).
    """
    _check_pair(graph, sub, partition)
    a_mask = mask_of(restrict_a, graph.n)
    b_mask = mask_of(restrict_b, graph.n)
    if not a_mask:
        return 0
    home = _part_containing(partition, a_mask, "restrict_a")
    g_rows = graph.rows
    t_rows = sub.rows
    if partition.ell == 2:
        if b_mask and _part_containing(partition, b_mask, "restrict_b") == home:
            raise InvalidInputError("restrict_a and restrict_b must lie in different parts")
        total = 0
        for x in vertices_of(a_mask):
            gone = g_rows[x - 1] & ~t_rows[x - 1] & b_mask
            for y in vertices_of(t_rows[x - 1] & a_mask):
                total += (gone & g_rows[y - 1]).bit_count()
        return total

    other_parts = [
        partition.masks[i] & b_mask for i in range(partition.ell) if i != home
    ]
    total = 0

    def extend(i: int, chosen: list[int], common: int, has_missing: bool) -> int:
        if i == len(other_parts):
            return int(has_missing)
        found = 0
        for v in vertices_of(other_parts[i] & common):
            cut_back = any(not t_rows[v - 1] >> (u - 1) & 1 for u in chosen)
            chosen.append(v)
            found += extend(i + 1, chosen, common & g_rows[v - 1], has_missing or cut_back)
            chosen.pop()
        return found

    for x, y in combinations(vertices_of(a_mask), 2):
        if t_rows[x - 1] >> (y - 1) & 1:
            total += extend(0, [x, y], g_rows[x - 1] & g_rows[y - 1], False)
    return total


@dataclass(frozen=True)
class NeighborhoodReport:
    """Vertex k-tuples whose common neighbourhood in U deviates from p^k|U| by more than c."""

    k: int
    violating: tuple[tuple[int, ...], ...]
    cover: VertexSet

    @property
    def clean(self) -> bool:
        """No violating tuple."""
        return not self.violating


def _greedy_cover(tuples: list[tuple[int, ...]]) -> VertexSet:
    remaining = list(tuples)
    chosen: set[int] = set()
    while remaining:
        counts: dict[int, int] = {}
        for tup in remaining:
            for v in tup:
                counts[v] = counts.get(v, 0) + 1
        pick = min(counts, key=lambda v: (-counts[v], v))
        chosen.add(pick)
        remaining = [tup for tup in remaining if pick not in tup]
    return frozenset(chosen)


def neighborhood_violations(
    graph: Graph, target: Iterable[int], k: int, c: float, p: float
) -> NeighborhoodReport:
    """All k-tuples of vertices completely joined to fewer than (1-c)p^k|U| or more than
    (1+c)p^k|U| vertices of U, with a greedy vertex set Q_U meeting every one of them.

    Raises:
        InvalidInputError: If k < 1, c is outside (0, 1) or p outside (0, 1].
    """
    if k < 1:
        raise InvalidInputError(f"k must be at least 1, got {k}")
    if not 0.0 < c < 1.0:
        raise InvalidInputError(f"c must lie in (0, 1), got {c}")
    if not 0.0 < p <= 1.0:
        raise InvalidInputError(f"p must lie in (0, 1], got {p}")
    u_mask = mask_of(target, graph.n)
    expected = p**k * u_mask.bit_count()
    low, high = (1 - c) * expected, (1 + c) * expected
    bad = []
    for tup in combinations(range(1, graph.n + 1), k):
        common = u_mask
        for v in tup:
            common &= graph.rows[v - 1]
        size = common.bit_count()
        if size < low or size > high:
            bad.append(tup)
    return NeighborhoodReport(k, tuple(bad), _greedy_cover(bad))


@dataclass(frozen=True)
class ExceptionalSets:
    """Exceptional vertices X1 (randomness), X2 (large d_H), X3 (large d_M) per part."""

    eps: float
    p: float
    x1: tuple[VertexSet, ...]
    x2: tuple[VertexSet, ...]
    x3: tuple[VertexSet, ...]

    @property
    def all_x1(self) -> VertexSet:
        """X1 over all parts."""
        return frozenset().union(*self.x1)

    @property
    def all_x2(self) -> VertexSet:
        """X2 over all parts."""
        return frozenset().union(*self.x2)

    @property
    def all_x3(self) -> VertexSet:
        """X3 over all parts."""
        return frozenset().union(*self.x3)


def _far_from_mean(graph: Graph, u_mask: int, p: float) -> int:
    """B1(U): vertices whose degree into U is at least p|U|/4 away from p|U|."""
    size = u_mask.bit_count()
    out = 0
    for v in range(graph.n):
        if abs((graph.rows[v] & u_mask).bit_count() - p * size) >= p * size / 4:
            out |= 1 << v
    return out


def exceptional_sets(
    graph: Graph, partition: Partition, sub: Graph, eps: float, p: float
) -> ExceptionalSets:
    """X1, X2, X3 of every part of Π for T ⊆ G.

    X1 collects B1(U) and the greedy covers B_k(U), 2 <= k <= l (c = 1/4), over
    every part U with at least n/(2l) vertices. X2 holds vertices with
    d_H >= eps*p*n outside X1; X3 those with d_M >= d_H + 5*eps*p*n outside X1 and X2.

    Raises:
        InvalidInputError: If T is not a subgraph of G or eps, p are out of range.
    """
    _check_pair(graph, sub, partition)
    if eps <= 0:
        raise InvalidInputError(f"eps must be positive, got {eps}")
    if not 0.0 < p <= 1.0:
        raise InvalidInputError(f"p must lie in (0, 1], got {p}")
    n = graph.n
    parts = partition.ell
    random_bad = 0
    for u_mask in partition.masks:
        if 2 * parts * u_mask.bit_count() < n:
            continue
        random_bad |= _far_from_mean(graph, u_mask, p)
        for k in range(2, parts + 1):
            report = neighborhood_violations(graph, vertices_of(u_mask), k, 0.25, p)
            random_bad |= mask_of(report.cover, n)
    profile = degree_profile(graph, sub, partition)
    x1, x2, x3 = [], [], []
    for part in partition.masks:
        first = random_bad & part
        second = 0
        third = 0
        for v in vertices_of(part & ~first):
            d_h = profile.horizontal[v - 1]
            d_m = profile.missing[v - 1]
            if d_h >= eps * p * n:
                second |= 1 << (v - 1)
            elif d_m >= d_h + 5 * eps * p * n:
                third |= 1 << (v - 1)
        x1.append(frozenset(vertices_of(first)))
        x2.append(frozenset(vertices_of(second)))
        x3.append(frozenset(vertices_of(third)))
    return ExceptionalSets(eps, p, tuple(x1), tuple(x2), tuple(x3))


@dataclass(frozen=True)
class SwapOutcome:
    """T with every horizontal edge removed and every missing edge added."""

    before: int
    after: int
    triangle_free: bool

    @property
    def improves(self) -> bool:
        """The swap yields a larger triangle-free subgraph."""
        return self.triangle_free and self.after > self.before


def horizontal_swap(graph: Graph, sub: Graph, partition: Partition) -> SwapOutcome:
    """Size and triangle-freeness of T after trading horizontal edges for missing ones."""
    _check_pair(graph, sub, partition)
    labels = partition.assignment()
    kept: list[Edge] = [(u, v) for u, v in sub.edges() if labels[u - 1] != labels[v - 1]]
    added = [
        (u, v)
        for u, v in graph.edges()
        if labels[u - 1] != labels[v - 1] and not sub.has_edge(u, v)
    ]
    swapped = graph_from_pairs(graph.n, kept + added)
    return SwapOutcome(sub.m, swapped.m, not has_clique(swapped, 3))


def horizontal_excess(
    sub: Graph, parts: int = 2, budgets: SolverBudgets = DEFAULT_BUDGETS
) -> int:
    """Edges of T left inside the parts by the best ``parts``-partition of T."""
    return sub.m - max_cut(sub, parts, budgets).b_value


def density_deviation(graph: Graph, xs: Iterable[int], ys: Iterable[int], p: float) -> float:
    """|e(G;X,Y) - p|X||Y|| for disjoint X and Y.

    Raises:
        InvalidInputError: If X and Y intersect.
    """
    x = mask_of(xs, graph.n)
    y = mask_of(ys, graph.n)
    if x & y:
        raise InvalidInputError(f"X and Y share vertices {vertices_of(x & y)}")
    between = sum((graph.rows[v - 1] & y).bit_count() for v in vertices_of(x))
    return abs(between - p * x.bit_count() * y.bit_count())


def find_density_violation(
    graph: Graph, p: float, min_size: Optional[int] = None, max_n: int = 10
) -> Optional[tuple[VertexSet, VertexSet]]:
    """First disjoint (X, Y), |X| >= |Y| >= min_size, with e(X,Y) off p|X||Y| by half or more.

    ``min_size`` defaults to ceil(10 log(n) / p). Every assignment of vertices to X,
    Y or neither is examined.

    Raises:
        InstanceTooLargeError: If n exceeds ``max_n``.
    """
    n = graph.n
    if n > max_n:
        raise InstanceTooLargeError(f"density search with n={n}", f"n <= {max_n}")
    if not 0.0 < p <= 1.0:
        raise InvalidInputError(f"p must lie in (0, 1], got {p}")
    if min_size is None:
        min_size = max(1, math.ceil(10 * math.log(n) / p)) if n > 1 else 1
    if 2 * min_size > n:
        return None
    for x in range(1, 1 << n):
        if x.bit_count() < min_size:
            continue
        rest = graph.vertex_mask & ~x
        y = rest
        while y:
            size_y = y.bit_count()
            if min_size <= size_y <= x.bit_count():
                xs, ys = vertices_of(x), vertices_of(y)
                if density_deviation(graph, xs, ys, p) >= p * len(xs) * len(ys) / 2:
                    return frozenset(xs), frozenset(ys)
            y = (y - 1) & rest
    return None

"""Partitions, cut sizes, gap/distance analytics and exact maximum l-cuts.

Bipartitions are identified with the bitmask of the part containing vertex 1;
the canonical order on them is that bitmask read as a binary number, ascending.
For l > 2, partitions are identified with restricted-growth assignment strings
(parts numbered by first occurrence) in lexicographic order. The canonical
optimal partition is the first optimal one in that order.
"""

import logging
import math
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from .config import DEFAULT_BUDGETS, SolverBudgets
from .errors import InstanceTooLargeError, InvalidInputError, SolverInvariantError
from .graph import Graph, VertexSet, mask_of, vertices_of

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Partition:
    """An ordered tuple of l >= 2 disjoint vertex sets covering 1..n (empty parts allowed)."""

    n: int
    masks: tuple[int, ...]

    @property
    def ell(self) -> int:
        """Number of parts."""
        return len(self.masks)

    @property
    def parts(self) -> tuple[VertexSet, ...]:
        """The parts as frozensets of vertices."""
        return tuple(frozenset(vertices_of(mask)) for mask in self.masks)

    def sizes(self) -> tuple[int, ...]:
        """Part cardinalities."""
        return tuple(mask.bit_count() for mask in self.masks)

    def part_of(self, v: int) -> int:
        """Index of the part containing vertex v."""
        bit = 1 << (v - 1)
        for i, mask in enumerate(self.masks):
            if mask & bit:
                return i
        raise InvalidInputError(f"vertex {v} outside 1..{self.n}")

    def assignment(self) -> tuple[int, ...]:
        """Part index of every vertex 1..n."""
        return tuple(self.part_of(v) for v in range(1, self.n + 1))

    def same_part(self, u: int, v: int) -> bool:
        """Whether u and v lie in the same part."""
        return self.part_of(u) == self.part_of(v)

    def canonical(self) -> "Partition":
        """The same unordered partition with parts numbered by first occurrence."""
        order: list[int] = []
        for label in self.assignment():
            if label not in order:
                order.append(label)
        order.extend(i for i in range(self.ell) if i not in order)
        return Partition(self.n, tuple(self.masks[i] for i in order))

    def swapped(self) -> "Partition":
        """The bipartition with its two parts exchanged."""
        if self.ell != 2:
            raise InvalidInputError("swapping parts needs a bipartition")
        return Partition(self.n, (self.masks[1], self.masks[0]))

    def describe(self) -> str:
        """Text form "1,2|3" accepted by :func:`parse_partition`."""
        return "|".join(",".join(str(v) for v in vertices_of(mask)) for mask in self.masks)

    def to_lists(self) -> list[list[int]]:
        """Parts as sorted vertex lists (JSON friendly)."""
        return [list(vertices_of(mask)) for mask in self.masks]


def make_partition(parts: Iterable[Iterable[int]], n: int) -> Partition:
    """Validate and build a partition of 1..n.

    Raises:
        InvalidInputError: If there are fewer than two parts, the parts overlap,
            or they do not cover 1..n.
    """
    masks = tuple(mask_of(part, n) for part in parts)
    if len(masks) < 2:
        raise InvalidInputError(f"a partition needs at least 2 parts, got {len(masks)}")
    seen = 0
    for mask in masks:
        if seen & mask:
            raise InvalidInputError(f"parts overlap in vertices {vertices_of(seen & mask)}")
        seen |= mask
    full = (1 << n) - 1
    if seen != full:
        raise InvalidInputError(f"parts miss vertices {vertices_of(full & ~seen)}")
    return Partition(n, masks)


def bipartition_from_mask(mask: int, n: int) -> Partition:
    """The bipartition (A, B) with A given by ``mask``."""
    full = (1 << n) - 1
    return Partition(n, (mask & full, full & ~mask))


def partition_from_assignment(labels: Iterable[int], ell: int) -> Partition:
    """Build a partition from the part index of each vertex 1..n."""
    labels = tuple(labels)
    masks = [0] * ell
    for v, label in enumerate(labels):
        if not 0 <= label < ell:
            raise InvalidInputError(f"part index {label} outside 0..{ell - 1}")
        masks[label] |= 1 << v
    if ell < 2:
        raise InvalidInputError(f"a partition needs at least 2 parts, got {ell}")
    return Partition(len(labels), tuple(masks))


def parse_partition(text: str, n: Optional[int] = None) -> Partition:
    """Parse "1,2|3" into a partition; n defaults to the largest vertex named."""
    try:
        parts = [[int(tok) for tok in chunk.split(",") if tok.strip()] for chunk in text.split("|")]
    except ValueError as e:
        raise InvalidInputError(f"malformed partition {text!r}: {e}") from e
    if n is None:
        n = max((v for part in parts for v in part), default=0)
    return make_partition(parts, n)


def _check_sizes(graph: Graph, partition: Partition) -> None:
    if partition.n != graph.n:
        raise InvalidInputError(
            f"partition of {partition.n} vertices used with a graph on {graph.n}"
        )


def _inside(rows: tuple[int, ...], mask: int) -> int:
    total = 0
    rest = mask
    while rest:
        low = rest & -rest
        total += (rows[low.bit_length() - 1] & mask).bit_count()
        rest ^= low
    return total // 2


def cut_size(graph: Graph, partition: Partition) -> int:
    """Number of edges whose endpoints lie in different parts.

    Raises:
        InvalidInputError: If the partition is for a different n.
    """
    _check_sizes(graph, partition)
    return graph.m - sum(_inside(graph.rows, mask) for mask in partition.masks)


def inside_edges(graph: Graph, partition: Partition) -> list[tuple[int, int]]:
    """Edges with both endpoints in the same part."""
    _check_sizes(graph, partition)
    labels = partition.assignment()
    return [(u, v) for u, v in graph.edges() if labels[u - 1] == labels[v - 1]]


def cross_edges(graph: Graph, partition: Partition) -> list[tuple[int, int]]:
    """E(G;Π): edges with endpoints in different parts."""
    _check_sizes(graph, partition)
    labels = partition.assignment()
    return [(u, v) for u, v in graph.edges() if labels[u - 1] != labels[v - 1]]


def mask_distance(a: int, b: int, n: int) -> int:
    """Distance between the bipartitions given by part masks ``a`` and ``b``."""
    differ = (a ^ b).bit_count()
    return min(differ, n - differ)


def partition_distance(first: Partition, second: Partition) -> int:
    """Minimum number of vertices that change part, over all relabellings of the parts.

    For bipartitions this is min{|A'∩A| + |B'∩B|, |A'∩B| + |B'∩A|}; for l > 2 the
    best bijection between parts is found by the Hungarian method.

    Raises:
        InvalidInputError: If n or the number of parts differ.
    """
    if first.n != second.n:
        raise InvalidInputError(f"partitions of {first.n} and {second.n} vertices")
    if first.ell != second.ell:
        raise InvalidInputError(f"partitions with {first.ell} and {second.ell} parts")
    if first.ell == 2:
        return mask_distance(first.masks[0], second.masks[0], first.n)
    overlap = np.array(
        [[(a & b).bit_count() for b in second.masks] for a in first.masks], dtype=np.int64
    )
    rows, cols = linear_sum_assignment(overlap, maximize=True)
    return first.n - int(overlap[rows, cols].sum())


@dataclass(frozen=True)
class NearOptimalCut:
    """A partition with its gap and its distance to the canonical optimum."""

    partition: Partition
    gap: int
    dist: int


@dataclass(frozen=True)
class CutSurvey:
    """Maximum l-cut, canonical optimum and (optionally) the near-optimal partitions."""

    ell: int
    b_value: int
    canonical: Partition
    near_optimal: tuple[NearOptimalCut, ...] = ()
    gap_bound: Optional[int] = None
    max_optimal_distance: Optional[int] = None

    @property
    def optimal(self) -> tuple[NearOptimalCut, ...]:
        """Listed partitions with gap 0."""
        return tuple(c for c in self.near_optimal if c.gap == 0)

    def to_dict(self) -> dict[str, object]:
        """JSON form {b, canonical_parts, near_optimal: [{parts, gap, dist}]}."""
        return {
            "b": self.b_value,
            "l": self.ell,
            "canonical_parts": self.canonical.to_lists(),
            "gap_bound": self.gap_bound,
            "max_optimal_distance": self.max_optimal_distance,
            "near_optimal": [
                {"parts": c.partition.to_lists(), "gap": c.gap, "dist": c.dist}
                for c in self.near_optimal
            ],
        }


def iter_bipartition_cuts(graph: Graph) -> Iterator[tuple[int, int]]:
    """Yield (mask of the part containing vertex 1, cut size) for all 2^(n-1) bipartitions.

    Walks a Gray code so each step costs one vertex move.
    """
    n = graph.n
    rows = graph.rows
    mask = 1
    cut = rows[0].bit_count()
    yield mask, cut
    for i in range(1, 1 << (n - 1)):
        j = (i & -i).bit_length()
        bit = 1 << j
        row = rows[j]
        same_a = (row & mask).bit_count()
        other = row.bit_count() - same_a
        cut += same_a - other if mask & bit else other - same_a
        mask ^= bit
        yield mask, cut


def _iter_rgs(n: int, ell: int) -> Iterator[tuple[int, ...]]:
    labels = [0] * n

    def extend(k: int, used: int) -> Iterator[tuple[int, ...]]:
        if k == n:
            yield tuple(labels)
            return
        for label in range(min(used + 1, ell)):
            labels[k] = label
            yield from extend(k + 1, max(used, label + 1))

    yield from extend(0, 0)


def iter_partition_cuts(graph: Graph, ell: int = 2) -> Iterator[tuple[Partition, int]]:
    """Every unordered l-partition with its cut size, in canonical order."""
    if ell < 2:
        raise InvalidInputError(f"a partition needs at least 2 parts, got {ell}")
    if ell == 2:
        # Gray order is not the canonical order; sort the 2^(n-1) masks
        for mask, cut in sorted(iter_bipartition_cuts(graph)):
            yield bipartition_from_mask(mask, graph.n), cut
        return
    for labels in _iter_rgs(graph.n, ell):
        partition = partition_from_assignment(labels, ell)
        yield partition, cut_size(graph, partition)


def _rgs_search(
    graph: Graph, ell: int, slack: Optional[int]
) -> tuple[int, tuple[int, ...], list[tuple[tuple[int, ...], int]]]:
    """Branch-and-bound over restricted-growth assignments in lexicographic order."""
    n = graph.n
    rows = graph.rows
    labels = [0] * n
    part_masks = [0] * ell
    # inside_tail[k]: edges among vertices k..n-1 (0-indexed)
    inside_tail = [0] * (n + 1)
    for k in range(n - 1, -1, -1):
        higher = ((1 << n) - 1) & ~((1 << (k + 1)) - 1)
        inside_tail[k] = inside_tail[k + 1] + (rows[k] & higher).bit_count()
    best = -1
    best_labels: tuple[int, ...] = ()
    found: list[tuple[tuple[int, ...], int]] = []

    def bound(k: int, cut: int) -> int:
        extra = inside_tail[k]
        assigned = (1 << k) - 1
        for u in range(k, n):
            row = rows[u]
            to_assigned = (row & assigned).bit_count()
            if to_assigned:
                extra += to_assigned - min((row & pm).bit_count() for pm in part_masks)
        return cut + extra

    def visit(k: int, used: int, cut: int) -> None:
        nonlocal best, best_labels
        if k == n:
            if cut > best:
                best = cut
                best_labels = tuple(labels)
            if slack is not None and cut >= best - slack:
                found.append((tuple(labels), cut))
            return
        ub = bound(k, cut)
        if slack is None and ub <= best:
            return
        if slack is not None and ub < best - slack:
            return
        row = rows[k]
        for label in range(min(used + 1, ell)):
            gain = sum((row & part_masks[j]).bit_count() for j in range(ell) if j != label)
            labels[k] = label
            part_masks[label] |= 1 << k
            visit(k + 1, max(used, label + 1), cut + gain)
            part_masks[label] &= ~(1 << k)

    visit(0, 0, 0)
    return best, best_labels, found


def _bipartition_bnb(
    graph: Graph, slack: Optional[int]
) -> tuple[int, int, list[tuple[int, int]]]:
    """Branch-and-bound over bipartitions in ascending mask order (vertex 1 fixed in A)."""
    n = graph.n
    rows = graph.rows
    best = -1
    best_mask = 1
    found: list[tuple[int, int]] = []
    # vertices are decided from n down to 2; pending[k] = mask of vertices 2..k+1
    pending_inside = [0] * (n + 1)
    for k in range(1, n):
        low_mask = ((1 << (k + 1)) - 1) & ~1
        pending_inside[k] = _inside(rows, low_mask)

    def visit(k: int, a_mask: int, b_mask: int, cut: int) -> None:
        # k: 0-indexed vertex to decide next (k >= 1); vertices k+1.. are decided
        nonlocal best, best_mask
        if k == 0:
            if cut > best:
                best = cut
                best_mask = a_mask
            if slack is not None and cut >= best - slack:
                found.append((a_mask, cut))
            return
        ub = cut + pending_inside[k]
        for u in range(1, k + 1):
            row = rows[u]
            ub += max((row & a_mask).bit_count(), (row & b_mask).bit_count())
        if slack is None and ub <= best:
            return
        if slack is not None and ub < best - slack:
            return
        row = rows[k]
        bit = 1 << k
        visit(k - 1, a_mask, b_mask | bit, cut + (row & a_mask).bit_count())
        visit(k - 1, a_mask | bit, b_mask, cut + (row & b_mask).bit_count())

    visit(n - 1, 1, 0, 0)
    return best, best_mask, found


def _check_feasible(graph: Graph, ell: int, budgets: SolverBudgets) -> None:
    if ell < 2:
        raise InvalidInputError(f"a partition needs at least 2 parts, got {ell}")
    if ell == 2 and graph.n > budgets.maxcut_max_n:
        raise InstanceTooLargeError(f"max-cut with n={graph.n}", f"n <= {budgets.maxcut_max_n}")
    if ell > 2 and graph.n * math.log2(ell) > budgets.maxcut_max_assignment_bits:
        raise InstanceTooLargeError(
            f"max {ell}-cut with n={graph.n}",
            f"n*log2(l) <= {budgets.maxcut_max_assignment_bits}",
        )


def _certify(graph: Graph, ell: int, best: int) -> None:
    # every graph has an l-cut of at least m(1 - 1/l)
    if best * ell < graph.m * (ell - 1):
        raise SolverInvariantError(f"max {ell}-cut {best} below m(1-1/l) for m={graph.m}")


def _solve(
    graph: Graph, ell: int, slack: Optional[int], budgets: SolverBudgets
) -> tuple[int, Partition, list[tuple[Partition, int]]]:
    _check_feasible(graph, ell, budgets)
    n = graph.n
    if ell == 2:
        if n < budgets.maxcut_enumeration_below_n:
            best = -1
            best_mask = 1
            kept: list[tuple[int, int]] = []
            for mask, cut in iter_bipartition_cuts(graph):
                if cut > best or (cut == best and mask < best_mask):
                    best, best_mask = cut, mask
                if slack is not None and cut >= best - slack:
                    kept.append((mask, cut))
        else:
            best, best_mask, kept = _bipartition_bnb(graph, slack)
        _certify(graph, ell, best)
        canonical = bipartition_from_mask(best_mask, n)
        listed = [
            (bipartition_from_mask(mask, n), cut)
            for mask, cut in sorted(kept)
            if cut >= best - (slack or 0)
        ]
        return best, canonical, listed
    best, best_labels, found = _rgs_search(graph, ell, slack)
    _certify(graph, ell, best)
    canonical = partition_from_assignment(best_labels, ell)
    listed = [
        (partition_from_assignment(labels, ell), cut)
        for labels, cut in sorted(found)
        if cut >= best - (slack or 0)
    ]
    return best, canonical, listed


def max_cut(graph: Graph, ell: int = 2, budgets: SolverBudgets = DEFAULT_BUDGETS) -> CutSurvey:
    """Exact maximum l-cut b(G) with the canonical optimal partition.

    Raises:
        InstanceTooLargeError: If the instance is beyond the exact-solver guard.
    """
    best, canonical, _ = _solve(graph, ell, None, budgets)
    logger.debug("max %d-cut of %s is %d", ell, graph, best)
    return CutSurvey(ell=ell, b_value=best, canonical=canonical)


def gap(graph: Graph, partition: Partition, budgets: SolverBudgets = DEFAULT_BUDGETS) -> int:
    """gap(G;Π) = b(G) - |E(G;Π)| for the partition's number of parts."""
    size = cut_size(graph, partition)
    return max_cut(graph, partition.ell, budgets).b_value - size


def enumerate_near_optimal(
    graph: Graph, g: int, ell: int = 2, budgets: SolverBudgets = DEFAULT_BUDGETS
) -> CutSurvey:
    """Every partition with gap at most g, annotated with gap and distance to Π*.

    Partitions are listed once per unordered partition, in canonical order.

    Raises:
        InvalidInputError: If g is negative.
        InstanceTooLargeError: If the instance is beyond the exact-solver guard.
    """
    if g < 0:
        raise InvalidInputError(f"gap bound must be non-negative, got {g}")
    best, canonical, listed = _solve(graph, ell, g, budgets)
    near = tuple(
        NearOptimalCut(partition, best - cut, partition_distance(partition, canonical))
        for partition, cut in listed
    )
    optimal = [c.partition for c in near if c.gap == 0]
    widest = 0
    for i, first in enumerate(optimal):
        for second in optimal[i + 1 :]:
            widest = max(widest, partition_distance(first, second))
    logger.debug("%d partitions within gap %d of b=%d", len(near), g, best)
    return CutSurvey(
        ell=ell,
        b_value=best,
        canonical=canonical,
        near_optimal=near,
        gap_bound=g,
        max_optimal_distance=widest,
    )


def is_balanced(partition: Partition, n: Optional[int] = None) -> bool:
    """Membership in Bal_n: both parts within n/100 of n/2 (empty parts are unbalanced).

    Raises:
        InvalidInputError: If the partition is not a bipartition.
    """
    if partition.ell != 2:
        raise InvalidInputError("balance is defined for bipartitions")
    n = partition.n if n is None else n
    sizes = partition.sizes()
    if 0 in sizes:
        return False
    return all(50 * abs(2 * size - n) <= n for size in sizes)


def local_search_cut(graph: Graph) -> tuple[Partition, int]:
    """A 1-flip locally optimal bipartition; its cut is always at least m/2.

    Used only to bracket b(G) beyond exact scale.
    """
    n = graph.n
    rows = graph.rows
    full = (1 << n) - 1
    a_mask = sum(1 << v for v in range(0, n, 2))
    improved = True
    while improved:
        improved = False
        for v in range(n):
            bit = 1 << v
            own = a_mask if a_mask & bit else full & ~a_mask
            same = (rows[v] & own).bit_count()
            if same > rows[v].bit_count() - same:
                a_mask ^= bit
                improved = True
    partition = bipartition_from_mask(a_mask, n)
    return partition, cut_size(graph, partition)


@dataclass(frozen=True)
class OrderedQuad:
    """An ordered partition Γ = (V1, W1, V2, W2) of 1..n."""

    n: int
    v1: int
    w1: int
    v2: int
    w2: int

    @property
    def size(self) -> int:
        """|Γ| = |V1||W1| + |V2||W2|."""
        return self.v1.bit_count() * self.w1.bit_count() + self.v2.bit_count() * self.w2.bit_count()

    def to_lists(self) -> list[list[int]]:
        """The four parts as sorted vertex lists."""
        return [list(vertices_of(mask)) for mask in (self.v1, self.w1, self.v2, self.w2)]


def make_quad(parts: Iterable[Iterable[int]], n: int) -> OrderedQuad:
    """Validate four disjoint parts covering 1..n.

    Raises:
        InvalidInputError: If there are not four parts or they do not partition 1..n.
    """
    masks = [mask_of(part, n) for part in parts]
    if len(masks) != 4:
        raise InvalidInputError(f"an ordered quad has 4 parts, got {len(masks)}")
    seen = 0
    for mask in masks:
        if seen & mask:
            raise InvalidInputError(f"quad parts overlap in {vertices_of(seen & mask)}")
        seen |= mask
    if seen != (1 << n) - 1:
        raise InvalidInputError(f"quad parts miss vertices {vertices_of(((1 << n) - 1) & ~seen)}")
    return OrderedQuad(n, *masks)


def _between(rows: tuple[int, ...], x: int, y: int) -> int:
    """Edges between disjoint vertex masks x and y."""
    total = 0
    rest = x
    while rest:
        low = rest & -rest
        total += (rows[low.bit_length() - 1] & y).bit_count()
        rest ^= low
    return total


def non_edges_across(graph: Graph, quad: OrderedQuad) -> int:
    """ē(G;Γ) = |Γ| - e(G;V1,W1) - e(G;V2,W2)."""
    if quad.n != graph.n:
        raise InvalidInputError(f"quad on {quad.n} vertices used with a graph on {graph.n}")
    return (
        quad.size
        - _between(graph.rows, quad.v1, quad.w1)
        - _between(graph.rows, quad.v2, quad.w2)
    )


@dataclass(frozen=True)
class DerivedQuads:
    """Γ_X, Γ_Y for a bipartition relative to the optimum, with s = dist."""

    gamma_x: OrderedQuad
    gamma_y: OrderedQuad
    s: int


def derived_quads(partition: Partition, optimum: Partition) -> DerivedQuads:
    """Γ_X = (A*∩B, A*∩A, B*∩A, B*∩B) and Γ_Y = (A*∩B, B*∩B, B*∩A, A*∩A).

    Parts are relabelled so that |A*| >= |B*| and
    s = |A∩B*| + |A*∩B| <= |A∩A*| + |B∩B*|.

    Raises:
        InvalidInputError: If either argument is not a bipartition of the same n.
    """
    if partition.ell != 2 or optimum.ell != 2:
        raise InvalidInputError("derived quads need two bipartitions")
    if partition.n != optimum.n:
        raise InvalidInputError(f"bipartitions of {partition.n} and {optimum.n} vertices")
    a_star, b_star = optimum.masks
    if a_star.bit_count() < b_star.bit_count():
        a_star, b_star = b_star, a_star
    a, b = partition.masks
    moved = (a & b_star).bit_count() + (a_star & b).bit_count()
    if moved > (a & a_star).bit_count() + (b & b_star).bit_count():
        a, b = b, a
        moved = (a & b_star).bit_count() + (a_star & b).bit_count()
    n = partition.n
    gamma_x = OrderedQuad(n, a_star & b, a_star & a, b_star & a, b_star & b)
    gamma_y = OrderedQuad(n, a_star & b, b_star & b, b_star & a, a_star & a)
    return DerivedQuads(gamma_x, gamma_y, moved)


def min_nonedges_optimal(graph: Graph, budgets: SolverBudgets = DEFAULT_BUDGETS) -> int:
    """b̄B(G): minimum of |A||B| - e(G;Π) over optimal bipartitions with both parts nonempty.

    Raises:
        InstanceTooLargeError: If the instance is beyond the exact-solver guard.
    """
    if graph.n == 1:
        return 0
    survey = enumerate_near_optimal(graph, 0, 2, budgets)
    nontrivial = [c.partition for c in survey.optimal if 0 not in c.partition.sizes()]
    return min(
        math.prod(partition.sizes()) - cut_size(graph, partition) for partition in nontrivial
    )

"""The partition order on graphs, its lattice operations and the FKG inequality.

For a bipartition Π, G <=_Π H when every cross edge of G is a cross edge of H and
every inside edge of H is an inside edge of G. Graphs are handled as bitmasks
over the C(n,2) pair indices.
"""

import logging
import math
from collections.abc import Callable, Iterator
from dataclasses import dataclass, field
from enum import StrEnum
from math import comb

from .config import DEFAULT_BUDGETS, SolverBudgets
from .cuts import Partition
from .errors import InstanceTooLargeError, InvalidInputError
from .graph import Graph, edge_bits, graph_from_bits, pair_index

logger = logging.getLogger(__name__)

GraphEvent = Callable[[Graph], bool]

FKG_TOLERANCE = 1e-12


class Order(StrEnum):
    """Outcome of comparing two graphs under <=_Π."""

    LESS_EQUAL = "less-equal"
    GREATER_EQUAL = "greater-equal"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


class Direction(StrEnum):
    """Monotonicity of an event under <=_Π."""

    INCREASING = "increasing"
    DECREASING = "decreasing"


@dataclass(frozen=True)
class PartitionOrderContext:
    """A bipartition Π of 1..n fixing the order <=_Π."""

    partition: Partition
    cross_bits: int = field(init=False)

    def __post_init__(self) -> None:
        if self.partition.ell != 2:
            raise InvalidInputError("the partition order needs a bipartition")
        labels = self.partition.assignment()
        n = self.partition.n
        bits = 0
        for u in range(1, n + 1):
            for v in range(u + 1, n + 1):
                if labels[u - 1] != labels[v - 1]:
                    bits |= 1 << pair_index(u, v, n)
        object.__setattr__(self, "cross_bits", bits)

    @property
    def n(self) -> int:
        """Number of vertices."""
        return self.partition.n

    def bits(self, graph: Graph) -> int:
        """Edge bitmask of a graph on the context's vertex set.

        Raises:
            InvalidInputError: If the graph has a different n.
        """
        if graph.n != self.n:
            raise InvalidInputError(
                f"graph on {graph.n} vertices compared under a partition of {self.n}"
            )
        return edge_bits(graph)


@dataclass(frozen=True)
class ProductMeasure:
    """The law of G(n,p): μ(G) = p^e(G) (1-p)^(C(n,2)-e(G))."""

    p: float
    n: int

    def __post_init__(self) -> None:
        if not 0.0 < self.p < 1.0:
            raise InvalidInputError(f"the product measure needs 0 < p < 1, got {self.p}")
        if self.n < 1:
            raise InvalidInputError(f"n must be at least 1, got {self.n}")

    def log_weight(self, edges: int) -> float:
        """log μ of any graph with the given number of edges."""
        return edges * math.log(self.p) + (comb(self.n, 2) - edges) * math.log1p(-self.p)


def _order_bits(g: int, h: int, cross: int) -> Order:
    below = (g & cross) & ~h == 0 and (h & ~cross) & ~g == 0
    above = (h & cross) & ~g == 0 and (g & ~cross) & ~h == 0
    if below and above:
        return Order.EQUAL
    if below:
        return Order.LESS_EQUAL
    if above:
        return Order.GREATER_EQUAL
    return Order.INCOMPARABLE


def compare(first: Graph, second: Graph, ctx: PartitionOrderContext) -> Order:
    """Compare two graphs under <=_Π."""
    return _order_bits(ctx.bits(first), ctx.bits(second), ctx.cross_bits)


def _join_bits(g: int, h: int, cross: int) -> int:
    return ((g & h) & ~cross) | ((g | h) & cross)


def _meet_bits(g: int, h: int, cross: int) -> int:
    return ((g | h) & ~cross) | ((g & h) & cross)


def join(first: Graph, second: Graph, ctx: PartitionOrderContext) -> Graph:
    """G ∨ H: inside edges common to both, cross edges of either."""
    bits = _join_bits(ctx.bits(first), ctx.bits(second), ctx.cross_bits)
    return graph_from_bits(ctx.n, bits)


def meet(first: Graph, second: Graph, ctx: PartitionOrderContext) -> Graph:
    """G ∧ H: inside edges of either, cross edges common to both."""
    bits = _meet_bits(ctx.bits(first), ctx.bits(second), ctx.cross_bits)
    return graph_from_bits(ctx.n, bits)


def log_measure(graph: Graph, mu: ProductMeasure) -> float:
    """log μ(G).

    Raises:
        InvalidInputError: If the graph and measure disagree on n.
    """
    if graph.n != mu.n:
        raise InvalidInputError(f"graph on {graph.n} vertices under a measure on {mu.n}")
    return mu.log_weight(graph.m)


def measure_mu(graph: Graph, mu: ProductMeasure) -> float:
    """μ(G) = Pr[G(n,p) = G]."""
    return math.exp(log_measure(graph, mu))


def log_supermodularity_gap(
    first: Graph, second: Graph, mu: ProductMeasure, ctx: PartitionOrderContext
) -> float:
    """log μ(G) + log μ(H) - log μ(G∨H) - log μ(G∧H); zero for the product measure."""
    return (
        log_measure(first, mu)
        + log_measure(second, mu)
        - log_measure(join(first, second, ctx), mu)
        - log_measure(meet(first, second, ctx), mu)
    )


def _guard(n: int, budgets: SolverBudgets) -> None:
    if n > budgets.fkg_max_n:
        raise InstanceTooLargeError(f"lattice enumeration with n={n}", f"n <= {budgets.fkg_max_n}")


def all_graphs(n: int, budgets: SolverBudgets = DEFAULT_BUDGETS) -> Iterator[Graph]:
    """Every graph on 1..n in increasing order of its pair bitmask."""
    _guard(n, budgets)
    for bits in range(1 << comb(n, 2)):
        yield graph_from_bits(n, bits)


@dataclass(frozen=True)
class FkgResult:
    """Exact E[f·g] against E[f]·E[g] over all graphs on n vertices."""

    lhs: float
    rhs: float
    expect_f: float
    expect_g: float

    @property
    def holds(self) -> bool:
        """E[f·g] <= E[f]·E[g] up to the tolerance."""
        return self.lhs <= self.rhs + FKG_TOLERANCE

    def to_dict(self) -> dict[str, object]:
        """JSON form {lhs, rhs, holds, ...}."""
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "holds": self.holds,
            "E_f": self.expect_f,
            "E_g": self.expect_g,
        }


def fkg_check(
    n: int,
    mu: ProductMeasure,
    f: GraphEvent,
    g: GraphEvent,
    budgets: SolverBudgets = DEFAULT_BUDGETS,
) -> FkgResult:
    """Evaluate both sides of E[f·g] <= E[f]·E[g] exactly by enumerating every graph.

    Weights are taken from log μ; sums are compensated (math.fsum) in enumeration
    order.

    Raises:
        InstanceTooLargeError: If n exceeds the enumeration guard.
    """
    _guard(n, budgets)
    if mu.n != n:
        raise InvalidInputError(f"measure on {mu.n} vertices used for n={n}")
    both, only_f, only_g = [], [], []
    for graph in all_graphs(n, budgets):
        weight = math.exp(mu.log_weight(graph.m))
        in_f = f(graph)
        in_g = g(graph)
        if in_f:
            only_f.append(weight)
        if in_g:
            only_g.append(weight)
        if in_f and in_g:
            both.append(weight)
    expect_f = math.fsum(only_f)
    expect_g = math.fsum(only_g)
    result = FkgResult(math.fsum(both), expect_f * expect_g, expect_f, expect_g)
    logger.debug("fkg n=%d p=%s: lhs=%.6g rhs=%.6g", n, mu.p, result.lhs, result.rhs)
    return result


def monotonicity_audit(
    event: GraphEvent,
    direction: Direction,
    n: int,
    ctx: PartitionOrderContext,
    budgets: SolverBudgets = DEFAULT_BUDGETS,
) -> list[tuple[Graph, Graph]]:
    """Pairs G <=_Π H differing in one edge where the event breaks its claimed monotonicity.

    One-edge steps up the order add a cross edge or remove an inside edge.
    """
    _guard(n, budgets)
    if ctx.n != n:
        raise InvalidInputError(f"partition of {ctx.n} vertices used for n={n}")
    pairs = comb(n, 2)
    values = [event(graph_from_bits(n, bits)) for bits in range(1 << pairs)]
    violations = []
    for lower in range(1 << pairs):
        for k in range(pairs):
            bit = 1 << k
            crossing = bool(ctx.cross_bits & bit)
            present = bool(lower & bit)
            if crossing == present:
                continue
            upper = lower ^ bit
            low_value, high_value = values[lower], values[upper]
            broken = (
                low_value and not high_value
                if direction is Direction.INCREASING
                else high_value and not low_value
            )
            if broken:
                violations.append((graph_from_bits(n, lower), graph_from_bits(n, upper)))
    if violations:
        logger.warning(
            "%d monotonicity violations for a %s event", len(violations), direction.value
        )
    return violations

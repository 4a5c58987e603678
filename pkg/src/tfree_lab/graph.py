"""Immutable simple graphs on the vertex set 1..n with bitset adjacency rows."""

import logging
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from pathlib import Path

from .errors import InvalidInputError

logger = logging.getLogger(__name__)

Edge = tuple[int, int]
EdgeSet = frozenset[Edge]
VertexSet = frozenset[int]


def mask_of(vertices: Iterable[int], n: int) -> int:
    """Encode a set of vertices from 1..n as a bitmask (vertex v is bit v-1).

    Raises:
        InvalidInputError: If a vertex lies outside 1..n.
    """
    mask = 0
    for v in vertices:
        if not 1 <= v <= n:
            raise InvalidInputError(f"vertex {v} outside 1..{n}")
        mask |= 1 << (v - 1)
    return mask


def vertices_of(mask: int) -> tuple[int, ...]:
    """Decode a bitmask into the sorted tuple of its 1-indexed vertices."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length())
        mask ^= low
    return tuple(out)


def pair_index(u: int, v: int, n: int) -> int:
    """Row-major rank of the pair {u, v} among the C(n,2) pairs of 1..n."""
    if u > v:
        u, v = v, u
    return (u - 1) * (2 * n - u) // 2 + (v - u - 1)


def pair_from_index(k: int, n: int) -> Edge:
    """Inverse of :func:`pair_index`."""
    u = 1
    row = n - 1
    while k >= row:
        k -= row
        u += 1
        row -= 1
    return (u, u + 1 + k)


def normalize_edge(u: int, v: int) -> Edge:
    """Return the pair with its smaller endpoint first."""
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True, slots=True)
class Graph:
    """A simple undirected graph on vertices 1..n.

    ``rows[i]`` is the neighbourhood bitmask of vertex ``i + 1``. Instances are
    immutable; every "mutation" returns a new graph.
    """

    n: int
    rows: tuple[int, ...]
    m: int

    @property
    def vertex_mask(self) -> int:
        """Bitmask of all vertices."""
        return (1 << self.n) - 1

    def neighbor_mask(self, v: int) -> int:
        """Neighbourhood of ``v`` as a bitmask."""
        return self.rows[v - 1]

    def neighbors(self, v: int) -> VertexSet:
        """Neighbourhood of ``v``."""
        return frozenset(vertices_of(self.rows[v - 1]))

    def degree(self, v: int) -> int:
        """Degree of ``v``."""
        return self.rows[v - 1].bit_count()

    def has_edge(self, u: int, v: int) -> bool:
        """Whether ``{u, v}`` is an edge."""
        return bool(self.rows[u - 1] >> (v - 1) & 1)

    def edges(self) -> list[Edge]:
        """All edges, sorted lexicographically."""
        out = []
        for i, row in enumerate(self.rows):
            higher = row >> (i + 1)
            j = i + 1
            while higher:
                if higher & 1:
                    out.append((i + 1, j + 1))
                higher >>= 1
                j += 1
        return out

    def edge_set(self) -> EdgeSet:
        """All edges as a frozenset of sorted pairs."""
        return frozenset(self.edges())

    def non_edges(self) -> list[Edge]:
        """All pairs that are not edges, sorted lexicographically."""
        full = self.vertex_mask
        out = []
        for i, row in enumerate(self.rows):
            missing = (full & ~row) >> (i + 1)
            j = i + 1
            while missing:
                if missing & 1:
                    out.append((i + 1, j + 1))
                missing >>= 1
                j += 1
        return out

    def with_edges(self, pairs: Iterable[Edge]) -> "Graph":
        """A new graph with the given non-edges added.

        Raises:
            InvalidInputError: If a pair is out of range, a loop, or already present.
        """
        rows = list(self.rows)
        added = 0
        for u, v in pairs:
            _check_pair(u, v, self.n)
            if rows[u - 1] >> (v - 1) & 1:
                raise InvalidInputError(f"edge ({u}, {v}) already present")
            rows[u - 1] |= 1 << (v - 1)
            rows[v - 1] |= 1 << (u - 1)
            added += 1
        return Graph(self.n, tuple(rows), self.m + added)

    def without_edges(self, pairs: Iterable[Edge]) -> "Graph":
        """A new graph with the given edges removed.

        Raises:
            InvalidInputError: If a pair is not an edge.
        """
        rows = list(self.rows)
        removed = 0
        for u, v in pairs:
            _check_pair(u, v, self.n)
            if not rows[u - 1] >> (v - 1) & 1:
                raise InvalidInputError(f"edge ({u}, {v}) not present")
            rows[u - 1] &= ~(1 << (v - 1))
            rows[v - 1] &= ~(1 << (u - 1))
            removed += 1
        return Graph(self.n, tuple(rows), self.m - removed)

    def is_subgraph_of(self, other: "Graph") -> bool:
        """Whether every edge of this graph is an edge of ``other`` (same n)."""
        return self.n == other.n and all(
            row & ~orow == 0 for row, orow in zip(self.rows, other.rows, strict=True)
        )

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m}, edges={self.edges()})"


def _check_pair(u: int, v: int, n: int) -> None:
    if not (1 <= u <= n and 1 <= v <= n):
        raise InvalidInputError(f"edge ({u}, {v}) has a vertex outside 1..{n}")
    if u == v:
        raise InvalidInputError(f"edge ({u}, {v}) is a loop")


def graph_from_pairs(n: int, pairs: Iterable[Edge]) -> Graph:
    """Build a graph from pairs already known to be valid and distinct."""
    rows = [0] * n
    m = 0
    for u, v in pairs:
        rows[u - 1] |= 1 << (v - 1)
        rows[v - 1] |= 1 << (u - 1)
        m += 1
    return Graph(n, tuple(rows), m)


def build_graph(n: int, edges: Iterable[Edge]) -> Graph:
    """Build a graph on 1..n with exactly the given edges.

    Args:
        n: Number of vertices, at least 1.
        edges: Pairs (u, v) with distinct endpoints in 1..n.

    Returns:
        The graph.

    Raises:
        InvalidInputError: On n < 1, an out-of-range vertex, a loop, or a
            duplicate edge; the message names the offending pair.
    """
    if n < 1:
        raise InvalidInputError(f"n must be at least 1, got {n}")
    seen: set[Edge] = set()
    for u, v in edges:
        _check_pair(u, v, n)
        pair = normalize_edge(u, v)
        if pair in seen:
            raise InvalidInputError(f"duplicate edge ({u}, {v})")
        seen.add(pair)
    return graph_from_pairs(n, seen)


def empty_graph(n: int) -> Graph:
    """The edgeless graph on n vertices."""
    return build_graph(n, [])


def complete_graph(n: int) -> Graph:
    """K_n."""
    return build_graph(n, [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)])


def cycle_graph(n: int) -> Graph:
    """C_n with edges 12, 23, ..., n1 (n >= 3)."""
    if n < 3:
        raise InvalidInputError(f"a cycle needs at least 3 vertices, got {n}")
    return build_graph(n, [(i, i + 1) for i in range(1, n)] + [(1, n)])


def path_graph(n: int) -> Graph:
    """The path 1-2-...-n."""
    return build_graph(n, [(i, i + 1) for i in range(1, n)])


def edge_bits(graph: Graph) -> int:
    """Encode the edge set as a bitmask over pair indices."""
    bits = 0
    for u, v in graph.edges():
        bits |= 1 << pair_index(u, v, graph.n)
    return bits


def graph_from_bits(n: int, bits: int) -> Graph:
    """Inverse of :func:`edge_bits`."""
    pairs = []
    k = 0
    while bits:
        if bits & 1:
            pairs.append(pair_from_index(k, n))
        bits >>= 1
        k += 1
    return graph_from_pairs(n, pairs)


def edge_count(graph: Graph, xs: Iterable[int], ys: Iterable[int] | None = None) -> int:
    """e(G;X) or, with ``ys``, e(G;X,Y) counting edges inside X∩Y once.

    Raises:
        InvalidInputError: If a vertex lies outside 1..n.
    """
    x = mask_of(xs, graph.n)
    if ys is None:
        return _inside_count(graph, x)
    y = mask_of(ys, graph.n)
    ordered = 0
    rest = x
    while rest:
        low = rest & -rest
        ordered += (graph.rows[low.bit_length() - 1] & y).bit_count()
        rest ^= low
    return ordered - _inside_count(graph, x & y)


def _inside_count(graph: Graph, x: int) -> int:
    total = 0
    rest = x
    while rest:
        low = rest & -rest
        total += (graph.rows[low.bit_length() - 1] & x).bit_count()
        rest ^= low
    return total // 2


def iter_clique_masks(graph: Graph, ell: int, within: int | None = None) -> Iterator[int]:
    """Yield every ell-clique as a vertex bitmask, in lexicographic order.

    Args:
        graph: The host graph.
        ell: Clique size (>= 1).
        within: Optional vertex mask restricting the search.
    """
    rows = graph.rows
    start = graph.vertex_mask if within is None else within

    def extend(clique: int, cand: int, need: int) -> Iterator[int]:
        if need == 0:
            yield clique
            return
        if cand.bit_count() < need:
            return
        rest = cand
        while rest:
            low = rest & -rest
            rest ^= low
            v = low.bit_length() - 1
            higher = cand & ~((low << 1) - 1)
            yield from extend(clique | low, higher & rows[v], need - 1)

    yield from extend(0, start, ell)


@dataclass(frozen=True)
class CliqueListing:
    """Cliques found by :func:`enumerate_cliques`."""

    cliques: tuple[tuple[int, ...], ...]
    truncated: bool

    @property
    def certifies_free(self) -> bool:
        """An empty, untruncated listing certifies the graph is K_ell-free."""
        return not self.cliques and not self.truncated


def enumerate_cliques(graph: Graph, ell: int, limit: int) -> CliqueListing:
    """All ell-vertex cliques in lexicographic order, truncated at ``limit``.

    Raises:
        InvalidInputError: If ell < 2 or limit < 1.
    """
    if ell < 2:
        raise InvalidInputError(f"clique size must be at least 2, got {ell}")
    if limit < 1:
        raise InvalidInputError(f"limit must be at least 1, got {limit}")
    found: list[tuple[int, ...]] = []
    truncated = False
    for clique in iter_clique_masks(graph, ell):
        if len(found) == limit:
            truncated = True
            break
        found.append(vertices_of(clique))
    return CliqueListing(tuple(found), truncated)


def has_clique(graph: Graph, ell: int) -> bool:
    """Whether the graph contains K_ell."""
    return next(iter_clique_masks(graph, ell), None) is not None


def is_clique_free(graph: Graph, ell: int) -> bool:
    """Whether the graph contains no K_ell."""
    return not has_clique(graph, ell)


def is_triangle_free(graph: Graph) -> bool:
    """Whether the graph contains no triangle."""
    return not has_clique(graph, 3)


def common_neighborhood(graph: Graph, tup: tuple[int, ...], target: Iterable[int]) -> int:
    """|⋂_{v in T} Γ(G;v) ∩ U|.

    Raises:
        InvalidInputError: If T is empty or repeats a vertex.
    """
    if not tup:
        raise InvalidInputError("tuple of vertices must be nonempty")
    if len(set(tup)) != len(tup):
        raise InvalidInputError(f"tuple {tup} repeats a vertex")
    common = mask_of(target, graph.n)
    for v in vertices_of(mask_of(tup, graph.n)):
        common &= graph.rows[v - 1]
    return common.bit_count()


def format_edge_list(graph: Graph) -> str:
    """Canonical edge-list text: "n m" then sorted "u v" lines."""
    lines = [f"{graph.n} {graph.m}"]
    lines.extend(f"{u} {v}" for u, v in graph.edges())
    return "\n".join(lines) + "\n"


def read_edge_list(text: str) -> Graph:
    """Parse the edge-list format produced by :func:`format_edge_list`.

    Raises:
        InvalidInputError: On a malformed header, a wrong edge count, or an invalid pair.
    """
    tokens = [line.split() for line in text.splitlines() if line.strip()]
    if not tokens or len(tokens[0]) != 2:
        raise InvalidInputError("edge list must start with a line 'n m'")
    try:
        n, m = int(tokens[0][0]), int(tokens[0][1])
        pairs = [(int(a), int(b)) for a, b in tokens[1:]]
    except ValueError as e:
        raise InvalidInputError(f"malformed edge list: {e}") from e
    if len(pairs) != m:
        raise InvalidInputError(f"header announces {m} edges but {len(pairs)} were listed")
    return build_graph(n, pairs)


def load_graph(path: Path | str) -> Graph:
    """Read a graph from an edge-list file."""
    graph = read_edge_list(Path(path).read_text())
    logger.debug("loaded %s from %s", graph, path)
    return graph


def save_graph(graph: Graph, path: Path | str) -> None:
    """Write a graph in canonical edge-list format."""
    Path(path).write_text(format_edge_list(graph))

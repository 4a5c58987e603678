"""Seeded samplers for G(n,p), G(n,M), edge evolution and uniform triangle-free graphs."""

import logging
from dataclasses import dataclass, field
from math import comb
from typing import Optional

import numpy as np

from .config import MAX_SEED
from .errors import InstanceTooLargeError, InvalidInputError
from .graph import Graph, graph_from_pairs, has_clique

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RngSeed:
    """A reproducible random stream: (master_seed, stream_index[, sub-stream path])."""

    master_seed: int
    stream_index: int = 0
    substream: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        if not 0 <= self.master_seed <= MAX_SEED:
            raise InvalidInputError(f"master seed must lie in [0, 2^64), got {self.master_seed}")
        if self.stream_index < 0 or any(k < 0 for k in self.substream):
            raise InvalidInputError("stream indices must be non-negative")

    def child(self, k: int) -> "RngSeed":
        """An independent stream derived from this one."""
        return RngSeed(self.master_seed, self.stream_index, (*self.substream, k))

    def generator(self) -> np.random.Generator:
        """A fresh numpy Generator for this stream."""
        sequence = np.random.SeedSequence(
            entropy=self.master_seed,
            spawn_key=(self.stream_index, *self.substream),
        )
        return np.random.default_rng(sequence)


def _pairs_from_indices(n: int, indices: np.ndarray) -> list[tuple[int, int]]:
    rows, cols = np.triu_indices(n, k=1)
    chosen = np.sort(indices)
    return [(int(u) + 1, int(v) + 1) for u, v in zip(rows[chosen], cols[chosen], strict=True)]


def sample_gnp(n: int, p: float, seed: RngSeed) -> Graph:
    """Draw G(n,p): each pair is an edge independently with probability p.

    Raises:
        InvalidInputError: If p lies outside [0, 1] or n < 1.
    """
    if not 0.0 <= p <= 1.0:
        raise InvalidInputError(f"p must lie in [0, 1], got {p}")
    if n < 1:
        raise InvalidInputError(f"n must be at least 1, got {n}")
    rng = seed.generator()
    hits = np.flatnonzero(rng.random(comb(n, 2)) < p)
    return graph_from_pairs(n, _pairs_from_indices(n, hits))


def sample_gnm(n: int, M: int, seed: RngSeed) -> Graph:  # noqa: N803
    """Draw G(n,M): a uniformly random graph with exactly M edges.

    Raises:
        InvalidInputError: If M is negative or exceeds C(n,2).
    """
    return _gnm_from(n, M, seed.generator())


def _gnm_from(n: int, M: int, rng: np.random.Generator) -> Graph:  # noqa: N803
    total = comb(n, 2)
    if n < 1:
        raise InvalidInputError(f"n must be at least 1, got {n}")
    if not 0 <= M <= total:
        raise InvalidInputError(f"M must lie in [0, {total}], got {M}")
    indices = rng.choice(total, size=M, replace=False) if M else np.empty(0, dtype=np.int64)
    return graph_from_pairs(n, _pairs_from_indices(n, indices))


def evolve(graph: Graph, t: int, seed: RngSeed) -> Graph:
    """Add t distinct non-edges chosen uniformly at random without replacement.

    Raises:
        InvalidInputError: If t is negative or exceeds the number of non-edges.
    """
    missing = graph.non_edges()
    if not 0 <= t <= len(missing):
        raise InvalidInputError(f"cannot add {t} edges: only {len(missing)} non-edges")
    if t == 0:
        return graph
    chosen = seed.generator().choice(len(missing), size=t, replace=False)
    return graph.with_edges(missing[int(i)] for i in sorted(chosen))


def added_edges(before: Graph, after: Graph) -> list[tuple[int, int]]:
    """Edges of ``after`` absent from ``before`` (``before`` must be a subgraph)."""
    old = before.edge_set()
    return [e for e in after.edges() if e not in old]


@dataclass(frozen=True)
class RejectionResult:
    """Outcome of rejection sampling from the triangle-free m-edge graphs."""

    graph: Optional[Graph]
    attempts: int
    max_tries: int

    @property
    def exhausted(self) -> bool:
        """No triangle-free draw within the allowed attempts."""
        return self.graph is None

    @property
    def acceptance_rate(self) -> float:
        """Accepted draws per attempt (0 when nothing was accepted)."""
        if self.graph is None or not self.attempts:
            return 0.0
        return 1.0 / self.attempts


def sample_uniform_triangle_free(
    n: int, m: int, seed: RngSeed, max_tries: int, max_n: int = 30
) -> RejectionResult:
    """Draw T(n,m) exactly uniformly by rejecting G(n,m) draws that contain a triangle.

    Args:
        n: Number of vertices.
        m: Number of edges.
        seed: Stream for the draws.
        max_tries: Attempts before giving up.
        max_n: Feasibility guard on n.

    Returns:
        The accepted graph with the number of attempts used, or an exhausted result.

    Raises:
        InstanceTooLargeError: If n exceeds the guard.
    """
    if n > max_n:
        raise InstanceTooLargeError(f"rejection sampling with n={n}", f"n <= {max_n}")
    if max_tries < 1:
        raise InvalidInputError(f"max_tries must be at least 1, got {max_tries}")
    if m > n * n // 4:
        logger.warning("no triangle-free graph on %d vertices has %d edges", n, m)
        return RejectionResult(None, 0, max_tries)
    rng = seed.generator()
    for attempt in range(1, max_tries + 1):
        graph = _gnm_from(n, m, rng)
        if not has_clique(graph, 3):
            logger.debug("accepted T(%d,%d) after %d attempts", n, m, attempt)
            return RejectionResult(graph, attempt, max_tries)
    logger.warning("rejection sampler exhausted %d attempts for n=%d, m=%d", max_tries, n, m)
    return RejectionResult(None, max_tries, max_tries)

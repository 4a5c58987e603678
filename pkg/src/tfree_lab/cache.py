"""In-memory caching with TTL for solved tool calls."""

import json
import time
from typing import Any


def solve_key(arguments: dict[str, Any]) -> str:
    """Canonical key of a tool's arguments (key order does not matter)."""
    return json.dumps(arguments, sort_keys=True, separators=(",", ":"))


class SolveCache:
    """Results of exact solves keyed by tool name and arguments.

    Every tool of the lab is deterministic in its arguments (sampling included,
    through the seed), so a hit can be returned as-is until it expires. Entries are
    stored as (expiry on the monotonic clock, result) pairs.
    """

    def __init__(self, ttl: float = 300.0) -> None:
        """Initialize the cache.

        Args:
            ttl: Time-to-live for entries in seconds (default: 5 minutes).
        """
        self.ttl = ttl
        self._entries: dict[str, dict[str, tuple[float, Any]]] = {}
        self.hits = 0
        self.misses = 0

    def _drop_expired(self, solved: dict[str, tuple[float, Any]]) -> None:
        now = time.monotonic()
        for key in [key for key, (expires_at, _) in solved.items() if now > expires_at]:
            del solved[key]

    def get(self, tool: str, arguments: dict[str, Any]) -> Any | None:
        """Cached result of a call, or None if absent or expired."""
        solved = self._entries.get(tool)
        if solved is None:
            self.misses += 1
            return None
        self._drop_expired(solved)
        entry = solved.get(solve_key(arguments))
        if entry is None:
            self.misses += 1
            return None
        self.hits += 1
        return entry[1]

    def set(self, tool: str, arguments: dict[str, Any], value: Any) -> None:
        """Cache the result of a call."""
        expires_at = time.monotonic() + self.ttl
        self._entries.setdefault(tool, {})[solve_key(arguments)] = (expires_at, value)

    def clear(self) -> None:
        """Clear all entries and counters."""
        self._entries.clear()
        self.hits = 0
        self.misses = 0

    def get_stats(self) -> dict[str, int]:
        """Entries per tool plus hit and miss counts."""
        stats = {tool: len(solved) for tool, solved in sorted(self._entries.items())}
        stats["hits"] = self.hits
        stats["misses"] = self.misses
        return stats

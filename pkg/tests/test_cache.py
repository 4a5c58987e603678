"""Tests for the solve cache."""

import time

from tfree_lab.cache import SolveCache, solve_key


class TestSolveKey:
    """Tests for argument keys."""

    def test_key_ignores_order(self):
        """Test the key does not depend on argument order."""
        first = solve_key({"n": 4, "edges": [[1, 2]], "l": 2})
        second = solve_key({"l": 2, "n": 4, "edges": [[1, 2]]})
        assert first == second

    def test_key_distinguishes_values(self):
        """Test different arguments give different keys."""
        assert solve_key({"n": 4, "l": 2}) != solve_key({"n": 4, "l": 3})


class TestSolveCache:
    """Tests for SolveCache class."""

    def test_initialization(self):
        """Test an empty cache reports no entries."""
        cache = SolveCache(ttl=60.0)
        assert cache.ttl == 60.0
        assert cache.get_stats() == {"hits": 0, "misses": 0}

    def test_get_and_set(self):
        """Test a stored result is returned for equal arguments only."""
        cache = SolveCache()
        cache.set("max_cut", {"n": 3, "l": 2}, {"b": 2})
        assert cache.get("max_cut", {"l": 2, "n": 3}) == {"b": 2}
        assert cache.get("max_cut", {"n": 3, "l": 3}) is None
        assert cache.get("max_triangle_free", {"n": 3, "l": 2}) is None
        stats = cache.get_stats()
        assert stats["max_cut"] == 1
        assert stats["hits"] == 1
        assert stats["misses"] == 2

    def test_expiration(self):
        """Test entries disappear after the TTL."""
        cache = SolveCache(ttl=0.1)
        cache.set("max_cut", {"n": 3}, {"b": 2})
        assert cache.get("max_cut", {"n": 3}) == {"b": 2}
        time.sleep(0.2)
        assert cache.get("max_cut", {"n": 3}) is None
        assert cache.get_stats()["max_cut"] == 0

    def test_expiry_is_per_entry(self):
        """Test an expired entry is dropped while a later one stays live."""
        cache = SolveCache(ttl=1.0)
        cache.set("max_cut", {"n": 3}, {"b": 2})
        time.sleep(0.6)
        cache.set("max_cut", {"n": 4}, {"b": 4})
        time.sleep(0.6)
        assert cache.get("max_cut", {"n": 3}) is None
        assert cache.get("max_cut", {"n": 4}) == {"b": 4}
        assert cache.get_stats()["max_cut"] == 1

    def test_clear(self):
        """Test clear drops entries and counters."""
        cache = SolveCache()
        cache.set("bounds", {"formula": "t_i"}, {"value": 3.6})
        cache.get("bounds", {"formula": "t_i"})
        cache.clear()
        assert cache.get_stats() == {"hits": 0, "misses": 0}
        assert cache.get("bounds", {"formula": "t_i"}) is None

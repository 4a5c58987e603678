"""Tests for the MCP tool surface."""

import json
from unittest.mock import patch

import pytest

from tfree_lab import server
from tfree_lab.cache import SolveCache
from tfree_lab.server import call_tool, list_tools

TRIANGLE = "3 3\n1 2\n1 3\n2 3\n"


@pytest.fixture(autouse=True)
def fresh_cache():
    """Give every test its own solve cache."""
    cache = SolveCache()
    with patch.object(server, "_cache", cache):
        yield cache


async def _call(name, arguments):
    result = await call_tool(name, arguments)
    assert len(result) == 1
    return result[0].text


class TestListTools:
    """Tests for tool discovery."""

    @pytest.mark.asyncio
    async def test_tool_names(self):
        """Test every tool is advertised with an object schema."""
        tools = await list_tools()
        assert [t.name for t in tools] == [
            "sample_graph",
            "max_cut",
            "max_triangle_free",
            "perturbation_event",
            "fkg_check",
            "bound",
            "run_experiment",
        ]
        assert all(t.inputSchema["type"] == "object" for t in tools)


class TestCallTool:
    """Tests for tool calls."""

    @pytest.mark.asyncio
    async def test_max_cut(self):
        """Test b(K3) = 2 with the canonical bipartition."""
        payload = json.loads(await _call("max_cut", {"edge_list": TRIANGLE}))
        assert payload["b"] == 2
        assert payload["canonical_parts"] == [[1], [2, 3]]

    @pytest.mark.asyncio
    async def test_max_triangle_free(self):
        """Test t(K3) = 2 with three bipartite witnesses."""
        payload = json.loads(await _call("max_triangle_free", {"edge_list": TRIANGLE}))
        assert payload["t"] == 2
        assert len(payload["witnesses"]) == 3
        assert payload["all_k_partite"] is True

    @pytest.mark.asyncio
    async def test_sample_graph_is_seeded(self):
        """Test the same seed and stream give the same edge list."""
        arguments = {"n": 6, "M": 4, "seed": 11}
        first = json.loads(await _call("sample_graph", arguments))
        server._cache.clear()
        second = json.loads(await _call("sample_graph", arguments))
        assert first == second
        assert first["m"] == 4

    @pytest.mark.asyncio
    async def test_perturbation_event(self):
        """Test inside edges accept both 'u-v' strings and pairs."""
        arguments = {
            "edge_list": "4 6\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n",
            "partition": "1,2|3,4",
        }
        as_text = json.loads(await _call("perturbation_event", {**arguments, "added": ["1-2"]}))
        as_pairs = json.loads(await _call("perturbation_event", {**arguments, "added": [[1, 2]]}))
        assert as_text == as_pairs
        assert as_text["min_deletions"] == 2

    @pytest.mark.asyncio
    async def test_fkg_check(self):
        """Test the exact check on three vertices."""
        arguments = {"n": 3, "p": 0.5, "partition": "1,2|3", "s": ["1-2"], "r0": 1, "s0": 1}
        assert json.loads(await _call("fkg_check", arguments))["holds"] is True

    @pytest.mark.asyncio
    async def test_bound(self):
        """Test a named formula evaluation."""
        arguments = {"formula": "t_i", "inputs": {"r": 1, "s": 5, "n": 10}}
        assert json.loads(await _call("bound", arguments))["ceiling"] == 4

    @pytest.mark.asyncio
    async def test_run_experiment(self):
        """Test the summary-only and full results."""
        spec = {"experiment": "t_equals_b", "n": 5, "p": 0.5, "trials": 2, "master_seed": 3}
        summary = json.loads(await _call("run_experiment", {"spec": spec}))
        assert set(summary) == {"schema_version", "summary"}
        assert summary["summary"]["trials"] == 2
        full = json.loads(await _call("run_experiment", {"spec": spec, "summary_only": False}))
        assert len(full["records"]) == 2
        assert full["summary"] == summary["summary"]


class TestErrors:
    """Tests for errors reported as text."""

    @pytest.mark.asyncio
    async def test_unknown_tool(self):
        """Test an unknown tool name."""
        assert await _call("nope", {}) == "Error: ValueError: Unknown tool: nope"

    @pytest.mark.asyncio
    async def test_invalid_input(self):
        """Test lab errors and missing arguments come back as text."""
        text = await _call("max_cut", {"edge_list": "3 2\n1 2\n"})
        assert text.startswith("Error: InvalidInputError: ")
        assert (await _call("max_cut", {})).startswith("Error: KeyError: ")
        assert (await _call("sample_graph", {"n": 4})).startswith("Error: ValueError: ")

    @pytest.mark.asyncio
    async def test_oversized_instance(self):
        """Test the max-cut guard is reported."""
        text = await _call("max_cut", {"edge_list": "29 0\n"})
        assert text.startswith("Error: InstanceTooLargeError: ")

    @pytest.mark.asyncio
    async def test_errors_are_not_cached(self, fresh_cache):
        """Test failed calls leave the cache empty."""
        await _call("max_cut", {"edge_list": "29 0\n"})
        assert fresh_cache.get_stats() == {"hits": 0, "misses": 1}


class TestCaching:
    """Tests for the solve cache in front of the tools."""

    @pytest.mark.asyncio
    async def test_repeat_call_hits_cache(self, fresh_cache):
        """Test a repeated call is answered without solving again."""
        with patch.object(server, "_solve", wraps=server._solve) as solve:
            first = await _call("max_cut", {"edge_list": TRIANGLE, "l": 2})
            second = await _call("max_cut", {"l": 2, "edge_list": TRIANGLE})
        assert first == second
        assert solve.call_count == 1
        assert fresh_cache.get_stats()["hits"] == 1

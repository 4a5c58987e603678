"""MCP server exposing the lab's solvers, events, bounds and experiments as tools."""

import argparse
import asyncio
import json
import logging
from typing import Any

from mcp.server import Server
from mcp.server.stdio import stdio_server
from mcp.types import Resource, TextContent, Tool

from .bounds import parameter_formulas
from .cache import SolveCache
from .cli import configure_logging, parse_edge
from .config import ExperimentSpec, default_seed
from .cuts import enumerate_near_optimal, max_cut, parse_partition
from .errors import LabError
from .extremal import max_clique_free
from .graph import Edge, Graph, format_edge_list, read_edge_list
from .harness import emit, run_experiment
from .lattice import ProductMeasure, fkg_check
from .perturb import indicator_E1, indicator_E2, perturbation_report
from .randgen import RngSeed, sample_gnm, sample_gnp

logger = logging.getLogger(__name__)

# Initialize server
app = Server("tfree-lab")

_cache = SolveCache()

_EDGE_LIST = {
    "type": "string",
    "description": "Graph in edge-list format: a line 'n m' then m lines 'u v' (1-based)",
}
_PARTITION = {
    "type": "string",
    "description": "Bipartition written like '1,2|3,4'",
}
_EDGES = {
    "type": "array",
    "items": {"type": "string"},
    "description": "Edges written like '1-2'",
}


@app.list_tools()
async def list_tools() -> list[Tool]:
    """List available MCP tools."""
    return [
        Tool(
            name="sample_graph",
            description="Draw a seeded G(n,p) or G(n,M) random graph; returns an edge list",
            inputSchema={
                "type": "object",
                "properties": {
                    "n": {"type": "integer", "description": "Number of vertices"},
                    "p": {"type": "number", "description": "Edge probability (or give M)"},
                    "M": {"type": "integer", "description": "Number of edges (or give p)"},
                    "seed": {"type": "integer", "description": "Master seed"},
                    "stream": {
                        "type": "integer",
                        "description": "Stream index (default: 0)",
                        "default": 0,
                    },
                },
                "required": ["n"],
            },
        ),
        Tool(
            name="max_cut",
            description="Exact maximum l-cut with the canonical optimum and, optionally, "
            "every partition within a gap bound",
            inputSchema={
                "type": "object",
                "properties": {
                    "edge_list": _EDGE_LIST,
                    "l": {"type": "integer", "description": "Number of parts", "default": 2},
                    "near": {"type": "integer", "description": "Gap bound for enumeration"},
                },
                "required": ["edge_list"],
            },
        ),
        Tool(
            name="max_triangle_free",
            description="Exact maximum K_l-free subgraphs (triangle-free for l=3) and "
            "whether all of them are (l-1)-partite",
            inputSchema={
                "type": "object",
                "properties": {
                    "edge_list": _EDGE_LIST,
                    "l": {"type": "integer", "description": "Clique size", "default": 3},
                    "witnesses": {
                        "type": "integer",
                        "description": "Maximum subgraphs to enumerate (default: 32)",
                    },
                },
                "required": ["edge_list"],
            },
        ),
        Tool(
            name="perturbation_event",
            description="Decide the perturbation events E and E2 for a graph, a bipartition "
            "and a set of inside edges",
            inputSchema={
                "type": "object",
                "properties": {
                    "edge_list": _EDGE_LIST,
                    "partition": _PARTITION,
                    "added": _EDGES,
                },
                "required": ["edge_list", "partition"],
            },
        ),
        Tool(
            name="fkg_check",
            description="Exact E[fg] <= E[f]E[g] check for the E1 and E2 indicators under "
            "G(n,p), enumerating every graph on n <= 5 vertices",
            inputSchema={
                "type": "object",
                "properties": {
                    "n": {"type": "integer", "description": "Number of vertices"},
                    "p": {"type": "number", "description": "Edge probability in (0, 1)"},
                    "partition": _PARTITION,
                    "s": _EDGES,
                    "r0": {"type": "integer", "description": "Gap threshold of E1"},
                    "s0": {"type": "integer", "description": "Distance threshold of E1"},
                },
                "required": ["n", "p", "partition", "r0", "s0"],
            },
        ),
        Tool(
            name="bound",
            description="Evaluate a named formula (s0, r0, t_i, chernoff_upper, ...)",
            inputSchema={
                "type": "object",
                "properties": {
                    "formula": {"type": "string", "description": "Formula name"},
                    "inputs": {
                        "type": "object",
                        "description": "Formula parameters by name",
                        "additionalProperties": {"type": "number"},
                    },
                },
                "required": ["formula", "inputs"],
            },
        ),
        Tool(
            name="run_experiment",
            description="Run a seeded Monte Carlo experiment; returns the JSON result "
            "(records and summary)",
            inputSchema={
                "type": "object",
                "properties": {
                    "spec": {
                        "type": "object",
                        "description": "ExperimentSpec fields (experiment, n, p or M, trials, ...)",
                    },
                    "summary_only": {
                        "type": "boolean",
                        "description": "Return only the summary (default: true)",
                        "default": True,
                    },
                },
                "required": ["spec"],
            },
        ),
    ]


def _graph(arguments: dict[str, Any]) -> Graph:
    return read_edge_list(arguments["edge_list"])


def _edges(values: list[Any]) -> list[Edge]:
    out = []
    for value in values:
        if isinstance(value, str):
            out.append(parse_edge(value))
        else:
            u, v = value
            out.append((int(u), int(v)))
    return out


def _solve(name: str, arguments: dict[str, Any]) -> Any:
    if name == "sample_graph":
        seed = RngSeed(default_seed(arguments.get("seed")), arguments.get("stream", 0))
        if arguments.get("p") is not None:
            graph = sample_gnp(arguments["n"], arguments["p"], seed)
        elif arguments.get("M") is not None:
            graph = sample_gnm(arguments["n"], arguments["M"], seed)
        else:
            raise ValueError("sample_graph needs p or M")
        return {"n": graph.n, "m": graph.m, "edge_list": format_edge_list(graph)}

    elif name == "max_cut":
        graph = _graph(arguments)
        ell = arguments.get("l", 2)
        near = arguments.get("near")
        survey = max_cut(graph, ell) if near is None else enumerate_near_optimal(graph, near, ell)
        return survey.to_dict()

    elif name == "max_triangle_free":
        graph = _graph(arguments)
        solution = max_clique_free(graph, arguments.get("l", 3), arguments.get("witnesses"))
        return solution.to_dict()

    elif name == "perturbation_event":
        graph = _graph(arguments)
        partition = parse_partition(arguments["partition"], graph.n)
        report = perturbation_report(graph, partition, _edges(arguments.get("added", [])))
        return report.to_dict()

    elif name == "fkg_check":
        n = arguments["n"]
        partition = parse_partition(arguments["partition"], n)
        result = fkg_check(
            n,
            ProductMeasure(arguments["p"], n),
            indicator_E1(partition, arguments["r0"], arguments["s0"]),
            indicator_E2(partition, _edges(arguments.get("s", []))),
        )
        return result.to_dict()

    elif name == "bound":
        return parameter_formulas(arguments["formula"], arguments["inputs"]).model_dump(mode="json")

    elif name == "run_experiment":
        result = run_experiment(ExperimentSpec.model_validate(arguments["spec"]))
        if arguments.get("summary_only", True):
            return {"schema_version": result.schema_version, "summary": result.summary}
        return json.loads(emit(result, "json"))

    else:
        raise ValueError(f"Unknown tool: {name}")


@app.call_tool()
async def call_tool(name: str, arguments: Any) -> list[TextContent]:
    """Handle tool calls.

    Results are cached by tool name and arguments. Invalid arguments, oversized
    instances and exhausted budgets come back as an error text, not an exception.
    """
    arguments = dict(arguments or {})
    cached = _cache.get(name, arguments)
    if cached is not None:
        logger.debug("cache hit for %s", name)
        return [TextContent(type="text", text=cached)]
    try:
        payload = _solve(name, arguments)
    except (LabError, ValueError, KeyError, TypeError) as e:
        logger.warning("tool %s failed: %s: %s", name, type(e).__name__, e)
        return [TextContent(type="text", text=f"Error: {type(e).__name__}: {e}")]
    text = json.dumps(payload, sort_keys=True, indent=2)
    _cache.set(name, arguments, text)
    return [TextContent(type="text", text=text)]


@app.list_resources()
async def list_resources() -> list[Resource]:
    """List available resources."""
    return []


async def main() -> None:
    """Run the MCP server over stdio."""
    async with stdio_server() as (read_stream, write_stream):
        await app.run(read_stream, write_stream, app.create_initialization_options())


def run() -> None:
    """Entry point for the MCP server."""
    global _cache

    parser = argparse.ArgumentParser(description="MCP server for the tfree-lab solvers")
    parser.add_argument(
        "--cache-ttl",
        type=float,
        default=300.0,
        help="Seconds a solved tool call stays cached (default: 300)",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Log at DEBUG level")
    args = parser.parse_args()
    if args.cache_ttl <= 0:
        parser.error("--cache-ttl must be positive")

    configure_logging(args.verbose)
    _cache = SolveCache(ttl=args.cache_ttl)
    asyncio.run(main())


if __name__ == "__main__":
    run()

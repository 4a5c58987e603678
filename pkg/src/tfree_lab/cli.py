"""Command-line front end: ``tfree-lab <verb> ...``.

Results go to stdout (or ``--output``) as JSON, edge lists or CSV; diagnostics go
to stderr. Exit codes: 0 success, 2 invalid input or spec, 3 censored by a solver
budget (results are still written).
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Optional

from . import __version__
from .bounds import parameter_formulas
from .config import SEED_ENV_VAR, default_seed, load_spec
from .cuts import enumerate_near_optimal, max_cut, parse_partition
from .errors import BudgetExceededError, InstanceTooLargeError, InvalidInputError, LabError
from .extremal import max_clique_free
from .graph import Edge, format_edge_list, load_graph
from .harness import emit, load_results, run_experiment
from .lattice import ProductMeasure, fkg_check
from .perturb import indicator_E1, indicator_E2, perturbation_report
from .randgen import RngSeed, evolve, sample_gnm, sample_gnp

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_CENSORED = 3


def configure_logging(verbose: bool = False) -> None:
    """Send package logs to stderr with the ``[tfree-lab]`` prefix."""
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("[tfree-lab] %(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger("tfree_lab")
    root.handlers = [handler]
    root.setLevel(logging.DEBUG if verbose else logging.INFO)
    root.propagate = False


def parse_edge(text: str) -> Edge:
    """Parse an edge written "u-v"."""
    try:
        u, v = (int(x) for x in text.split("-"))
    except ValueError:
        raise InvalidInputError(f"edge {text!r} must look like 'u-v'") from None
    return (u, v)


def _write(data: bytes, output: Optional[Path]) -> None:
    if output is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        output.write_bytes(data)
        logger.info("wrote %s", output)


def _json(payload: Any) -> bytes:
    return (json.dumps(payload, sort_keys=True, indent=2) + "\n").encode("utf-8")


def _cmd_sample(args: argparse.Namespace) -> int:
    seed = RngSeed(default_seed(args.seed), args.stream)
    if args.p is not None:
        graph = sample_gnp(args.n, args.p, seed)
    else:
        graph = sample_gnm(args.n, args.M, seed)
    if args.evolve:
        graph = evolve(graph, args.evolve, seed.child(0))
    _write(format_edge_list(graph).encode("utf-8"), args.output)
    return EXIT_OK


def _cmd_maxcut(args: argparse.Namespace) -> int:
    graph = load_graph(args.input)
    if args.near is None:
        survey = max_cut(graph, args.ell)
    else:
        survey = enumerate_near_optimal(graph, args.near, args.ell)
    _write(_json(survey.to_dict()), args.output)
    return EXIT_OK


def _cmd_tfree(args: argparse.Namespace) -> int:
    graph = load_graph(args.input)
    solution = max_clique_free(graph, args.ell, args.witnesses)
    _write(_json(solution.to_dict()), args.output)
    return EXIT_CENSORED if not solution.optimal else EXIT_OK


def _cmd_perturb(args: argparse.Namespace) -> int:
    graph = load_graph(args.input)
    partition = parse_partition(args.partition, graph.n)
    added = [parse_edge(e) for e in args.add]
    report = perturbation_report(graph, partition, added)
    _write(_json(report.to_dict()), args.output)
    return EXIT_OK


def _cmd_fkg(args: argparse.Namespace) -> int:
    partition = parse_partition(args.partition, args.n)
    added = [parse_edge(e) for e in args.s]
    result = fkg_check(
        args.n,
        ProductMeasure(args.p, args.n),
        indicator_E1(partition, args.r0, args.s0),
        indicator_E2(partition, added),
    )
    _write(_json(result.to_dict()), args.output)
    return EXIT_OK


def _formula_inputs(extra: list[str]) -> dict[str, float]:
    inputs: dict[str, float] = {}
    it = iter(extra)
    for flag in it:
        if not flag.startswith("--"):
            raise InvalidInputError(f"expected a '--name value' pair, got {flag!r}")
        name = flag[2:]
        if "=" in name:
            name, raw = name.split("=", 1)
        else:
            raw = next(it, None)
            if raw is None:
                raise InvalidInputError(f"missing value for {flag}")
        try:
            inputs[name] = float(raw)
        except ValueError:
            raise InvalidInputError(f"{flag} needs a number, got {raw!r}") from None
    return inputs


def _cmd_bounds(args: argparse.Namespace, extra: list[str]) -> int:
    report = parameter_formulas(args.formula, _formula_inputs(extra))
    _write(_json(report.model_dump(mode="json")), args.output)
    return EXIT_OK


def _cmd_experiment(args: argparse.Namespace) -> int:
    if args.action == "emit":
        result = load_results(args.input)
        _write(emit(result, args.format), args.output)
        return EXIT_OK
    overrides = {"master_seed": args.seed, "trials": args.trials, "workers": args.workers}
    spec = load_spec(args.spec, overrides)
    result = run_experiment(spec)
    _write(emit(result, args.format), args.output)
    return EXIT_CENSORED if result.summary["censored"] else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    """The argument parser of every verb."""
    parser = argparse.ArgumentParser(
        prog="tfree-lab",
        description="Exact max-cut and maximum triangle-free subgraph laboratory for random graphs",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="Log at DEBUG level")
    verbs = parser.add_subparsers(dest="command", required=True)

    def add_output(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--output", type=Path, help="Write here instead of stdout")

    sample = verbs.add_parser("sample", help="Draw G(n,p) or G(n,M) as an edge list")
    sample.add_argument("--n", type=int, required=True, help="Number of vertices")
    density = sample.add_mutually_exclusive_group(required=True)
    density.add_argument("--p", type=float, help="Edge probability")
    density.add_argument("--M", type=int, help="Number of edges")
    sample.add_argument(
        "--seed", type=int, help=f"Master seed (default: ${SEED_ENV_VAR}, then 0)"
    )
    sample.add_argument("--stream", type=int, default=0, help="Stream index (default: 0)")
    sample.add_argument("--evolve", type=int, default=0, help="Then add this many random edges")
    add_output(sample)

    maxcut = verbs.add_parser("maxcut", help="Exact maximum l-cut and near-optimal partitions")
    maxcut.add_argument("--input", type=Path, required=True, help="Edge-list file")
    maxcut.add_argument("--l", dest="ell", type=int, default=2, help="Number of parts")
    maxcut.add_argument("--near", type=int, help="List every partition with gap at most this")
    add_output(maxcut)

    tfree = verbs.add_parser("tfree", help="Maximum K_l-free subgraphs")
    tfree.add_argument("--input", type=Path, required=True, help="Edge-list file")
    tfree.add_argument("--l", dest="ell", type=int, default=3, help="Forbidden clique size")
    tfree.add_argument("--witnesses", type=int, help="Maximum subgraphs to enumerate")
    add_output(tfree)

    perturb = verbs.add_parser("perturb", help="Perturbation events E and E2")
    perturb.add_argument("--input", type=Path, required=True, help="Edge-list file")
    perturb.add_argument("--partition", required=True, help='Bipartition such as "1,2|3"')
    perturb.add_argument(
        "--add", action="append", default=[], help="Inside edge 'u-v' to add (repeatable)"
    )
    add_output(perturb)

    fkg = verbs.add_parser("fkg-check", help="Exact FKG check for the E1/E2 indicators")
    fkg.add_argument("--n", type=int, required=True, help="Number of vertices")
    fkg.add_argument("--p", type=float, required=True, help="Edge probability in (0, 1)")
    fkg.add_argument("--partition", required=True, help='Bipartition such as "1,2|3,4"')
    fkg.add_argument("--s", action="append", default=[], help="Edge 'u-v' of S (repeatable)")
    fkg.add_argument("--r0", type=int, required=True, help="Gap threshold of E1")
    fkg.add_argument("--s0", type=int, required=True, help="Distance threshold of E1")
    add_output(fkg)

    bounds = verbs.add_parser(
        "bounds", help="Evaluate a formula; inputs follow as --name value pairs"
    )
    bounds.add_argument("--formula", required=True, help="Formula name, e.g. s0 or chernoff_upper")
    add_output(bounds)

    experiment = verbs.add_parser("experiment", help="Run or re-emit seeded experiments")
    actions = experiment.add_subparsers(dest="action", required=True)
    run_cmd = actions.add_parser("run", help="Run an experiment spec")
    run_cmd.add_argument("--spec", type=Path, required=True, help="JSON ExperimentSpec")
    run_cmd.add_argument("--seed", type=int, help="Override the master seed")
    run_cmd.add_argument("--trials", type=int, help="Override the number of trials")
    run_cmd.add_argument("--workers", type=int, help="Override the number of workers")
    run_cmd.add_argument("--format", choices=["json", "csv"], default="json")
    add_output(run_cmd)
    emit_cmd = actions.add_parser("emit", help="Re-emit a saved JSON result")
    emit_cmd.add_argument("--input", type=Path, required=True, help="JSON result file")
    emit_cmd.add_argument("--format", choices=["json", "csv"], default="csv")
    add_output(emit_cmd)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    """Parse arguments, dispatch and map errors to exit codes."""
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    if extra and args.command != "bounds":
        parser.error(f"unrecognized arguments: {' '.join(extra)}")
    configure_logging(args.verbose)
    try:
        if args.command == "bounds":
            return _cmd_bounds(args, extra)
        handlers = {
            "sample": _cmd_sample,
            "maxcut": _cmd_maxcut,
            "tfree": _cmd_tfree,
            "perturb": _cmd_perturb,
            "fkg-check": _cmd_fkg,
            "experiment": _cmd_experiment,
        }
        return handlers[args.command](args)
    except BudgetExceededError as e:
        logger.error("censored: %s", e)
        return EXIT_CENSORED
    except (InstanceTooLargeError, ValueError, OSError) as e:
        logger.error("%s", e)
        return EXIT_INVALID
    except LabError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_INVALID


def run() -> None:
    """Console-script entry point."""
    sys.exit(main())


if __name__ == "__main__":
    run()

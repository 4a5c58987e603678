"""Seeded Monte Carlo experiments, their aggregate summaries and result serialization.

Trial i of a run draws every random choice from the stream (master_seed, i), so a
spec fully determines its records. Trials that hit a solver budget are kept and
marked ``censored``; summaries only aggregate ``ok`` records.
"""

import csv
import io
import json
import logging
import math
import multiprocessing as mp
from collections.abc import Callable
from dataclasses import dataclass, field
from math import comb
from pathlib import Path
from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, Field
from scipy.stats import norm

from .bounds import (
    b_bounds,
    balance_bound,
    evolution_lower,
    evolution_upper,
    inside_edge_allowance,
    nonedge_bound,
    s0,
    t_i,
    threshold_m,
)
from .config import ExperimentSpec
from .cuts import (
    cut_size,
    enumerate_near_optimal,
    is_balanced,
    local_search_cut,
    max_cut,
    min_nonedges_optimal,
)
from .diagnostics import horizontal_excess
from .errors import BudgetExceededError, InstanceTooLargeError, InvalidInputError
from .extremal import ExtremalSolution, is_k_partite, max_clique_free
from .graph import Graph
from .randgen import RngSeed, evolve, sample_gnm, sample_gnp, sample_uniform_triangle_free

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "tfree-lab/results/1"

CSV_PREFIX_COLUMNS = ("stream_index", "master_seed", "status", "note")

Measurement = Union[bool, int, float, None]
TrialStatus = Literal["ok", "censored"]


class TrialRecord(BaseModel):
    """Everything one trial measured, tagged with the stream that reproduces it."""

    master_seed: int = Field(description="Master seed of the run")
    stream_index: int = Field(description="Stream of this trial; (master_seed, stream_index)")
    status: TrialStatus = Field(description="'censored' when a solver budget cut the trial short")
    note: Optional[str] = Field(default=None, description="Why the trial was censored")
    measurements: dict[str, Measurement] = Field(default_factory=dict)
    series: dict[str, list[list[int]]] = Field(
        default_factory=dict, description="Tabular measurements (JSON output only)"
    )


class ExperimentResult(BaseModel):
    """A versioned run: the spec, its records in stream order and their summary."""

    schema_version: str = Field(default=SCHEMA_VERSION)
    spec: ExperimentSpec
    records: list[TrialRecord] = Field(default_factory=list)
    summary: dict[str, Any] = Field(default_factory=dict)


@dataclass
class _Observation:
    measurements: dict[str, Measurement] = field(default_factory=dict)
    series: dict[str, list[list[int]]] = field(default_factory=dict)
    censored: Optional[str] = None


def _sample(spec: ExperimentSpec, seed: RngSeed) -> Graph:
    if spec.p is not None:
        return sample_gnp(spec.n, spec.p, seed)
    return sample_gnm(spec.n, spec.edge_target, seed)


def _finite(value: float) -> Optional[float]:
    return value if math.isfinite(value) else None


def _extremal(spec: ExperimentSpec, seed: RngSeed, obs: _Observation) -> ExtremalSolution:
    graph = _sample(spec, seed)
    b_value = max_cut(graph, spec.ell - 1, spec.budgets).b_value
    solution = max_clique_free(graph, spec.ell, spec.witness_limit, spec.budgets)
    excess = [horizontal_excess(w, spec.ell - 1, spec.budgets) for w in solution.witnesses]
    obs.measurements.update(
        m=graph.m,
        b=b_value,
        t=solution.t_value,
        t_equals_b=solution.t_value == b_value,
        witnesses=len(solution.witnesses),
        truncated=solution.truncated,
        all_k_partite=solution.all_k_partite,
        max_horizontal_excess=max(excess) if excess else None,
        nodes=solution.nodes,
    )
    p = spec.edge_probability
    if 0.0 < p <= 1.0 and spec.n > 1:
        allowance = inside_edge_allowance(p, spec.n, spec.ell).value
        obs.measurements["excess_allowance"] = _finite(allowance)
    if not solution.optimal:
        obs.censored = "clique-free search exhausted its node budget"
    return solution


def _t_equals_b(spec: ExperimentSpec, seed: RngSeed, obs: _Observation) -> None:
    _extremal(spec, seed, obs)


def _all_max_tfree_bipartite(spec: ExperimentSpec, seed: RngSeed, obs: _Observation) -> None:
    solution = _extremal(spec, seed, obs)
    if obs.censored:
        return
    if solution.all_k_partite is None:
        obs.censored = "no witness could be tested for partiteness"
    elif solution.all_k_partite and solution.truncated:
        obs.censored = f"only {len(solution.witnesses)} maximum subgraphs were enumerated"


def _b_bounds_check(spec: ExperimentSpec, seed: RngSeed, obs: _Observation) -> None:
    graph = _sample(spec, seed)
    interval = b_bounds(spec.n, graph.m).interval
    assert interval is not None
    low, high = interval
    exact = graph.n <= spec.budgets.maxcut_max_n
    if exact:
        lower = upper = max_cut(graph, 2, spec.budgets).b_value
    else:
        lower, upper = local_search_cut(graph)[1], graph.m
    obs.measurements.update(
        m=graph.m, exact=exact, b_lower=lower, b_upper=upper, bound_low=low, bound_high=high
    )
    if lower >= low and upper <= high:
        obs.measurements["within_bounds"] = True
    elif lower > high or upper < low:
        obs.measurements["within_bounds"] = False
    else:
        obs.measurements["within_bounds"] = None
        obs.censored = f"b known only to lie in [{lower}, {upper}]"


def _balance_check(spec: ExperimentSpec, seed: RngSeed, obs: _Observation) -> None:
    graph = _sample(spec, seed)
    survey = enumerate_near_optimal(graph, spec.gap_bound, 2, spec.budgets)
    half = spec.n / 2
    imbalance = max(abs(size - half) for c in survey.near_optimal for size in c.partition.sizes())
    allowance = balance_bound(spec.n, spec.edge_probability, spec.gap_bound).value
    obs.measurements.update(
        b=survey.b_value,
        listed=len(survey.near_optimal),
        max_imbalance=imbalance,
        allowance=allowance,
        balanced=imbalance <= allowance,
        canonical_in_bal=is_balanced(survey.canonical),
    )


def _nonedge_check(spec: ExperimentSpec, seed: RngSeed, obs: _Observation) -> None:
    graph = _sample(spec, seed)
    obs.measurements["m"] = graph.m
    if graph.m == 0:
        obs.censored = "edgeless sample"
        return
    value = min_nonedges_optimal(graph, spec.budgets)
    bound = nonedge_bound(spec.n, graph.m, spec.C_prime).value
    obs.measurements.update(min_nonedges=value, bound=bound, above_bound=value >= bound)


def _maxcut_uniqueness(spec: ExperimentSpec, seed: RngSeed, obs: _Observation) -> None:
    graph = _sample(spec, seed)
    survey = enumerate_near_optimal(graph, 0, spec.parts, spec.budgets)
    widest = survey.max_optimal_distance or 0
    obs.measurements.update(
        m=graph.m,
        b=survey.b_value,
        optimal_count=len(survey.optimal),
        unique=len(survey.optimal) == 1,
        max_optimal_distance=widest,
        within_half=widest <= spec.n // 2,
    )


def _gap_distance_survey(spec: ExperimentSpec, seed: RngSeed, obs: _Observation) -> None:
    graph = _sample(spec, seed)
    slack = max(spec.gap_bound, max(spec.r_grid) - 1)
    survey = enumerate_near_optimal(graph, slack, spec.parts, spec.budgets)
    obs.series["gap_dist"] = [[c.gap, c.dist] for c in survey.near_optimal]
    obs.measurements.update(m=graph.m, b=survey.b_value, listed=len(survey.near_optimal))
    p = min(spec.edge_probability, 1.0)
    for r in sorted(set(spec.r_grid)):
        at_gap = [c.dist for c in survey.near_optimal if c.gap == r - 1]
        threshold = s0(spec.C, spec.omega, r, spec.n, p).ceiling
        assert threshold is not None
        obs.measurements[f"s0_r{r}"] = threshold
        obs.measurements[f"max_dist_r{r}"] = max(at_gap) if at_gap else None
        obs.measurements[f"far_r{r}"] = any(d >= threshold for d in at_gap)


def evolution_schedule(spec: ExperimentSpec) -> list[int]:
    """Edge counts added in the evolution experiment, ascending and distinct.

    An explicit ``t_schedule`` wins; otherwise t_i(r, s, n) is rounded up for every
    r in ``r_grid`` and every s in ``s_grid`` with 0 < s < n.
    """
    if spec.t_schedule:
        return sorted(set(spec.t_schedule))
    grid = spec.s_grid or []
    return sorted(
        {t_i(r, s, spec.n).ceiling or 0 for r in spec.r_grid for s in grid if 0 < s < spec.n}
    )


def _evolution_overtake(spec: ExperimentSpec, seed: RngSeed, obs: _Observation) -> None:
    graph = _sample(spec, seed)
    base = max_cut(graph, 2, spec.budgets)
    star = base.canonical
    missing = comb(spec.n, 2) - graph.m
    obs.measurements.update(m=graph.m, b=base.b_value)
    for k, t in enumerate(evolution_schedule(spec)):
        if t > missing:
            obs.censored = f"cannot add {t} edges to a graph with {missing} non-edges"
            return
        grown = evolve(graph, t, seed.child(k))
        after = max_cut(grown, 2, spec.budgets).b_value
        star_after = cut_size(grown, star)
        delta = after - base.b_value
        obs.measurements[f"delta_b_t{t}"] = delta
        obs.measurements[f"increment_t{t}"] = star_after - base.b_value
        obs.measurements[f"overtake_t{t}"] = after > star_after
        obs.measurements[f"delta_per_edge_t{t}"] = delta / t if t else None
        if graph.m > 0:
            upper = evolution_upper(t, spec.n, graph.m).value
            lower = evolution_lower(t, spec.n, graph.m, spec.C_prime).value
            obs.measurements[f"upper_t{t}"] = upper
            obs.measurements[f"lower_t{t}"] = lower
            obs.measurements[f"within_sandwich_t{t}"] = lower <= delta <= upper


def _uniform_tfree_bipartite(spec: ExperimentSpec, seed: RngSeed, obs: _Observation) -> None:
    m = spec.edge_target
    result = sample_uniform_triangle_free(
        spec.n, m, seed, spec.max_tries, spec.budgets.rejection_max_n
    )
    obs.measurements.update(attempts=result.attempts, acceptance_rate=result.acceptance_rate)
    if spec.n > 1:
        threshold = threshold_m(spec.n).value
        obs.measurements.update(threshold=threshold, above_threshold=m > threshold)
    if result.graph is None:
        obs.censored = f"no triangle-free draw in {result.attempts} attempts"
        return
    obs.measurements["bipartite"] = is_k_partite(result.graph, 2, spec.budgets).colorable


EXPERIMENTS: dict[str, Callable[[ExperimentSpec, RngSeed, _Observation], None]] = {
    "t_equals_b": _t_equals_b,
    "all_max_tfree_bipartite": _all_max_tfree_bipartite,
    "b_bounds_check": _b_bounds_check,
    "balance_check": _balance_check,
    "nonedge_check": _nonedge_check,
    "maxcut_uniqueness": _maxcut_uniqueness,
    "gap_distance_survey": _gap_distance_survey,
    "evolution_overtake": _evolution_overtake,
    "uniform_tfree_bipartite": _uniform_tfree_bipartite,
}


def check_feasible(spec: ExperimentSpec) -> None:
    """Reject specs whose experiment cannot run its exact solvers at this size.

    Raises:
        InvalidInputError: If n is beyond the guard the experiment relies on, or ell < 3
            for an experiment that compares t against the (ell-1)-cut.
    """
    budgets = spec.budgets
    name = spec.experiment
    if name in ("t_equals_b", "all_max_tfree_bipartite"):
        if spec.ell < 3:
            raise InvalidInputError(f"{name} compares against an (ell-1)-cut and needs ell >= 3")
        if spec.n > budgets.tfree_max_n and spec.edge_target > budgets.tfree_max_m:
            raise InvalidInputError(
                f"{name} with n={spec.n} and about {spec.edge_target} edges exceeds "
                f"n <= {budgets.tfree_max_n} or m <= {budgets.tfree_max_m}"
            )
    elif name == "uniform_tfree_bipartite":
        if spec.n > budgets.rejection_max_n:
            raise InvalidInputError(
                f"{name} with n={spec.n} exceeds n <= {budgets.rejection_max_n}"
            )
    elif name != "b_bounds_check":
        bipartite_only = name in ("balance_check", "nonedge_check", "evolution_overtake")
        parts = 2 if bipartite_only else spec.parts
        if parts == 2 and spec.n > budgets.maxcut_max_n:
            raise InvalidInputError(f"{name} with n={spec.n} exceeds n <= {budgets.maxcut_max_n}")
        if parts > 2 and spec.n * math.log2(parts) > budgets.maxcut_max_assignment_bits:
            raise InvalidInputError(
                f"{name} with n={spec.n}, {parts} parts exceeds n*log2(l) <= "
                f"{budgets.maxcut_max_assignment_bits}"
            )


def run_trial(spec: ExperimentSpec, stream_index: int) -> TrialRecord:
    """Run trial ``stream_index`` of a spec.

    Budget exhaustion and per-sample size guards censor the trial instead of failing
    the run.
    """
    seed = RngSeed(spec.master_seed, stream_index)
    obs = _Observation()
    try:
        EXPERIMENTS[spec.experiment](spec, seed, obs)
    except (BudgetExceededError, InstanceTooLargeError) as e:
        obs.censored = str(e)
    if obs.censored:
        logger.debug("trial %d censored: %s", stream_index, obs.censored)
    return TrialRecord(
        master_seed=spec.master_seed,
        stream_index=stream_index,
        status="censored" if obs.censored else "ok",
        note=obs.censored,
        measurements=obs.measurements,
        series=obs.series,
    )


def wilson_interval(successes: int, total: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion.

    Raises:
        InvalidInputError: If total is not positive or successes lies outside [0, total].
    """
    if total <= 0 or not 0 <= successes <= total:
        raise InvalidInputError(
            f"need 0 <= successes <= total and total > 0, got {successes}/{total}"
        )
    z = float(norm.ppf(0.5 + confidence / 2))
    rate = successes / total
    denominator = 1 + z * z / total
    center = (rate + z * z / (2 * total)) / denominator
    half = z / denominator * math.sqrt(rate * (1 - rate) / total + z * z / (4 * total * total))
    return max(0.0, center - half), min(1.0, center + half)


def _describe(values: list[Measurement]) -> dict[str, Any]:
    present = [v for v in values if v is not None]
    if not present:
        return {"kind": "empty", "n": 0}
    if all(isinstance(v, bool) for v in present):
        hits = sum(1 for v in present if v)
        low, high = wilson_interval(hits, len(present))
        return {
            "kind": "frequency",
            "n": len(present),
            "count": hits,
            "rate": hits / len(present),
            "wilson_low": low,
            "wilson_high": high,
        }
    numbers = [float(v) for v in present]
    return {
        "kind": "numeric",
        "n": len(numbers),
        "mean": math.fsum(numbers) / len(numbers),
        "min": min(numbers),
        "max": max(numbers),
    }


def summarize(records: list[TrialRecord]) -> dict[str, Any]:
    """Aggregate computed from the records alone.

    Booleans become frequencies with Wilson 95% intervals and numbers get
    mean/min/max. Censored records are counted but not aggregated.
    """
    ok = [r for r in records if r.status == "ok"]
    keys = sorted({key for r in ok for key in r.measurements})
    return {
        "trials": len(records),
        "ok": len(ok),
        "censored": len(records) - len(ok),
        "measurements": {key: _describe([r.measurements.get(key) for r in ok]) for key in keys},
    }


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    """Run every trial of a spec and summarize.

    With ``workers > 1`` trials run in a process pool; records are always returned
    in stream order.

    Raises:
        InvalidInputError: If the spec is infeasible for its experiment.
    """
    check_feasible(spec)
    logger.info(
        "running %s: n=%d, %d trials, master seed %d",
        spec.experiment,
        spec.n,
        spec.trials,
        spec.master_seed,
    )
    tasks = [(spec, i) for i in range(spec.trials)]
    if spec.workers > 1:
        with mp.Pool(processes=min(spec.workers, spec.trials)) as pool:
            records = pool.starmap(run_trial, tasks)
    else:
        records = [run_trial(*task) for task in tasks]
    records.sort(key=lambda r: r.stream_index)
    summary = summarize(records)
    if summary["censored"]:
        logger.warning("%d of %d trials censored", summary["censored"], summary["trials"])
    return ExperimentResult(spec=spec, records=records, summary=summary)


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def emit(result: ExperimentResult, fmt: Literal["json", "csv"] = "json") -> bytes:
    """Serialize a run.

    JSON is the whole result with sorted keys. CSV has one row per trial; its
    columns are stream_index, master_seed, status, note and then every
    measurement key in sorted order (empty cells for absent values). Series are
    JSON-only.

    Raises:
        InvalidInputError: For an unknown format.
    """
    if fmt == "json":
        payload = result.model_dump(mode="json")
        return (json.dumps(payload, sort_keys=True, indent=2) + "\n").encode("utf-8")
    if fmt != "csv":
        raise InvalidInputError(f"unknown output format {fmt!r}; choose json or csv")
    keys = sorted({key for r in result.records for key in r.measurements})
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=[*CSV_PREFIX_COLUMNS, *keys], lineterminator="\n")
    writer.writeheader()
    for record in result.records:
        row = {
            "stream_index": record.stream_index,
            "master_seed": record.master_seed,
            "status": record.status,
            "note": record.note,
        }
        row.update(record.measurements)
        writer.writerow({k: _csv_cell(v) for k, v in row.items()})
    return buffer.getvalue().encode("utf-8")


def load_results(source: Union[Path, str, bytes]) -> ExperimentResult:
    """Parse a JSON result written by :func:`emit` (a path, or the document itself).

    Raises:
        InvalidInputError: If the document carries another schema version.
    """
    if isinstance(source, Path):
        text: Union[str, bytes] = source.read_bytes()
    else:
        text = source
    result = ExperimentResult.model_validate_json(text)
    if result.schema_version != SCHEMA_VERSION:
        raise InvalidInputError(
            f"results use schema {result.schema_version!r}, expected {SCHEMA_VERSION!r}"
        )
    return result

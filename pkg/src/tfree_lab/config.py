"""Configuration management for solver budgets and experiment specifications."""

import json
import os
from math import comb
from pathlib import Path
from typing import Any, Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

SEED_ENV_VAR = "TFREE_LAB_SEED"
MAX_SEED = 2**64 - 1

ExperimentName = Literal[
    "t_equals_b",
    "all_max_tfree_bipartite",
    "b_bounds_check",
    "balance_check",
    "nonedge_check",
    "maxcut_uniqueness",
    "gap_distance_survey",
    "evolution_overtake",
    "uniform_tfree_bipartite",
]


class SolverBudgets(BaseModel):
    """Feasibility guards and node budgets of the exact solvers."""

    maxcut_max_n: int = Field(
        default=28,
        description="Largest n accepted by the exact bipartition solver",
    )
    maxcut_enumeration_below_n: int = Field(
        default=20,
        description="Below this n, bipartitions are enumerated instead of branch-and-bound",
    )
    maxcut_max_assignment_bits: float = Field(
        default=28.0,
        description="Guard n*log2(l) for exact l-partition solving with l > 2",
    )
    event_max_n: int = Field(
        default=18,
        description="Largest n for events that enumerate every partition",
    )
    tfree_max_n: int = Field(
        default=16,
        description="Clique-free solver accepts instances with n at most this ...",
    )
    tfree_max_m: int = Field(
        default=60,
        description="... or with at most this many edges",
    )
    tfree_node_budget: int = Field(
        default=2_000_000,
        description="Search nodes before the clique-free solver returns a marked lower bound",
    )
    hitting_set_node_budget: int = Field(
        default=2_000_000,
        description="Search nodes for perturbation-event hitting sets",
    )
    coloring_max_n: int = Field(
        default=20,
        description="Largest graph for exact k-colorability with k >= 3",
    )
    fkg_max_n: int = Field(
        default=5,
        description="Largest n for exhaustive lattice enumeration",
    )
    packing_exact_max_candidates: int = Field(
        default=5000,
        description="Largest candidate clique count for exact edge-disjoint packing",
    )
    rejection_max_n: int = Field(
        default=30,
        description="Largest n accepted by the rejection sampler for uniform triangle-free graphs",
    )
    witness_limit: int = Field(
        default=32,
        description="Default number of maximum clique-free subgraphs to enumerate",
    )

    @model_validator(mode="after")
    def validate_positive(self) -> "SolverBudgets":
        """Reject non-positive budgets."""
        for name, value in self.model_dump().items():
            if value <= 0:
                raise ValueError(f"budget {name} must be positive, got {value}")
        return self


DEFAULT_BUDGETS = SolverBudgets()


class ExperimentSpec(BaseModel):
    """Seeded Monte Carlo configuration binding a statement to a runnable experiment."""

    experiment: ExperimentName = Field(description="Which experiment to run")
    n: int = Field(ge=1, description="Number of vertices")
    p: Optional[float] = Field(default=None, description="Edge probability for G(n,p)")
    M: Optional[int] = Field(default=None, description="Edge count for G(n,M)")
    trials: int = Field(description="Number of independent seeded trials")
    master_seed: int = Field(default=0, description="Master seed; trial i uses stream i")
    workers: int = Field(default=1, ge=1, description="Worker processes (1 runs inline)")
    ell: int = Field(default=3, ge=2, description="Forbidden clique size for extremal experiments")
    parts: int = Field(default=2, ge=2, description="Number of parts for cut experiments")
    gap_bound: int = Field(default=0, ge=0, description="Gap g for near-optimal enumeration")
    r_grid: list[int] = Field(
        default_factory=lambda: [1, 2], description="Values of r for gap r-1 events"
    )
    s_grid: Optional[list[int]] = Field(
        default=None,
        description="Distances s used to derive the evolution schedule t_i(r, s, n)",
    )
    t_schedule: Optional[list[int]] = Field(
        default=None,
        description="Numbers of edges added in the evolution experiment",
    )
    C: float = Field(default=1.0, gt=0, description="Constant C of the distance threshold s0")
    omega: float = Field(
        default=10.0, gt=0, description="Slowly growing omega of the distance threshold"
    )
    C_prime: float = Field(default=1.0, gt=0, description="Constant C' of the non-edge bounds")
    witness_limit: int = Field(default=32, ge=1, description="Witness cap for extremal experiments")
    max_tries: int = Field(default=10_000, ge=1, description="Attempts for rejection sampling")
    budgets: SolverBudgets = Field(default_factory=SolverBudgets)

    @field_validator("trials")
    @classmethod
    def validate_trials(cls, v: int) -> int:
        """Require at least one trial."""
        if v < 1:
            raise ValueError("trials must be at least 1")
        return v

    @field_validator("master_seed")
    @classmethod
    def validate_seed(cls, v: int) -> int:
        """Require a 64-bit unsigned seed."""
        if not 0 <= v <= MAX_SEED:
            raise ValueError(f"master_seed must lie in [0, 2^64), got {v}")
        return v

    @field_validator("r_grid", "s_grid", "t_schedule")
    @classmethod
    def validate_grid(cls, v: Optional[list[int]]) -> Optional[list[int]]:
        """Grids hold positive integers (t_schedule may hold zero)."""
        if v is not None and any(x < 0 for x in v):
            raise ValueError(f"grid values must be non-negative, got {v}")
        return v

    @model_validator(mode="after")
    def validate_model(self) -> "ExperimentSpec":
        """Check the p / M choice and experiment-specific requirements."""
        if (self.p is None) == (self.M is None):
            raise ValueError("exactly one of p and M must be set")
        if self.p is not None and not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.M is not None and not 0 <= self.M <= comb(self.n, 2):
            raise ValueError(f"M must lie in [0, C(n,2)] = [0, {comb(self.n, 2)}], got {self.M}")
        if self.experiment == "uniform_tfree_bipartite" and self.M is None:
            raise ValueError("uniform_tfree_bipartite samples T(n,m) and needs M")
        if any(r < 1 for r in self.r_grid):
            raise ValueError(f"r values must be at least 1, got {self.r_grid}")
        if self.experiment == "evolution_overtake" and not (self.t_schedule or self.s_grid):
            raise ValueError("evolution_overtake needs t_schedule or s_grid")
        needs_density = self.experiment in ("balance_check", "gap_distance_survey")
        if needs_density and self.edge_probability <= 0:
            raise ValueError(f"{self.experiment} needs a positive edge density")
        return self

    @property
    def edge_probability(self) -> float:
        """The p of the spec, or M / C(n,2) when M is given."""
        if self.p is not None:
            return self.p
        pairs = comb(self.n, 2)
        return (self.M or 0) / pairs if pairs else 0.0

    @property
    def edge_target(self) -> int:
        """The M of the spec, or round(p * C(n,2)) when p is given."""
        if self.M is not None:
            return self.M
        return round((self.p or 0.0) * comb(self.n, 2))


def load_spec(path: Path, overrides: Optional[dict[str, Any]] = None) -> ExperimentSpec:
    """Load an experiment spec from a JSON file, applying flag overrides.

    Args:
        path: JSON file mirroring ExperimentSpec.
        overrides: Values that take precedence over the file (None entries are ignored).
            A master seed missing from both comes from the environment.

    Returns:
        The validated spec.
    """
    data = json.loads(Path(path).read_text())
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value
    if "master_seed" not in data:
        data["master_seed"] = default_seed()
    return ExperimentSpec.model_validate(data)


def default_seed(flag_value: Optional[int] = None) -> int:
    """Resolve the master seed: explicit flag, then the environment, then zero."""
    if flag_value is not None:
        return flag_value
    raw = os.environ.get(SEED_ENV_VAR)
    if raw:
        try:
            return int(raw, 0)
        except ValueError:
            raise ValueError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from None
    return 0

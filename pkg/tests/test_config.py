"""Tests for solver budgets, experiment specs and seed resolution."""

import json

import pytest
from pydantic import ValidationError

from tfree_lab.config import SEED_ENV_VAR, ExperimentSpec, SolverBudgets, default_seed, load_spec


def _spec(**overrides):
    data = {"experiment": "t_equals_b", "n": 6, "p": 0.5, "trials": 3}
    data.update(overrides)
    return ExperimentSpec(**data)


class TestSolverBudgets:
    """Tests for the feasibility guards."""

    def test_defaults_are_positive(self):
        """Test the default budgets validate."""
        budgets = SolverBudgets()
        assert budgets.maxcut_max_n == 28
        assert budgets.fkg_max_n == 5

    def test_rejects_non_positive(self):
        """Test zero or negative budgets are rejected."""
        with pytest.raises(ValidationError, match="maxcut_max_n"):
            SolverBudgets(maxcut_max_n=0)


class TestExperimentSpec:
    """Tests for experiment spec validation."""

    def test_defaults(self):
        """Test the documented defaults."""
        spec = _spec()
        assert spec.master_seed == 0
        assert spec.workers == 1
        assert spec.ell == 3
        assert spec.r_grid == [1, 2]
        assert spec.budgets == SolverBudgets()

    def test_exactly_one_density(self):
        """Test p and M are mutually exclusive and one is required."""
        with pytest.raises(ValidationError, match="exactly one"):
            _spec(M=3)
        with pytest.raises(ValidationError, match="exactly one"):
            _spec(p=None)

    def test_ranges(self):
        """Test p, M, trials, seed and grid ranges."""
        with pytest.raises(ValidationError):
            _spec(p=1.5)
        with pytest.raises(ValidationError, match="C\\(n,2\\)"):
            _spec(p=None, M=16)
        with pytest.raises(ValidationError, match="trials"):
            _spec(trials=0)
        with pytest.raises(ValidationError, match="master_seed"):
            _spec(master_seed=2**64)
        with pytest.raises(ValidationError, match="r values"):
            _spec(r_grid=[0])
        with pytest.raises(ValidationError, match="non-negative"):
            _spec(s_grid=[-1])

    def test_experiment_requirements(self):
        """Test per-experiment requirements."""
        with pytest.raises(ValidationError, match="needs M"):
            _spec(experiment="uniform_tfree_bipartite")
        with pytest.raises(ValidationError, match="t_schedule or s_grid"):
            _spec(experiment="evolution_overtake")
        with pytest.raises(ValidationError, match="positive edge density"):
            _spec(experiment="balance_check", p=0.0)
        with pytest.raises(ValidationError):
            _spec(experiment="no_such_experiment")
        assert _spec(experiment="evolution_overtake", t_schedule=[0, 3]).t_schedule == [0, 3]

    def test_density_views(self):
        """Test edge_probability and edge_target convert between p and M."""
        assert _spec(p=None, M=5).edge_probability == pytest.approx(1 / 3)
        assert _spec(p=0.5).edge_target == 8
        assert _spec(p=None, M=5).edge_target == 5

    def test_invalid_is_a_value_error(self):
        """Test callers catching ValueError see spec errors."""
        with pytest.raises(ValueError):
            _spec(trials=0)


class TestSeeds:
    """Tests for master seed resolution."""

    def test_flag_wins(self, monkeypatch):
        """Test an explicit value beats the environment."""
        monkeypatch.setenv(SEED_ENV_VAR, "9")
        assert default_seed(7) == 7
        assert default_seed() == 9

    def test_environment_formats(self, monkeypatch):
        """Test hex seeds, a missing variable and garbage."""
        monkeypatch.setenv(SEED_ENV_VAR, "0x10")
        assert default_seed() == 16
        monkeypatch.delenv(SEED_ENV_VAR)
        assert default_seed() == 0
        monkeypatch.setenv(SEED_ENV_VAR, "abc")
        with pytest.raises(ValueError, match=SEED_ENV_VAR):
            default_seed()


class TestLoadSpec:
    """Tests for loading specs from JSON files."""

    def test_overrides(self, tmp_path, monkeypatch):
        """Test flags override the file and None flags are ignored."""
        monkeypatch.delenv(SEED_ENV_VAR, raising=False)
        path = tmp_path / "spec.json"
        path.write_text(json.dumps({"experiment": "t_equals_b", "n": 5, "p": 0.3, "trials": 2}))
        spec = load_spec(path, {"trials": 4, "workers": None})
        assert spec.trials == 4
        assert spec.workers == 1
        assert spec.master_seed == 0

    def test_seed_precedence(self, tmp_path, monkeypatch):
        """Test flag over file over environment."""
        monkeypatch.setenv(SEED_ENV_VAR, "11")
        path = tmp_path / "spec.json"
        path.write_text(json.dumps({"experiment": "t_equals_b", "n": 5, "p": 0.3, "trials": 2}))
        assert load_spec(path).master_seed == 11
        path.write_text(
            json.dumps(
                {"experiment": "t_equals_b", "n": 5, "p": 0.3, "trials": 2, "master_seed": 3}
            )
        )
        assert load_spec(path).master_seed == 3
        assert load_spec(path, {"master_seed": 5}).master_seed == 5

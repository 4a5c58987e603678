"""Tests for the tail bounds, the trinomial term and the parameter formulas."""

import math
from fractions import Fraction

import pytest
from scipy.stats import multinomial

from tfree_lab.bounds import (
    FORMULAS,
    REFERENCE_CONSTANTS,
    b_bounds,
    balance_bound,
    chernoff_report,
    chernoff_tail,
    clique_exponent,
    evolution_lower,
    evolution_upper,
    inside_edge_allowance,
    nonedge_bound,
    parameter_formulas,
    pittel_factor,
    r0,
    s0,
    s_of_r,
    t_i,
    threshold_m,
    trinomial_pmf,
    trinomial_term,
    x_i,
)
from tfree_lab.errors import InvalidInputError


class TestChernoff:
    """Tests for the binomial tail bounds."""

    def test_values(self):
        """Test both sides at n=100, p=1/2, t=10."""
        assert chernoff_tail(100, 0.5, 10, "upper") == pytest.approx(math.exp(-0.9375))
        assert chernoff_tail(100, 0.5, 10, "lower") == pytest.approx(math.exp(-1.0))

    def test_degenerate(self):
        """Test t=0 and λ=0."""
        assert chernoff_tail(100, 0.5, 0, "upper") == 1.0
        assert chernoff_tail(0, 0.5, 3, "lower") == 0.0

    def test_invalid(self):
        """Test negative t, bad p and an unknown side."""
        with pytest.raises(InvalidInputError):
            chernoff_tail(10, 0.5, -1, "upper")
        with pytest.raises(InvalidInputError):
            chernoff_tail(10, 1.5, 1, "upper")
        with pytest.raises(InvalidInputError):
            chernoff_tail(10, 0.5, 1, "middle")

    def test_report(self):
        """Test the report carries λ and the log value."""
        report = chernoff_report(100, 0.5, 10, "upper")
        assert report.name == "chernoff_upper"
        assert report.inputs["lambda"] == 50
        assert report.log_value == pytest.approx(-0.9375)


class TestTrinomial:
    """Tests for the trinomial estimate."""

    def test_small_exact(self):
        """Test N=4, α=1/4 at d=0 and d=1."""
        assert trinomial_term(4, 0.25, 0).value == pytest.approx(0.1875)
        assert trinomial_term(4, 0.25, 1).value == pytest.approx(0.09375)

    @pytest.mark.parametrize("n_total", [100, 2000, 3000])
    def test_matches_multinomial(self, n_total):
        """Test both evaluation paths against the multinomial law."""
        report = trinomial_term(n_total, 0.25, 3)
        a = n_total // 4
        expected = multinomial.logpmf([a, a + 3, n_total - 2 * a - 3], n_total, [0.25, 0.25, 0.5])
        assert report.log_value == pytest.approx(expected, rel=1e-9)
        assert report.inputs["alpha_effective"] == 0.25

    def test_flags(self):
        """Test the precondition flags are reported, not enforced."""
        assert trinomial_term(4, 0.25, 1).flags == []
        assert trinomial_term(4, 0.25, 2).flags == [
            "d exceeds min(sqrt(alpha N), sqrt((1-2 alpha) N))"
        ]
        assert "alpha N rounds to 0" in trinomial_term(4, 0.1, 0).flags

    @pytest.mark.parametrize("n_total", [8, 5000])
    def test_alpha_rounding_to_zero_with_offset(self, n_total):
        """Test a zero first cell with d >= 1 gives a zero term in both evaluation modes."""
        report = trinomial_term(n_total, 1e-4, 1)
        assert "alpha N rounds to 0" in report.flags
        assert report.value == 0.0
        assert report.log_value == -math.inf

    def test_invalid(self):
        """Test α outside (0, 1/2) and a negative third cell."""
        with pytest.raises(InvalidInputError):
            trinomial_term(4, 0.5, 0)
        with pytest.raises(InvalidInputError, match="negative count"):
            trinomial_term(4, 0.25, 3)

    @pytest.mark.parametrize("n_total", range(1, 13))
    def test_pmf_sums_to_one(self, n_total):
        """Test the exact law sums to one for small N."""
        assert sum(trinomial_pmf(n_total, Fraction(1, 4)).values()) == 1

    def test_term_is_order_one_over_alpha_n(self):
        """Test term·αN >= 0.05 for N from 8 to 400 at d = 0 and d = 1."""
        for n_total in range(8, 401):
            for d in (0, 1):
                report = trinomial_term(n_total, 0.25, d)
                cells = round(report.inputs["alpha_effective"] * n_total)
                assert report.value * cells >= 0.05

    def test_pmf(self):
        """Test the exact law sums to one."""
        pmf = trinomial_pmf(2, Fraction(1, 4))
        assert sum(pmf.values()) == 1
        assert pmf[(1, 1)] == Fraction(1, 8)
        with pytest.raises(InvalidInputError):
            trinomial_pmf(2, 0.75)


class TestParameterFormulas:
    """Tests for the closed-form thresholds."""

    def test_distance_and_gap_thresholds(self):
        """Test s0, r0 and s(r)."""
        report = s0(1.0, 10.0, 1.0, 400.0, 1.0)
        assert report.value == pytest.approx(200.0)
        assert report.ceiling == 200
        assert r0(1.0, math.e**2).value == pytest.approx(4.0)
        assert s_of_r(1, 8).value == pytest.approx(64.0)

    def test_overflow_keeps_log(self):
        """Test r0 overflows to inf but keeps a finite log."""
        report = r0(1e-30, 100)
        assert report.value == math.inf
        assert math.isfinite(report.log_value)

    def test_edge_thresholds(self):
        """Test threshold_m, t_i and x_i."""
        assert threshold_m(100).value == pytest.approx(929.23, rel=1e-4)
        assert threshold_m(100, 0.1).value == pytest.approx(1.1 * 929.23, rel=1e-4)
        report = t_i(1, 5, 10)
        assert report.value == pytest.approx(3.6)
        assert report.ceiling == 4
        assert x_i(5, 10, 9).value == pytest.approx(2.5)
        with pytest.raises(InvalidInputError):
            t_i(1, 10, 10)

    def test_cut_bounds(self):
        """Test Pittel's factor, the b(G) interval, balance and non-edge bounds."""
        assert pittel_factor(100).value == pytest.approx(30.0)
        assert b_bounds(25, 100).interval == (50.0, 150.0)
        assert balance_bound(16, 1.0, 4).value == pytest.approx(26.0)
        assert nonedge_bound(10, 20).value == pytest.approx(12.5 - math.sqrt(5000))

    def test_evolution_sandwich(self):
        """Test the upper and lower growth rates."""
        assert evolution_upper(10, 20, 80).value == pytest.approx(10 * (0.5 + math.sqrt(1.25)))
        assert evolution_lower(10, 20, 8000).value == pytest.approx(10 * (0.5 - math.sqrt(0.05)))

    def test_inside_edge_allowance(self):
        """Test 2 p^(-5l²) log²n at p=1."""
        assert inside_edge_allowance(1.0, math.e**2, 3).value == pytest.approx(8.0)

    def test_domain_errors(self):
        """Test p and n ranges."""
        with pytest.raises(InvalidInputError):
            s0(1.0, 10.0, 1.0, 400.0, 0.0)
        with pytest.raises(InvalidInputError):
            r0(0.5, 1)
        with pytest.raises(InvalidInputError):
            nonedge_bound(10, 0)

    def test_reference_constants(self):
        """Test the documented exponents."""
        assert REFERENCE_CONSTANTS["triangle_free_exponent"] == Fraction(1, 250)
        assert clique_exponent(3) == Fraction(1, 2700)


class TestRegistry:
    """Tests for evaluating formulas by name."""

    def test_by_name(self):
        """Test keyword inputs reach the formula."""
        assert parameter_formulas("t_i", {"r": 1, "s": 5, "n": 10}).ceiling == 4
        report = parameter_formulas("trinomial_term", {"N": 4.0, "alpha": 0.25, "d": 0.0})
        assert report.value == pytest.approx(0.1875)
        assert parameter_formulas("chernoff_lower", {"n": 100, "p": 0.5, "t": 10}).value == (
            pytest.approx(math.exp(-1.0))
        )

    def test_errors(self):
        """Test unknown names and missing inputs."""
        with pytest.raises(InvalidInputError, match="unknown formula"):
            parameter_formulas("nope", {})
        with pytest.raises(InvalidInputError, match="t_i"):
            parameter_formulas("t_i", {"r": 1})

    def test_registry_and_json(self):
        """Test the registry size and the JSON form of an interval report."""
        assert len(FORMULAS) == 16
        report = parameter_formulas("b_bounds", {"n": 25, "M": 100})
        assert report.model_dump(mode="json")["interval"] == [50.0, 150.0]

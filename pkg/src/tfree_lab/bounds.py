"""Closed-form calculators: tail bounds, the trinomial estimate and parameter formulas.

Every calculator returns a :class:`BoundReport`. Quantities that overflow or
underflow doubles quickly carry a natural-log value alongside the plain one.
Unpinned constants (C, C') are inputs defaulting to 1.
"""

import logging
import math
from collections.abc import Callable
from fractions import Fraction
from math import comb, factorial
from typing import Any, Literal, Optional

from pydantic import BaseModel, Field
from scipy.special import gammaln

from .errors import InvalidInputError

logger = logging.getLogger(__name__)

EXACT_TRINOMIAL_MAX_N = 2000

REFERENCE_CONSTANTS: dict[str, Fraction] = {
    # exponent c in p >= n^-c below which bipartiteness of maximum triangle-free subgraphs is proven
    "triangle_free_exponent": Fraction(1, 250),
}


def clique_exponent(ell: int) -> Fraction:
    """The exponent 1/(100 l^3) of the K_l-free analogue (reference value only)."""
    if ell < 2:
        raise InvalidInputError(f"clique size must be at least 2, got {ell}")
    return Fraction(1, 100 * ell**3)


class BoundReport(BaseModel):
    """One evaluated formula."""

    name: str = Field(description="Formula identifier")
    inputs: dict[str, float] = Field(description="Parameter values used")
    value: float = Field(description="The computed quantity (inf when it overflows)")
    log_value: Optional[float] = Field(default=None, description="Natural log of value")
    ceiling: Optional[int] = Field(default=None, description="Ceiling for count-type outputs")
    interval: Optional[tuple[float, float]] = Field(
        default=None, description="Lower and upper ends for interval-type outputs"
    )
    flags: list[str] = Field(
        default_factory=list, description="Preconditions evaluated but not enforced"
    )


def _positive(formula: str, **values: float) -> None:
    for name, value in values.items():
        if not value > 0:
            raise InvalidInputError(f"{formula}: {name} must be positive, got {value}")


def _probability(formula: str, p: float) -> None:
    if not 0.0 < p <= 1.0:
        raise InvalidInputError(f"{formula}: p must lie in (0, 1], got {p}")


def _from_log(log_value: float) -> float:
    return math.exp(log_value) if log_value < 709.0 else math.inf


def chernoff_tail(n: int, p: float, t: float, side: Literal["upper", "lower"]) -> float:
    """Tail bound for a Binomial(n, p) deviating from λ = np by t.

    upper: exp(-t²/(2(λ + t/3))); lower: exp(-t²/(2λ)). With λ = 0 the lower bound
    is 1 at t = 0 and 0 beyond.

    Raises:
        InvalidInputError: If t < 0, p outside [0, 1] or the side is unknown.
    """
    if t < 0:
        raise InvalidInputError(f"chernoff: t must be non-negative, got {t}")
    if not 0.0 <= p <= 1.0:
        raise InvalidInputError(f"chernoff: p must lie in [0, 1], got {p}")
    if n < 0:
        raise InvalidInputError(f"chernoff: n must be non-negative, got {n}")
    if t == 0:
        return 1.0
    lam = n * p
    if side == "upper":
        return math.exp(-(t * t) / (2 * (lam + t / 3)))
    if side == "lower":
        if lam == 0:
            return 0.0
        return math.exp(-(t * t) / (2 * lam))
    raise InvalidInputError(f"chernoff: side must be 'upper' or 'lower', got {side!r}")


def chernoff_report(n: int, p: float, t: float, side: Literal["upper", "lower"]) -> BoundReport:
    """:func:`chernoff_tail` as a report (the bound is not capped at 1)."""
    value = chernoff_tail(n, p, t, side)
    return BoundReport(
        name=f"chernoff_{side}",
        inputs={"n": n, "p": p, "t": t, "lambda": n * p},
        value=value,
        log_value=math.log(value) if value > 0 else -math.inf,
    )


def _trinomial_cells(n_total: int, alpha: float, d: int) -> tuple[int, int, int]:
    if n_total < 1:
        raise InvalidInputError(f"trinomial: N must be at least 1, got {n_total}")
    if not 0.0 < alpha < 0.5:
        raise InvalidInputError(f"trinomial: alpha must lie in (0, 1/2), got {alpha}")
    if d < 0:
        raise InvalidInputError(f"trinomial: d must be non-negative, got {d}")
    a = round(alpha * n_total)
    rest = n_total - 2 * a - d
    if rest < 0:
        raise InvalidInputError(
            f"trinomial: cells ({a}, {a + d}, {rest}) for N={n_total} have a negative count"
        )
    return a, a + d, rest


def trinomial_term(n_total: int, alpha: float, d: int) -> BoundReport:
    """binom(N; αN, αN+d) α^(2αN+d) (1-2α)^((1-2α)N-d), with αN rounded to an integer.

    The report's ``alpha_effective`` input is the α actually used. Small N are
    evaluated exactly over the rationals, larger ones through log-gamma.

    Raises:
        InvalidInputError: If α is outside (0, 1/2) or a cell count is negative.
    """
    a, b, rest = _trinomial_cells(n_total, alpha, d)
    flags = []
    if d > min(math.sqrt(a), math.sqrt(n_total - 2 * a)):
        flags.append("d exceeds min(sqrt(alpha N), sqrt((1-2 alpha) N))")
    if a == 0:
        flags.append("alpha N rounds to 0")
    if n_total <= EXACT_TRINOMIAL_MAX_N:
        share = Fraction(a, n_total)
        exact = (
            Fraction(factorial(n_total), factorial(a) * factorial(b) * factorial(rest))
            * share ** (a + b)
            * (1 - 2 * share) ** rest
        )
        value = float(exact)
        log_value = (
            math.log(exact.numerator) - math.log(exact.denominator) if exact > 0 else -math.inf
        )
    else:
        share_f = a / n_total
        log_value = float(
            gammaln(n_total + 1) - gammaln(a + 1) - gammaln(b + 1) - gammaln(rest + 1)
        )
        if a + b and share_f == 0:
            log_value = -math.inf
        else:
            if a + b:
                log_value += (a + b) * math.log(share_f)
            if rest:
                log_value += rest * math.log1p(-2 * share_f)
        value = _from_log(log_value)
    return BoundReport(
        name="trinomial_term",
        inputs={"N": n_total, "alpha": alpha, "alpha_effective": a / n_total, "d": d},
        value=value,
        log_value=log_value,
        flags=flags,
    )


def trinomial_pmf(n_total: int, alpha: Fraction | float) -> dict[tuple[int, int], Fraction]:
    """Exact law of the first two cells of a trinomial with probabilities (α, α, 1-2α)."""
    share = Fraction(alpha).limit_denominator(10**9)
    if not 0 < share <= Fraction(1, 2):
        raise InvalidInputError(f"trinomial: alpha must lie in (0, 1/2], got {alpha}")
    out = {}
    for a in range(n_total + 1):
        for b in range(n_total - a + 1):
            rest = n_total - a - b
            count = comb(n_total, a) * comb(n_total - a, b)
            out[(a, b)] = count * share ** (a + b) * (1 - 2 * share) ** rest
    return out


def s0(C: float, omega: float, r: float, n: float, p: float) -> BoundReport:  # noqa: N803
    """Distance threshold C·ω·r⁴·sqrt(n/p)."""
    _positive("s0", C=C, omega=omega, r=r, n=n)
    _probability("s0", p)
    value = C * omega * r**4 * math.sqrt(n / p)
    return BoundReport(
        name="s0",
        inputs={"C": C, "omega": omega, "r": r, "n": n, "p": p},
        value=value,
        log_value=math.log(value),
        ceiling=math.ceil(value),
    )


def r0(p: float, n: float) -> BoundReport:
    """Gap threshold p^-12 log²n."""
    _probability("r0", p)
    if n <= 1:
        raise InvalidInputError(f"r0: n must exceed 1, got {n}")
    log_value = -12 * math.log(p) + 2 * math.log(math.log(n))
    return BoundReport(
        name="r0", inputs={"p": p, "n": n}, value=_from_log(log_value), log_value=log_value
    )


def s_of_r(r: float, n: float) -> BoundReport:
    """Distance scale n^(2/3) (r+1)⁴."""
    _positive("s_of_r", n=n)
    if r < 0:
        raise InvalidInputError(f"s_of_r: r must be non-negative, got {r}")
    value = n ** (2 / 3) * (r + 1) ** 4
    return BoundReport(
        name="s_of_r", inputs={"r": r, "n": n}, value=value, ceiling=math.ceil(value)
    )


def threshold_m(n: float, eps: float = 0.0) -> BoundReport:
    """Edge threshold (1+ε)(sqrt(3)/4) n^(3/2) sqrt(log n) for bipartite triangle-free graphs."""
    if n <= 1:
        raise InvalidInputError(f"threshold_m: n must exceed 1, got {n}")
    value = (1 + eps) * math.sqrt(3) / 4 * n**1.5 * math.sqrt(math.log(n))
    return BoundReport(name="threshold_m", inputs={"n": n, "eps": eps}, value=value)


def t_i(r: float, s: float, n: float) -> BoundReport:
    """Edges added in an evolution round: r² n(n-1) / (s(n-s))."""
    _positive("t_i", r=r, s=s, n=n)
    if s >= n:
        raise InvalidInputError(f"t_i: s must be below n, got s={s}, n={n}")
    value = r * r * n * (n - 1) / (s * (n - s))
    return BoundReport(
        name="t_i", inputs={"r": r, "s": s, "n": n}, value=value, ceiling=math.ceil(value)
    )


def x_i(s: float, n: float, t: float) -> BoundReport:
    """Expected added edges across a cut at distance s: s(n-s)/(n(n-1)) · t."""
    _positive("x_i", n=n)
    if not 0 <= s <= n or t < 0 or n < 2:
        raise InvalidInputError(f"x_i: need 0 <= s <= n, t >= 0, n >= 2; got s={s}, n={n}, t={t}")
    value = s * (n - s) / (n * (n - 1)) * t
    return BoundReport(
        name="x_i", inputs={"s": s, "n": n, "t": t}, value=value, ceiling=math.ceil(value)
    )


def pittel_factor(M: float) -> BoundReport:  # noqa: N803
    """Pittel's factor 3·sqrt(M) transferring G(n,p) bounds to G(n,M)."""
    if M < 0:
        raise InvalidInputError(f"pittel_factor: M must be non-negative, got {M}")
    return BoundReport(name="pittel_factor", inputs={"M": M}, value=3 * math.sqrt(M))


def b_bounds(n: float, M: float) -> BoundReport:  # noqa: N803
    """[M/2, M/2 + sqrt(4nM)], the likely range of the maximum cut of G(n,M)."""
    _positive("b_bounds", n=n)
    if M < 0:
        raise InvalidInputError(f"b_bounds: M must be non-negative, got {M}")
    low, high = M / 2, M / 2 + math.sqrt(4 * n * M)
    return BoundReport(name="b_bounds", inputs={"n": n, "M": M}, value=high, interval=(low, high))


def balance_bound(n: float, p: float, lam: float) -> BoundReport:
    """Imbalance allowance 3 n^(3/4) p^(-1/4) + λ^(1/2) p^(-1/2)."""
    _positive("balance_bound", n=n)
    _probability("balance_bound", p)
    if lam < 0:
        raise InvalidInputError(f"balance_bound: lambda must be non-negative, got {lam}")
    value = 3 * n**0.75 * p**-0.25 + math.sqrt(lam) / math.sqrt(p)
    return BoundReport(name="balance_bound", inputs={"n": n, "p": p, "lambda": lam}, value=value)


def nonedge_bound(n: float, M: float, C: float = 1.0) -> BoundReport:  # noqa: N803
    """(C(n,2) - M)/2 - sqrt(C n⁵ / M), a lower bound on non-edges across optimal cuts."""
    _positive("nonedge_bound", n=n, M=M, C=C)
    value = 0.5 * (n * (n - 1) / 2 - M) - math.sqrt(C * n**5 / M)
    return BoundReport(name="nonedge_bound", inputs={"n": n, "M": M, "C": C}, value=value)


def evolution_upper(t: float, n: float, M: float) -> BoundReport:  # noqa: N803
    """t(1/2 + sqrt(5n/M)): cut growth ceiling after t added edges."""
    _positive("evolution_upper", n=n, M=M)
    value = t * (0.5 + math.sqrt(5 * n / M))
    return BoundReport(name="evolution_upper", inputs={"t": t, "n": n, "M": M}, value=value)


def evolution_lower(
    t: float, n: float, M: float, C_prime: float = 1.0  # noqa: N803
) -> BoundReport:
    """t(1/2 - sqrt(20C'n/M)): cut growth floor after t added edges."""
    _positive("evolution_lower", n=n, M=M, C_prime=C_prime)
    value = t * (0.5 - math.sqrt(20 * C_prime * n / M))
    return BoundReport(
        name="evolution_lower", inputs={"t": t, "n": n, "M": M, "C_prime": C_prime}, value=value
    )


def inside_edge_allowance(p: float, n: float, ell: int) -> BoundReport:
    """2 p^(-5l²) log²n, the inside-edge allowance of maximum K_l-free subgraphs."""
    _probability("inside_edge_allowance", p)
    if n <= 1 or ell < 2:
        raise InvalidInputError(
            f"inside_edge_allowance: need n > 1 and l >= 2, got n={n}, l={ell}"
        )
    log_value = math.log(2) - 5 * ell * ell * math.log(p) + 2 * math.log(math.log(n))
    return BoundReport(
        name="inside_edge_allowance",
        inputs={"p": p, "n": n, "l": ell},
        value=_from_log(log_value),
        log_value=log_value,
    )


FORMULAS: dict[str, Callable[..., BoundReport]] = {
    "s0": s0,
    "r0": r0,
    "s_of_r": s_of_r,
    "threshold_m": threshold_m,
    "t_i": t_i,
    "x_i": x_i,
    "pittel_factor": pittel_factor,
    "b_bounds": b_bounds,
    "balance_bound": balance_bound,
    "nonedge_bound": nonedge_bound,
    "evolution_upper": evolution_upper,
    "evolution_lower": evolution_lower,
    "inside_edge_allowance": inside_edge_allowance,
    "trinomial_term": lambda N, alpha, d: trinomial_term(int(N), alpha, int(d)),  # noqa: N803
    "chernoff_upper": lambda n, p, t: chernoff_report(int(n), p, t, "upper"),
    "chernoff_lower": lambda n, p, t: chernoff_report(int(n), p, t, "lower"),
}


def parameter_formulas(name: str, inputs: dict[str, Any]) -> BoundReport:
    """Evaluate a named formula with keyword inputs.

    Raises:
        InvalidInputError: For an unknown formula, missing or unexpected inputs, or a
            domain violation.
    """
    try:
        formula = FORMULAS[name]
    except KeyError:
        raise InvalidInputError(
            f"unknown formula {name!r}; choose one of {', '.join(sorted(FORMULAS))}"
        ) from None
    try:
        report = formula(**inputs)
    except TypeError as e:
        raise InvalidInputError(f"{name}: {e}") from e
    logger.debug("%s(%s) = %s", name, inputs, report.value)
    return report

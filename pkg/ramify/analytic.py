from __future__ import annotations

import logging
import math
from fractions import Fraction
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.integrate import quad

from .errors import DomainError, PreconditionError
from .groups import layer_centralizer_order
from .logs import log_info
from .zmod import Mat2

SAFETY_FACTOR = 2
DEFAULT_GRID_LIMIT = 80
POINTS_AFTER_CROSSOVER = 5


def logint(x: float, *, epsrel: float = 1e-12) -> float:
    """li(x) measured from 2: the integral of dt / ln t over [2, x].

    Integrated in s = ln t, where the integrand becomes e^s / s.
    """
    if x < 2:
        raise DomainError(f"logint needs x >= 2; got {x}.")
    if x == 2:
        return 0.0
    value, _ = quad(
        lambda s: math.exp(s) / s,
        math.log(2.0),
        math.log(x),
        epsabs=0.0,
        epsrel=epsrel,
        limit=500,
    )
    return value


class DensityParams(BaseModel):
    model_config = ConfigDict(
        frozen=True, extra="forbid", arbitrary_types_allowed=True
    )

    d: Fraction
    p: int = 5

    def model_post_init(self, __context: object) -> None:
        if not 0 < self.d <= 1:
            raise DomainError(f"class density must lie in (0, 1]; got {self.d}.")
        if self.p < 2:
            raise DomainError(f"p must be a prime; got {self.p}.")


def split_density(params: DensityParams) -> tuple[Fraction, Fraction]:
    """Densities of the null and the non-null Frobenius layers over a class.

    Returns (d / p, d (1 - 1/p)); exact, so the two sum to d.
    """
    zero = params.d / params.p
    return zero, params.d - zero


def layer_extended_density(d: Fraction, a_residual: Mat2) -> Fraction:
    """Density of a class after adjoining one Ad0 layer above a_residual."""
    return Fraction(d) / layer_centralizer_order(a_residual)


class LOParams(BaseModel):
    """Constants of the conditional effective Chebotarev bound.

    e1 is an absolute constant with no published value; c1 and c2 only exist.
    The defaults are placeholders and every report echoes them.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    e1: float = Field(default=1.0, gt=0)
    c1: float = Field(default=1.0, gt=0)
    c2: float = Field(default=10.0, gt=0)
    n_L: int = Field(default=100, gt=0)


def log_discriminant(q: float, c1: float, c2: float) -> float:
    """ln of the discriminant model c1 * q^c2."""
    if q <= 1 or c1 <= 0:
        raise DomainError(f"log_discriminant needs q > 1 and c1 > 0; got {q}, {c1}.")
    return math.log(c1) + c2 * math.log(q)


def lo_bound(
    x: float, class_ratio: float, log_D: float, n_L: int, e1: float
) -> float:
    """e1 (r sqrt(x) ln(D x^n_L) + ln D) for a field of discriminant D.

    The discriminant enters as its logarithm: `log_D` is ln D, not D. Build
    it with `log_discriminant(q, c1, c2)`.
    """
    if x <= 2:
        raise DomainError(f"lo_bound needs x > 2; got {x}.")
    if class_ratio < 0 or log_D < 0 or n_L <= 0 or e1 <= 0:
        raise DomainError(
            "lo_bound needs class_ratio >= 0, D >= 1, n_L > 0 and e1 > 0."
        )
    return e1 * (class_ratio * math.sqrt(x) * (log_D + n_L * math.log(x)) + log_D)


class BudgetTerms(BaseModel):
    """Error terms of one of the two counts, in the order they arise.

    Summing per-row bounds over R rows, each row attached to a prime q with
    discriminant c1 q^c2, gives the four terms carrying sqrt(x) and the two
    constant-order terms; the first term comes from not knowing R exactly.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    row_count_error: float
    degree_term: float
    c1_sqrt_term: float
    log_q_sqrt_term: float
    c1_term: float
    log_q_term: float

    @property
    def total(self) -> float:
        return (
            self.row_count_error
            + self.degree_term
            + self.c1_sqrt_term
            + self.log_q_sqrt_term
            + self.c1_term
            + self.log_q_term
        )


class GridPoint(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    x: float
    li: float
    gap: float
    budget: float
    ratio: float


class CountingReport(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    verdict: Literal["reached", "not_reached"]
    x: float
    li: float
    row_main: float
    column_main: float
    gap: float
    row_budget: BudgetTerms
    column_budget: BudgetTerms
    total_budget: float
    safety_factor: int = SAFETY_FACTOR
    d: str
    p: int
    e1: float
    c1: float
    c2: float
    n_L: int
    trajectory: list[GridPoint] = Field(default_factory=list)
    after_crossover: list[GridPoint] = Field(default_factory=list)


def _budget(
    x: float, li: float, ratio: float, d: float, lo: LOParams
) -> BudgetTerms:
    log_x = math.log(x)
    root = math.sqrt(x)
    log_c1 = math.log(lo.c1)
    # Number of rows: d li(x) up to the bound for the base class itself.
    row_error = lo_bound(x, d, max(log_c1, 0.0), lo.n_L, lo.e1)
    rows_up = d * li + row_error
    # sum of ln q over the rows, each q <= x.
    log_q_sum = rows_up * log_x
    return BudgetTerms(
        row_count_error=ratio * li * row_error,
        degree_term=lo.e1 * ratio * root * rows_up * lo.n_L * log_x,
        c1_sqrt_term=lo.e1 * ratio * root * rows_up * abs(log_c1),
        log_q_sqrt_term=lo.e1 * ratio * root * lo.c2 * log_q_sum,
        c1_term=lo.e1 * rows_up * abs(log_c1),
        log_q_term=lo.e1 * lo.c2 * log_q_sum,
    )


def _evaluate(
    x: float, params: DensityParams, lo: LOParams, epsrel: float
) -> tuple[GridPoint, float, float, BudgetTerms, BudgetTerms]:
    li = logint(x, epsrel=epsrel)
    d = float(params.d)
    zero, one = split_density(params)
    row_main = d * float(one) * li * li
    column_main = d * float(zero) * li * li
    row_budget = _budget(x, li, float(one), d, lo)
    column_budget = _budget(x, li, float(zero), d, lo)
    budget = row_budget.total + column_budget.total
    gap = row_main - column_main
    point = GridPoint(x=x, li=li, gap=gap, budget=budget, ratio=gap / budget)
    return point, row_main, column_main, row_budget, column_budget


def contradiction_x(
    params: DensityParams,
    lo: LOParams | None = None,
    *,
    start: float = 4.0,
    grid_limit: int = DEFAULT_GRID_LIMIT,
    epsrel: float = 1e-12,
    logger: logging.Logger | None = None,
) -> CountingReport:
    """Least x on a doubling grid where the double count becomes impossible.

    Counting the ones of the x-by-x matrix by rows gives d^2 (1 - 1/p) li^2,
    by columns at most d^2 / p li^2. The verdict is "reached" once the gap
    d^2 (1 - 2/p) li^2 exceeds SAFETY_FACTOR times both error budgets.
    """
    if params.p < 5:
        raise PreconditionError(f"contradiction_x needs p >= 5; got {params.p}.")
    if grid_limit < 1:
        raise PreconditionError("grid_limit must be positive.")
    lo = lo or LOParams()
    trajectory: list[GridPoint] = []
    x = start
    found = None
    for _ in range(grid_limit):
        evaluated = _evaluate(x, params, lo, epsrel)
        trajectory.append(evaluated[0])
        if evaluated[0].gap > SAFETY_FACTOR * evaluated[0].budget:
            found = evaluated
            break
        x *= 2
    if found is None:
        found = evaluated
        after: list[GridPoint] = []
        verdict: Literal["reached", "not_reached"] = "not_reached"
    else:
        after = [
            _evaluate(x * 2**step, params, lo, epsrel)[0]
            for step in range(1, POINTS_AFTER_CROSSOVER + 1)
        ]
        verdict = "reached"
        log_info(logger, "Counting contradiction reached at x=%.6g", x)
    point, row_main, column_main, row_budget, column_budget = found
    return CountingReport(
        verdict=verdict,
        x=point.x,
        li=point.li,
        row_main=row_main,
        column_main=column_main,
        gap=point.gap,
        row_budget=row_budget,
        column_budget=column_budget,
        total_budget=point.budget,
        d=str(params.d),
        p=params.p,
        e1=lo.e1,
        c1=lo.c1,
        c2=lo.c2,
        n_L=lo.n_L,
        trajectory=trajectory,
        after_crossover=after,
    )


class SimulationStats(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    size: int
    p: int | None
    seed: int
    d: str | None = None
    null_probability: float
    row_one_density: float
    column_one_density: float
    row_density_spread: float
    column_density_spread: float
    one_density_stderr: float
    one_density_z: float
    symmetric_pairs: int
    pair_count: int
    symmetric_fraction: float
    symmetric_stderr: float
    symmetric_z: float
    zero_density_layer: str | None = None
    one_density_layer: str | None = None


def _z_score(observed: float, expected: float, stderr: float) -> float:
    if stderr == 0:
        return 0.0 if observed == expected else math.inf
    return (observed - expected) / stderr


def simulate_matrix(
    size: int,
    p: int,
    *,
    seed: int,
    d: Fraction | None = None,
    p_infinite: bool = False,
) -> SimulationStats:
    """Sample the off-diagonal 0/1 matrix with P(0) = 1/p per entry.

    Entry (i, j) is 1 when the class attached to prime i is non-null at prime
    j. `p_infinite` sets P(0) = 0. With d given, the layer densities from
    split_density are echoed next to the observed frequencies.
    """
    if size < 2:
        raise DomainError(f"simulate_matrix needs size >= 2; got {size}.")
    null_probability = 0.0 if p_infinite else 1.0 / p
    rng = np.random.default_rng(seed)
    ones = rng.random((size, size)) >= null_probability
    off_diagonal = ~np.eye(size, dtype=bool)
    ones &= off_diagonal

    entries = size * (size - 1)
    row_densities = ones.sum(axis=1) / (size - 1)
    column_densities = ones.sum(axis=0) / (size - 1)
    density = float(ones.sum()) / entries
    expected = 1.0 - null_probability
    stderr = math.sqrt(expected * (1 - expected) / entries)

    upper = np.triu(off_diagonal, k=1)
    pairs = int(upper.sum())
    symmetric = int((ones & ones.T & upper).sum())
    fraction = symmetric / pairs
    expected_pair = expected**2
    pair_stderr = math.sqrt(expected_pair * (1 - expected_pair) / pairs)

    layers = (
        split_density(DensityParams(d=d, p=p)) if d is not None else (None, None)
    )
    return SimulationStats(
        size=size,
        p=None if p_infinite else p,
        seed=seed,
        d=str(d) if d is not None else None,
        null_probability=null_probability,
        row_one_density=float(row_densities.mean()),
        column_one_density=float(column_densities.mean()),
        row_density_spread=float(row_densities.std()),
        column_density_spread=float(column_densities.std()),
        one_density_stderr=stderr,
        one_density_z=_z_score(density, expected, stderr),
        symmetric_pairs=symmetric,
        pair_count=pairs,
        symmetric_fraction=fraction,
        symmetric_stderr=pair_stderr,
        symmetric_z=_z_score(fraction, expected_pair, pair_stderr),
        zero_density_layer=str(layers[0]) if layers[0] is not None else None,
        one_density_layer=str(layers[1]) if layers[1] is not None else None,
    )

"""Closed-form moment functions of the walker model, plus derivatives and inversion.

The model: ``n`` vertices, ``m`` walkers.  At every time step the graph is
resampled from scratch — each of the n(n-1)/2 potential edges is present
independently with probability ``p`` — and every walker at a vertex with
``k`` current neighbors stays put with probability 1/(k+1), otherwise moves
to a uniformly chosen neighbor.  Only the per-vertex occupancy counts are
observed.

Everything in this module is a pure function of ``(n, m, p)``.  The central
object is the stationary lag-1 autocovariance ``lag1_cov`` of a single
vertex count, which is strictly decreasing in ``p`` and therefore invertible:
that inversion is what turns an empirical covariance into a point estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

__all__ = [
    "P_MIN",
    "ModelDims",
    "MomentProfile",
    "Inversion",
    "MonotonicityError",
    "stay_prob",
    "move_prob",
    "stay_prob_deriv",
    "binom_pmf",
    "scenario_probs",
    "kappa",
    "occupancy_pair_probs",
    "second_moment",
    "lag1_cov",
    "ls_slope",
    "ls_intercept",
    "ls_slope_deriv",
    "deriv",
    "invert_monotone_decreasing",
    "moment_profile",
    "lag1_cov_decreasing_violations",
]

#: Lower end of the default inversion bracket.  The pair-ratio denominator
#: vanishes at p = 0 (the chain is no longer irreducible), so the covariance
#: family is only inverted on [P_MIN, 1].
P_MIN = 1e-6

# Below this value of n*p the closed forms switch to short power series to
# avoid cancellation in (1 - (1-p)^n).
_SERIES_CUTOFF = 1e-8

_KAPPA_DENOM_FLOOR = 1e-13


def _check_n(n: int) -> None:
    if not isinstance(n, (int,)) or isinstance(n, bool):
        raise ValueError(f"vertex count must be an integer, got {n!r}")
    if n < 2:
        raise ValueError(f"vertex count must be >= 2, got {n}")


def _check_p(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must lie in [0, 1], got {p!r}")


def _check_p_positive(p: float) -> None:
    if not 0.0 < p <= 1.0:
        raise ValueError(f"edge probability must lie in (0, 1], got {p!r}")


@dataclass(frozen=True)
class ModelDims:
    """Instance size: ``n`` vertices and ``m`` walkers."""

    n: int
    m: int

    def __post_init__(self) -> None:
        _check_n(self.n)
        if not isinstance(self.m, int) or isinstance(self.m, bool):
            raise ValueError(f"walker count must be an integer, got {self.m!r}")
        if self.m < 1:
            raise ValueError(f"walker count must be >= 1, got {self.m}")


def _pow_one_minus(p: float, k: int) -> float:
    """(1-p)^k computed without cancellation for small p."""
    if k == 0:
        return 1.0
    if p < 0.5:
        return math.exp(k * math.log1p(-p))
    return (1.0 - p) ** k


def _one_minus_pow(p: float, k: int) -> float:
    """1 - (1-p)^k with full relative accuracy down to p = 0."""
    if p < 0.5:
        return -math.expm1(k * math.log1p(-p))
    return 1.0 - (1.0 - p) ** k


def stay_prob(n: int, p: float) -> float:
    """One-step probability that a walker stays at its current vertex.

    Equals (1 - (1-p)^n) / (n p), extended by its limit 1 at p = 0.  A
    three-term series is used for n*p below 1e-8; otherwise the numerator
    goes through -expm1(n*log1p(-p)) so the result keeps full relative
    accuracy near the removable singularity.  Decreases from 1 at p = 0
    to 1/n at p = 1.
    """
    _check_n(n)
    _check_p(p)
    if n * p < _SERIES_CUTOFF:
        return 1.0 - (n - 1) * p / 2.0 + (n - 1) * (n - 2) * p * p / 6.0
    return _one_minus_pow(p, n) / (n * p)


def move_prob(n: int, p: float) -> float:
    """One-step probability of moving to one specific other vertex.

    Complements ``stay_prob``: stay + (n-1) * move = 1.
    """
    return (1.0 - stay_prob(n, p)) / (n - 1)


def stay_prob_deriv(n: int, p: float) -> float:
    """Analytic d/dp of ``stay_prob`` (series below the same n*p cutoff)."""
    _check_n(n)
    _check_p(p)
    if n * p < _SERIES_CUTOFF:
        return (
            -(n - 1) / 2.0
            + (n - 1) * (n - 2) * p / 3.0
            - (n - 1) * (n - 2) * (n - 3) * p * p / 8.0
        )
    qn1 = _pow_one_minus(p, n - 1)
    return (n * p * qn1 - _one_minus_pow(p, n)) / (n * p * p)


def binom_pmf(n: int, k: int, p: float) -> float:
    """P(Bin(n, p) = k), exact combinatorial coefficient."""
    if n < 0:
        raise ValueError(f"binomial size must be >= 0, got {n}")
    if not 0 <= k <= n:
        raise ValueError(f"binomial count must lie in [0, {n}], got {k}")
    _check_p(p)
    return math.comb(n, k) * p**k * (1.0 - p) ** (n - k)


def scenario_probs(n: int, p: float) -> tuple[float, float, float, float]:
    """The four one-step pair probabilities behind the stationary pair law.

    With two walkers and a tagged target vertex, conditioning on the degree
    of each occupied vertex gives:

    * pi1 — both walkers sit at the target and both stay;
    * pi2 — walkers at two distinct vertices, one of them the target: the
      one at the target stays, the other moves in;
    * pi3 — both walkers share a non-target vertex and both move to the
      target;
    * pi4 — walkers at two distinct non-target vertices and both move to
      the target (factorized form; satisfies pi4 = p * pi2).

    Degrees are averaged over the graph law, hence the binomial mixtures.
    """
    _check_n(n)
    _check_p(p)
    pi1 = sum(binom_pmf(n - 1, k, p) / (k + 1) ** 2 for k in range(n))
    inv = sum(binom_pmf(n - 2, k, p) / (k + 2) for k in range(n - 1))
    inv_sq = sum(binom_pmf(n - 2, k, p) / (k + 2) ** 2 for k in range(n - 1))
    pi2 = p * inv * inv
    pi3 = p * inv_sq
    pi4 = p * pi2
    return pi1, pi2, pi3, pi4


def kappa(n: int, p: float) -> float:
    """Ratio of the stationary same-vertex and split-pair probabilities.

    Built from the scenario probabilities as
    (2(n-1) pi2 + (n-1)(n-2) pi4) / (1 - pi1 - (n-1) pi3).  The denominator
    vanishes as p -> 0, so p = 0 is outside the domain.
    """
    _check_n(n)
    _check_p_positive(p)
    pi1, pi2, pi3, pi4 = scenario_probs(n, p)
    den = 1.0 - pi1 - (n - 1) * pi3
    if den < _KAPPA_DENOM_FLOOR:
        raise ValueError(
            f"pair-ratio denominator {den:.3e} below {_KAPPA_DENOM_FLOOR:.0e} "
            f"at p={p!r}; too close to the reducible p=0 chain"
        )
    return (2 * (n - 1) * pi2 + (n - 1) * (n - 2) * pi4) / den


def occupancy_pair_probs(n: int, p: float) -> tuple[float, float]:
    """Stationary pair-occupancy probabilities (same vertex, two fixed vertices).

    Returns ``(pi_eq, pi_neq)``: the probability that two tagged walkers sit
    at one specified vertex, and at two specified distinct vertices, in
    stationarity.  Normalization: n*pi_eq + n(n-1)*pi_neq = 1.
    """
    k = kappa(n, p)
    pi_eq = k / (n * (n - 1 + k))
    pi_neq = 1.0 / (n * (n - 1 + k))
    return pi_eq, pi_neq


def second_moment(dims: ModelDims, p: float) -> float:
    """Stationary E[count^2] for a single vertex."""
    pi_eq, _ = occupancy_pair_probs(dims.n, p)
    m = dims.m
    return m / dims.n + m * (m - 1) * pi_eq


def lag1_cov(dims: ModelDims, p: float) -> float:
    """Stationary lag-1 autocovariance of a single vertex count.

    c(p) = (F - G) * E[count^2] + G * m^2/n - m^2/n^2 with F, G the stay and
    per-target move probabilities.  Equals 0 at p = 1 and is decreasing in p,
    which is what makes it invertible; monotonicity is validated on a grid by
    ``lag1_cov_decreasing_violations`` rather than assumed silently.
    """
    n, m = dims.n, dims.m
    f = stay_prob(n, p)
    g = move_prob(n, p)
    m2 = second_moment(dims, p)
    return (f - g) * m2 + g * m * m / n - (m / n) ** 2


def ls_slope(n: int, p: float) -> float:
    """Slope of the one-step conditional mean of a vertex count.

    E[count_{t+1} | counts_t] = slope * count_t + intercept, with
    slope = (n*F - 1)/(n - 1).  Decreases from 1 at p = 0 to 0 at p = 1 and
    is exact for every t — no stationarity needed — which is why the
    least-squares estimator inverts it.
    """
    _check_n(n)
    _check_p(p)
    return (n * stay_prob(n, p) - 1.0) / (n - 1)


def ls_intercept(n: int, p: float) -> float:
    """Intercept factor of the one-step conditional mean: (1 - slope)/n.

    The intercept itself is this factor times the number of walkers.
    """
    return (1.0 - ls_slope(n, p)) / n


def ls_slope_deriv(n: int, p: float) -> float:
    """Analytic d/dp of ``ls_slope``."""
    return n * stay_prob_deriv(n, p) / (n - 1)


def deriv(which: str, dims: ModelDims, p: float, step: float = 1e-5) -> float:
    """Central finite difference of a moment function at p.

    ``which`` selects the function: "c" (lag-1 covariance), "I" (conditional
    mean slope), "F" (stay probability), or "kappa" (pair ratio).  The
    stencil must stay inside (0, 1].  For "F" and "I" the analytic
    derivatives ``stay_prob_deriv`` / ``ls_slope_deriv`` are available as a
    cross-check; the two routes agree to 1e-6 and better.
    """
    if step <= 0.0:
        raise ValueError(f"step must be positive, got {step!r}")
    evaluators: dict[str, Callable[[float], float]] = {
        "c": lambda q: lag1_cov(dims, q),
        "I": lambda q: ls_slope(dims.n, q),
        "F": lambda q: stay_prob(dims.n, q),
        "kappa": lambda q: kappa(dims.n, q),
    }
    if which not in evaluators:
        raise ValueError(f"unknown derivative target {which!r}; expected one of {sorted(evaluators)}")
    if not (0.0 < p - step and p + step <= 1.0):
        raise ValueError(
            f"finite-difference stencil [{p - step!r}, {p + step!r}] leaves (0, 1]"
        )
    f = evaluators[which]
    return (f(p + step) - f(p - step)) / (2.0 * step)


class MonotonicityError(ValueError):
    """The evaluator is not decreasing across the requested bracket."""


class Inversion(NamedTuple):
    """Result of a monotone inversion: the root and a clamping diagnostic."""

    p: float
    clamped: str  # "none" | "low" | "high"


def invert_monotone_decreasing(
    target: float,
    evaluator: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float,
) -> Inversion:
    """Solve evaluator(p) = target by bisection for a decreasing evaluator.

    Returns the midpoint of the final bracket (width <= tol); a target that
    exactly equals an endpoint value returns that endpoint.  Targets above
    evaluator(lo) clamp to ``lo`` with flag "low"; targets below
    evaluator(hi) clamp to ``hi`` with flag "high" — finite-sample noise
    routinely produces such targets, so they are diagnosed, not fatal.
    Raises :class:`MonotonicityError` if the bracket ends are out of order,
    which would silently invalidate the bisection.
    """
    if not lo < hi:
        raise ValueError(f"bracket must satisfy lo < hi, got [{lo!r}, {hi!r}]")
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    f_lo = evaluator(lo)
    f_hi = evaluator(hi)
    if f_lo < f_hi:
        raise MonotonicityError(
            f"evaluator({lo!r})={f_lo!r} < evaluator({hi!r})={f_hi!r}; "
            "not decreasing on the bracket"
        )
    if target > f_lo:
        return Inversion(lo, "low")
    if target < f_hi:
        return Inversion(hi, "high")
    if target == f_lo:
        return Inversion(lo, "none")
    if target == f_hi:
        return Inversion(hi, "none")
    a, b = lo, hi
    while b - a > tol:
        mid = 0.5 * (a + b)
        if evaluator(mid) >= target:
            a = mid
        else:
            b = mid
    return Inversion(0.5 * (a + b), "none")


@dataclass(frozen=True)
class MomentProfile:
    """Every closed-form quantity of the model evaluated at one (n, m, p)."""

    n: int
    m: int
    p: float
    stay_prob: float
    move_prob: float
    pi1: float
    pi2: float
    pi3: float
    pi4: float
    kappa: float
    pi_eq: float
    pi_neq: float
    second_moment: float
    lag1_cov: float
    ls_slope: float
    ls_intercept: float


def moment_profile(dims: ModelDims, p: float) -> MomentProfile:
    """Evaluate the full closed-form profile at one point (requires p > 0)."""
    _check_p_positive(p)
    n, m = dims.n, dims.m
    pi1, pi2, pi3, pi4 = scenario_probs(n, p)
    pi_eq, pi_neq = occupancy_pair_probs(n, p)
    return MomentProfile(
        n=n,
        m=m,
        p=p,
        stay_prob=stay_prob(n, p),
        move_prob=move_prob(n, p),
        pi1=pi1,
        pi2=pi2,
        pi3=pi3,
        pi4=pi4,
        kappa=kappa(n, p),
        pi_eq=pi_eq,
        pi_neq=pi_neq,
        second_moment=second_moment(dims, p),
        lag1_cov=lag1_cov(dims, p),
        ls_slope=ls_slope(n, p),
        ls_intercept=ls_intercept(n, p),
    )


def lag1_cov_decreasing_violations(
    dims: ModelDims,
    num: int = 1000,
    lo: float = P_MIN,
    hi: float = 1.0,
) -> list[float]:
    """Scan a p-grid and return grid points where ``lag1_cov`` fails to decrease.

    The inversion of the covariance assumes it is decreasing; that holds on
    every instance checked but is asserted here instead of being taken on
    faith.  Returns the left endpoints of any increasing grid segment (an
    empty list on well-behaved instances).
    """
    if num < 2:
        raise ValueError(f"grid needs at least 2 points, got {num}")
    ps = [lo + (hi - lo) * i / (num - 1) for i in range(num)]
    cs = [lag1_cov(dims, q) for q in ps]
    return [ps[i] for i in range(num - 1) if cs[i + 1] > cs[i]]

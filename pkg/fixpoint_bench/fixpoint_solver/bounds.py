"""Closed-form convergence bounds of the fixed point optimizer.

The right-hand sides are evaluated with user supplied (usually estimated)
constants and serve as diagnostic ceilings for empirical averages.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from .._compat import StrEnum

from .exceptions import ContractViolation, DomainError
from .schedules import BetaSchedule, Schedule


_LOGGER = logging.getLogger(__name__)


class BoundKind(StrEnum):
    """Available right-hand sides."""

    # E[(1/n) sum_k d(T(y_k), y_k)^2]
    AVERAGE_RESIDUAL_CONSTANT = "average_residual_constant"
    AVERAGE_RESIDUAL_DIMINISHING = "average_residual_diminishing"
    # E[f(x_bar_n) - f_star]
    AVERAGE_OBJECTIVE_CONSTANT = "average_objective_constant"
    AVERAGE_OBJECTIVE_DIMINISHING = "average_objective_diminishing"
    # E[(1/n) sum_k d(T(x_k), x_k)^2] for nonexpansive T
    NONEXPANSIVE_CONSTANT = "nonexpansive_constant"
    NONEXPANSIVE_DIMINISHING = "nonexpansive_diminishing"
    # limsup E[d(y_n, x_n)^2] and E[(1/n) sum_k d(y_k, x_k)^2]
    STEP_DISTANCE_CONSTANT = "step_distance_constant"
    STEP_DISTANCE_DIMINISHING = "step_distance_diminishing"
    # liminf E[d(T(y_n), y_n)^2] and liminf E[f(x_n) - f_star]
    RESIDUAL_GAP_CONSTANT = "residual_gap_constant"
    OBJECTIVE_GAP_CONSTANT = "objective_gap_constant"

    @property
    def diminishing(self) -> bool:
        """Return True for the diminishing step-size forms."""
        return self.value.endswith("_diminishing")


PER_FACTOR_KINDS = frozenset({
    BoundKind.AVERAGE_RESIDUAL_CONSTANT,
    BoundKind.AVERAGE_RESIDUAL_DIMINISHING,
    BoundKind.NONEXPANSIVE_CONSTANT,
    BoundKind.NONEXPANSIVE_DIMINISHING,
    BoundKind.STEP_DISTANCE_CONSTANT,
    BoundKind.STEP_DISTANCE_DIMINISHING,
    BoundKind.RESIDUAL_GAP_CONSTANT,
})


@dataclass(frozen=True, slots=True)
class FactorBoundConstants:
    """Constants of one factor.

    Attributes
    ----------
    zeta : float
        Comparison constant zeta(kappa, D).
    b_tilde : float
        Bound of the stochastic gradient and initial momentum norms.
    b_hat : float
        Bound of the expected rates h_n.
    diameter : float
        Diameter D of the constraint superset C.
    h0 : float
        Initial rate h_0.
    alpha_relax : float
        Relaxation parameter in (0, 1).

    """

    zeta: float
    b_tilde: float
    b_hat: float
    diameter: float
    h0: float
    alpha_relax: float

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha_relax < 1.0:
            raise DomainError(
                f"alpha_relax must lie in (0, 1), got {self.alpha_relax}"
            )
        if not self.h0 > 0.0:
            raise DomainError(f"h0 must be positive, got {self.h0}")

    @property
    def alpha_hat(self) -> float:
        """Return alpha (1 - alpha)."""
        return self.alpha_relax * (1.0 - self.alpha_relax)


@dataclass(frozen=True, slots=True)
class BoundParameters:
    """Constants and schedules entering the bounds."""

    factors: tuple[FactorBoundConstants, ...]
    hat_beta: float
    beta_one: float
    alpha: Schedule
    beta: BetaSchedule

    def __post_init__(self) -> None:
        object.__setattr__(self, "factors", tuple(self.factors))
        if not 0.0 <= self.hat_beta < 1.0:
            raise DomainError(f"hat_beta must lie in [0, 1), got {self.hat_beta}")
        if not 0.0 <= self.beta_one < 1.0:
            raise DomainError(f"beta_1 must lie in [0, 1), got {self.beta_one}")


@dataclass(frozen=True, slots=True)
class _StepTerms:
    alpha: float
    alpha_sq: float
    beta: float
    inv_alpha_n: float


def _step_terms(params: BoundParameters, n: int, diminishing: bool) -> _StepTerms:
    if not diminishing:
        alpha = params.alpha.value(1)
        return _StepTerms(
            alpha=alpha,
            alpha_sq=alpha * alpha,
            beta=params.beta.value(1),
            inv_alpha_n=1.0 / (alpha * n),
        )
    alphas = params.alpha.values(n)
    return _StepTerms(
        alpha=math.fsum(alphas) / n,
        alpha_sq=math.fsum(alphas * alphas) / n,
        beta=math.fsum(params.beta.values(n)) / n,
        inv_alpha_n=1.0 / (n * alphas[-1]),
    )


def _factor_term(
        kind: BoundKind,
        c: FactorBoundConstants,
        hat_beta: float,
        n: int,
        s: _StepTerms
) -> float:
    h0_hat = (1.0 - hat_beta) * c.h0
    b2 = c.b_tilde * c.b_tilde
    match kind:
        case BoundKind.AVERAGE_RESIDUAL_CONSTANT | BoundKind.AVERAGE_RESIDUAL_DIMINISHING:
            return (
                c.diameter / (c.alpha_hat * n)
                + 2.0 * c.b_tilde * c.diameter / (c.alpha_hat * h0_hat) * s.alpha
                + c.zeta * b2 / (c.alpha_hat * h0_hat ** 2) * s.alpha_sq
            )
        case BoundKind.NONEXPANSIVE_CONSTANT | BoundKind.NONEXPANSIVE_DIMINISHING:
            return (
                2.0 * c.diameter / (c.alpha_hat * n)
                + 4.0 * c.b_tilde * c.diameter / (c.alpha_hat * h0_hat) * s.alpha
                + 2.0 * b2 / h0_hat ** 2
                * (c.zeta / c.alpha_hat + 4.0 / (1.0 - hat_beta) ** 2)
                * s.alpha_sq
            )
        case BoundKind.STEP_DISTANCE_CONSTANT:
            return b2 / ((1.0 - hat_beta) ** 2 * c.h0 ** 2) * s.alpha_sq
        case BoundKind.STEP_DISTANCE_DIMINISHING:
            return b2 / ((1.0 - hat_beta) ** 2 * h0_hat ** 2) * s.alpha_sq
        case BoundKind.RESIDUAL_GAP_CONSTANT:
            return (
                2.0 * c.b_tilde * c.diameter / ((1.0 - hat_beta) * c.h0) * s.alpha
                + c.zeta * b2 / ((1.0 - hat_beta) ** 2 * c.h0 ** 2) * s.alpha_sq
            ) / c.alpha_hat
    raise ContractViolation(f"{kind} is not a per-factor bound")


def _objective_bound(
        kind: BoundKind,
        params: BoundParameters,
        s: _StepTerms
) -> float:
    factors = params.factors
    hat_beta = params.hat_beta
    if kind is BoundKind.OBJECTIVE_GAP_CONSTANT:
        gamma = (1.0 - s.beta) * (1.0 - hat_beta)
        return (
            math.fsum(c.zeta * c.b_tilde ** 2 / c.h0 for c in factors)
            / (2.0 * gamma) * s.alpha
            + math.fsum(c.b_tilde * c.diameter for c in factors)
            / gamma * s.beta
        )
    beta_gap = 1.0 - params.beta_one
    return (
        math.fsum(c.b_hat * c.diameter ** 2 for c in factors)
        / (2.0 * beta_gap) * s.inv_alpha_n
        + math.fsum(c.zeta * c.b_tilde ** 2 / c.h0 for c in factors)
        / (2.0 * (1.0 - hat_beta) * beta_gap) * s.alpha
        + math.fsum(c.b_tilde * c.diameter for c in factors)
        / beta_gap * s.beta
    )


def theorem_bound_rhs(params: BoundParameters, n: int, which: BoundKind) -> float:
    """Return the right-hand side of the selected bound at n >= 1.

    Per-factor bounds are summed over the factors, matching empirical
    quantities summed over i.
    """
    which = BoundKind(which)
    if n < 1:
        raise ContractViolation(f"Bounds are defined for n >= 1, got {n}")
    terms = _step_terms(params, n, which.diminishing)
    if which in PER_FACTOR_KINDS:
        return math.fsum(
            _factor_term(which, c, params.hat_beta, n, terms)
            for c in params.factors
        )
    return _objective_bound(which, params, terms)

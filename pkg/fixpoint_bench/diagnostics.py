"""Compare recorded runs with the closed-form convergence bounds."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from statistics import fmean
from typing import Any

from .config import RunConfig
from .const import CONSTANT_INFLATION
from .exceptions import ConfigError
from .fixpoint_solver.bounds import (
    BoundKind,
    BoundParameters,
    FactorBoundConstants,
    theorem_bound_rhs,
)
from .fixpoint_solver.const import CURVATURE, TARGET_RADIUS
from .fixpoint_solver.manifold import comparison_constant
from .fixpoint_solver.models import RunRecord
from .presets import AlgorithmDescription


_LOGGER = logging.getLogger(__name__)

# relative slack absorbing round-off in the comparison
BOUND_RTOL = 1e-9


@dataclass(frozen=True, slots=True)
class BoundCheck:
    """Empirical average versus bound at one iteration count."""

    algorithm: str
    kind: BoundKind
    n: int
    empirical: float
    bound: float

    @property
    def ratio(self) -> float:
        """Return empirical / bound, inf for a non-positive bound."""
        if self.bound <= 0.0:
            return math.inf
        return self.empirical / self.bound

    @property
    def violated(self) -> bool:
        """Return True if the empirical value exceeds the bound."""
        return not self.empirical <= self.bound * (1.0 + BOUND_RTOL)

    def to_dict(self) -> dict[str, Any]:
        """Return a JSON-compatible entry."""
        return {
            "kind": str(self.kind),
            "n": self.n,
            "empirical": self.empirical,
            "bound": self.bound,
            "ratio": self.ratio,
            "violated": self.violated,
        }


def checkpoints(iterations: int) -> list[int]:
    """Return the iteration counts at which bounds are checked."""
    if iterations < 1:
        return []
    return sorted({max(1, iterations // 4), max(1, iterations // 2), iterations})


def tight_diameters(runs: Sequence[RunRecord]) -> list[float] | None:
    """Return per factor twice the largest recorded reach, if recorded."""
    if not runs or any(run.reach is None for run in runs):
        return None
    return [
        2.0 * max(run.reach[i] for run in runs)
        for i in range(len(runs[0].reach))
    ]


def estimate_constants(
        description: AlgorithmDescription,
        runs: Sequence[RunRecord],
        diameters: Sequence[float] | None = None
) -> BoundParameters:
    """Estimate the bound constants from the recorded diagnostics.

    B~ and B^ are the largest observed gradient norm and rate inflated by
    a factor 1.5, h_0 is the smallest initial rate over the samplings and
    D is the diameter of the constraint superset unless per-factor
    ``diameters`` are given.
    """
    factors = len(runs[0].diagnostics[0].rates)
    if diameters is None:
        diameters = [2.0 * TARGET_RADIUS] * factors
    steps = [step for run in runs for step in run.diagnostics]
    constants = []
    for i, diameter in enumerate(diameters):
        zeta = comparison_constant(CURVATURE, diameter)
        b_tilde = CONSTANT_INFLATION * max(
            max(step.grad_norms[i], step.momentum_norms[i]) for step in steps
        )
        b_hat = CONSTANT_INFLATION * max(step.rates[i] for step in steps)
        h0 = min(run.diagnostics[0].rates[i] for run in runs)
        constants.append(FactorBoundConstants(
            zeta=zeta,
            b_tilde=b_tilde,
            b_hat=b_hat,
            diameter=diameter,
            h0=h0,
            alpha_relax=description.alpha_relax,
        ))
    return BoundParameters(
        factors=tuple(constants),
        hat_beta=description.hat_beta,
        beta_one=description.beta.value(1),
        alpha=description.alpha,
        beta=description.beta,
    )


def _mean_prefix(runs: Sequence[RunRecord], n: int, values) -> float:
    """Return the sampling mean of (1/n) sum_{k<=n} values(run, k)."""
    return fmean(
        math.fsum(values(run, k) for k in range(1, n + 1)) / n
        for run in runs
    )


def _y_residual(run: RunRecord, k: int) -> float:
    return math.fsum(r * r for r in run.diagnostics[k - 1].y_residuals)


def _x_residual(run: RunRecord, k: int) -> float:
    return math.fsum(r * r for r in run.rows[k].residuals)


def _step_distance(run: RunRecord, k: int) -> float:
    return math.fsum(d * d for d in run.diagnostics[k - 1].step_distances)


def check_algorithm(
        description: AlgorithmDescription,
        runs: Sequence[RunRecord],
        iterations: int,
        diameters: Sequence[float] | None = None
) -> list[BoundCheck]:
    """Check one algorithm's runs against the per-factor bounds."""
    if not runs or iterations < 1:
        return []
    params = estimate_constants(description, runs, diameters)
    if description.diminishing:
        kinds = (
            (BoundKind.AVERAGE_RESIDUAL_DIMINISHING, _y_residual),
            (BoundKind.NONEXPANSIVE_DIMINISHING, _x_residual),
            (BoundKind.STEP_DISTANCE_DIMINISHING, _step_distance),
        )
    else:
        kinds = (
            (BoundKind.AVERAGE_RESIDUAL_CONSTANT, _y_residual),
            (BoundKind.NONEXPANSIVE_CONSTANT, _x_residual),
            (BoundKind.STEP_DISTANCE_CONSTANT, _step_distance),
        )
    return [
        BoundCheck(
            algorithm=description.key,
            kind=kind,
            n=n,
            empirical=_mean_prefix(runs, n, values),
            bound=theorem_bound_rhs(params, n, kind),
        )
        for n in checkpoints(iterations)
        for kind, values in kinds
    ]


def bound_report(records: Sequence[RunRecord], config: RunConfig) -> dict[str, Any]:
    """Return the bound diagnostics of an experiment.

    Violations are counted against D = diam(C). The ``tight`` section
    repeats the checks with D taken from the recorded reach of the runs
    and only reports the ratios.

    Raises
    ------
    ConfigError
        If the records were produced without step diagnostics.

    """
    if any(record.diagnostics is None for record in records):
        raise ConfigError(
            "Bound diagnostics require runs recorded with 'bound_diagnostics'"
        )
    algorithms = {}
    tight = {}
    violations = []
    for description in config.algorithms:
        runs = [r for r in records if r.algorithm == description.key]
        checks = check_algorithm(description, runs, config.iterations)
        for check in checks:
            if check.violated:
                _LOGGER.warning(
                    f"{check.algorithm}: {check.kind} violated at n = {check.n}: "
                    f"{check.empirical!r} > {check.bound!r}"
                )
                violations.append(check.to_dict() | {"algorithm": check.algorithm})
        algorithms[description.key] = [check.to_dict() for check in checks]

        diameters = tight_diameters(runs)
        if diameters is None:
            continue
        tight_checks = check_algorithm(
            description, runs, config.iterations, diameters
        )
        for check in tight_checks:
            _LOGGER.info(
                f"{check.algorithm}: {check.kind} at n = {check.n} reaches "
                f"{check.ratio:.3g} of the bound with D = {max(diameters):.3g}"
            )
        tight[description.key] = {
            "diameters": diameters,
            "checks": [check.to_dict() for check in tight_checks],
        }
    return {"algorithms": algorithms, "tight": tight, "violations": violations}

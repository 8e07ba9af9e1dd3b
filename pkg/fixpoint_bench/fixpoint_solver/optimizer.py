"""Riemannian stochastic fixed point optimizer.

One iteration, per factor i:

    m_n = beta_n tau_{n-1} + (1 - beta_n) G_n
    d_n = -m_n / ((1 - hat_beta^(n+1)) h_n)
    y_n = exp_{x_n}(alpha_n d_n)
    x_{n+1} = Q(y_n)
    tau_n = transport_{x_n -> x_{n+1}}(m_n)
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterator, Sequence

from .engines import RateEngine
from .exceptions import BasePointMismatch, ContractViolation, LengthMismatch
from .fixmaps import ProjectedRelaxation
from .manifold import ProductManifold, ProductPoint, ProductTangent, Tangent
from .models import OptimizerState, StepReport
from .schedules import BetaSchedule, Schedule


_LOGGER = logging.getLogger(__name__)

GradientFn = Callable[[ProductPoint, int], ProductTangent]


def init_state(
        manifold: ProductManifold,
        x0: ProductPoint,
        maps: Sequence[ProjectedRelaxation],
        engines: Sequence[RateEngine],
        hat_beta: float,
) -> OptimizerState:
    """Return the state at n = 0 with zero momentum and x_bar_0 = x_0."""
    count = len(manifold)
    if len(x0) != count or len(maps) != count or len(engines) != count:
        raise LengthMismatch(
            f"Expected {count} points, maps and engines, got "
            f"{len(x0)}, {len(maps)} and {len(engines)}"
        )
    if not 0.0 <= hat_beta < 1.0:
        raise ContractViolation(f"hat_beta must lie in [0, 1), got {hat_beta}")
    return OptimizerState(
        manifold=manifold,
        x=x0,
        tau_prev=manifold.zero_tangent(x0),
        engines=list(engines),
        maps=tuple(maps),
        hat_beta=hat_beta,
        avg=x0,
    )


def average_update(
        manifold: ProductManifold,
        avg: ProductPoint,
        x: ProductPoint,
        n: int
) -> ProductPoint:
    """Return exp_{avg}(log_{avg}(x) / n), the running geodesic mean."""
    if n < 1:
        raise ContractViolation(f"Average index must be >= 1, got {n}")
    if n == 1:
        return x
    return ProductPoint(tuple(
        disk.exp(a, disk.log(a, p).scaled(1.0 / n))
        for disk, a, p in zip(manifold.factors, avg, x)
    ))


def step(
        state: OptimizerState,
        gradient: ProductTangent,
        alpha_n: float,
        beta_n: float
) -> StepReport:
    """Advance the state by one iteration in place.

    Parameters
    ----------
    state : OptimizerState
        Current state, mutated.
    gradient : ProductTangent
        Stochastic gradient anchored at ``state.x``.
    alpha_n : float
        Step size in (0, 1).
    beta_n : float
        Momentum weight in [0, 1).

    Returns
    -------
    StepReport
        The advanced state with per-factor step diagnostics.

    Raises
    ------
    ContractViolation
        If the gradient or the step sizes are invalid.

    """
    manifold = state.manifold
    if len(gradient) != len(manifold):
        raise LengthMismatch(
            f"Expected {len(manifold)} gradient parts, got {len(gradient)}"
        )
    if not 0.0 < alpha_n < 1.0:
        raise ContractViolation(f"alpha_n must lie in (0, 1), got {alpha_n}")
    if not 0.0 <= beta_n < 1.0:
        raise ContractViolation(f"beta_n must lie in [0, 1), got {beta_n}")

    n = state.n
    bias = 1.0 - state.hat_beta ** (n + 1)
    x_next, tau_next, ys = [], [], []
    step_distances, y_residuals, rates = [], [], []
    grad_norms, momentum_norms = [], []
    clamps = 0

    for i, disk in enumerate(manifold.factors):
        x = state.x[i]
        g = gradient[i]
        if not g.base.same_point(x):
            raise BasePointMismatch(f"Gradient part {i} is not anchored at x_n")
        m = Tangent(x, beta_n * state.tau_prev[i].vec + (1.0 - beta_n) * g.vec)
        grad_sq = disk.inner(g, g)
        h = state.engines[i].update(grad_sq, n)
        y = disk.exp(x, m.scaled(-alpha_n / (bias * h)))
        image, x_new = state.maps[i].trace(y)

        x_next.append(x_new)
        tau_next.append(disk.transport(x, x_new, m))
        ys.append(y)
        step_distances.append(disk.dist(x, y))
        y_residuals.append(disk.dist(y, image))
        rates.append(h)
        grad_norms.append(grad_sq ** 0.5)
        momentum_norms.append(disk.norm(m))
        clamps += y.clamped + x_new.clamped

    new_x = ProductPoint(tuple(x_next))
    state.avg = average_update(manifold, state.avg, new_x, n + 1)
    state.x = new_x
    state.tau_prev = ProductTangent(tuple(tau_next))
    state.n = n + 1
    state.clamp_count += clamps
    if clamps:
        _LOGGER.debug(f"Step {n}: {clamps} clamped points")

    return StepReport(
        state=state,
        y=ProductPoint(tuple(ys)),
        step_distances=tuple(step_distances),
        y_residuals=tuple(y_residuals),
        rates=tuple(rates),
        grad_norms=tuple(grad_norms),
        momentum_norms=tuple(momentum_norms),
        clamps=clamps,
    )


def iterate(
        state: OptimizerState,
        gradient_fn: GradientFn,
        alpha: Schedule,
        beta: BetaSchedule,
        iterations: int,
) -> Iterator[StepReport]:
    """Run ``iterations`` steps, yielding one report per step.

    ``gradient_fn(x, n)`` returns the stochastic gradient at x for the
    0-based iteration n; the schedules are evaluated at n + 1.
    """
    for _ in range(iterations):
        n = state.n
        gradient = gradient_fn(state.x, n)
        yield step(state, gradient, alpha.value(n + 1), beta.value(n + 1))

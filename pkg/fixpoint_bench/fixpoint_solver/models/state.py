"""Models of the optimizer state."""

from __future__ import annotations

from dataclasses import dataclass

from ..engines import RateEngine
from ..fixmaps import ProjectedRelaxation
from ..manifold import ProductManifold, ProductPoint, ProductTangent


@dataclass(slots=True)
class OptimizerState:
    """Full per-iteration state of the fixed point optimizer.

    ``tau_prev`` holds the transported momentum anchored at ``x`` and
    ``avg`` the geodesic running average of the iterates.
    """

    manifold: ProductManifold
    x: ProductPoint
    tau_prev: ProductTangent
    engines: list[RateEngine]
    maps: tuple[ProjectedRelaxation, ...]
    hat_beta: float
    avg: ProductPoint
    n: int = 0
    clamp_count: int = 0

    @property
    def alpha_relax(self) -> tuple[float, ...]:
        """Return the per-factor relaxation parameters."""
        return tuple(q.alpha for q in self.maps)


@dataclass(slots=True)
class StepReport:
    """Outcome of one iteration.

    Per-factor tuples are indexed like the factors of the manifold.
    ``y`` is exp_x(alpha_n d_n) before the application of Q and
    ``y_residuals`` holds d(T(y), y).
    """

    state: OptimizerState
    y: ProductPoint
    step_distances: tuple[float, ...]
    y_residuals: tuple[float, ...]
    rates: tuple[float, ...]
    grad_norms: tuple[float, ...]
    momentum_norms: tuple[float, ...]
    clamps: int = 0

"""Models of recorded optimizer runs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .state import StepReport


@dataclass(frozen=True, slots=True)
class RunRow:
    """Measurements at one iterate x_n of a run."""

    n: int
    residuals: tuple[float, ...]
    d_contrib: float
    f_value: float
    clamps: int

    @classmethod
    def from_residuals(
            cls,
            n: int,
            residuals: tuple[float, ...],
            f_value: float,
            clamps: int = 0
    ) -> RunRow:
        """Instantiate the row, deriving sqrt(sum_i d_i^2)."""
        residuals = tuple(residuals)
        return cls(
            n=n,
            residuals=residuals,
            d_contrib=math.sqrt(math.fsum(r * r for r in residuals)),
            f_value=f_value,
            clamps=clamps,
        )


@dataclass(frozen=True, slots=True)
class StepDiagnostics:
    """Per-factor quantities of the step producing y_k."""

    k: int
    y_residuals: tuple[float, ...]
    step_distances: tuple[float, ...]
    rates: tuple[float, ...]
    grad_norms: tuple[float, ...]
    momentum_norms: tuple[float, ...]

    @classmethod
    def from_report(cls, k: int, report: StepReport) -> StepDiagnostics:
        """Instantiate from a step report."""
        return cls(
            k=k,
            y_residuals=report.y_residuals,
            step_distances=report.step_distances,
            rates=report.rates,
            grad_norms=report.grad_norms,
            momentum_norms=report.momentum_norms,
        )


@dataclass(slots=True)
class RunRecord:
    """Time series of one algorithm on one sampling."""

    algorithm: str
    algorithm_index: int
    sampling: int
    seed: int
    rows: list[RunRow] = field(default_factory=list)
    diagnostics: list[StepDiagnostics] | None = None
    # per factor, a radius around the origin enclosing the iterates and balls
    reach: list[float] | None = None
    final_digest: str = ""
    average_value: float = math.nan
    elapsed: float = 0.0
    clamped_steps: int = 0

    @property
    def iterations(self) -> int:
        """Return the number of performed steps."""
        return len(self.rows) - 1

    @property
    def factors(self) -> int:
        """Return the number of factors."""
        return len(self.rows[0].residuals) if self.rows else 0

    @property
    def clamp_count(self) -> int:
        """Return the total number of clamped points."""
        return sum(row.clamps for row in self.rows)

    @property
    def sort_key(self) -> tuple[int, int]:
        """Return the output ordering key."""
        return self.algorithm_index, self.sampling

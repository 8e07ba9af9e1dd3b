"""Step-size schedules alpha_n and beta_n.

Schedules are 1-indexed: ``value(n)`` is defined for n >= 1 and the
optimizer evaluates iteration n (counting from 0) at n + 1.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from .._compat import StrEnum
from typing import Any

import numpy as np

from .exceptions import ContractViolation, DomainError


_LOGGER = logging.getLogger(__name__)


class ScheduleKind(StrEnum):
    """Kinds of alpha schedules."""

    CONSTANT = "constant"
    POWER = "power"


class BetaKind(StrEnum):
    """Kinds of beta schedules."""

    CONSTANT = "constant"
    GEOMETRIC = "geometric"


def _check_index(n: int) -> None:
    if n < 1:
        raise ContractViolation(f"Schedules are defined for n >= 1, got {n}")


@dataclass(frozen=True, slots=True)
class Schedule:
    """alpha_n = base (constant) or base / n**exponent (power)."""

    kind: ScheduleKind
    base: float
    exponent: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ScheduleKind(self.kind))
        if not self.base > 0.0:
            raise DomainError(f"Schedule base must be positive, got {self.base}")
        if not 0.0 <= self.exponent <= 1.0:
            raise DomainError(
                f"Schedule exponent must lie in [0, 1], got {self.exponent}"
            )

    @classmethod
    def constant(cls, base: float) -> Schedule:
        """Return a constant schedule."""
        return cls(ScheduleKind.CONSTANT, base)

    @classmethod
    def power(cls, base: float, exponent: float = 0.5) -> Schedule:
        """Return base / n**exponent."""
        return cls(ScheduleKind.POWER, base, exponent)

    @property
    def is_constant(self) -> bool:
        """Return True for a constant schedule."""
        return self.kind is ScheduleKind.CONSTANT or self.exponent == 0.0

    def value(self, n: int) -> float:
        """Return alpha_n."""
        _check_index(n)
        if self.kind is ScheduleKind.CONSTANT:
            return self.base
        return self.base / n ** self.exponent

    def values(self, n: int) -> np.ndarray:
        """Return (alpha_1, ..., alpha_n)."""
        _check_index(n)
        if self.kind is ScheduleKind.CONSTANT:
            return np.full(n, self.base)
        return self.base / np.arange(1, n + 1, dtype=np.float64) ** self.exponent

    def to_dict(self) -> dict[str, Any]:
        """Return a JSON-compatible description."""
        if self.kind is ScheduleKind.CONSTANT:
            return {"kind": str(self.kind), "base": self.base}
        return {
            "kind": str(self.kind),
            "base": self.base,
            "exponent": self.exponent,
        }


@dataclass(frozen=True, slots=True)
class BetaSchedule:
    """beta_n = base (constant) or ratio**n (geometric)."""

    kind: BetaKind
    base: float = 0.0
    ratio: float = 0.5

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", BetaKind(self.kind))
        if self.kind is BetaKind.CONSTANT and not 0.0 <= self.base < 1.0:
            raise DomainError(f"beta must lie in [0, 1), got {self.base}")
        if self.kind is BetaKind.GEOMETRIC and not 0.0 < self.ratio < 1.0:
            raise DomainError(
                f"beta ratio must lie in (0, 1), got {self.ratio}"
            )

    @classmethod
    def constant(cls, base: float) -> BetaSchedule:
        """Return a constant schedule."""
        return cls(BetaKind.CONSTANT, base=base)

    @classmethod
    def geometric(cls, ratio: float) -> BetaSchedule:
        """Return ratio**n."""
        return cls(BetaKind.GEOMETRIC, ratio=ratio)

    @property
    def is_constant(self) -> bool:
        """Return True for a constant schedule."""
        return self.kind is BetaKind.CONSTANT

    def value(self, n: int) -> float:
        """Return beta_n."""
        _check_index(n)
        if self.kind is BetaKind.CONSTANT:
            return self.base
        return self.ratio ** n

    def values(self, n: int) -> np.ndarray:
        """Return (beta_1, ..., beta_n)."""
        _check_index(n)
        if self.kind is BetaKind.CONSTANT:
            return np.full(n, self.base)
        return self.ratio ** np.arange(1, n + 1, dtype=np.float64)

    def to_dict(self) -> dict[str, Any]:
        """Return a JSON-compatible description."""
        if self.kind is BetaKind.CONSTANT:
            return {"kind": str(self.kind), "base": self.base}
        return {"kind": str(self.kind), "ratio": self.ratio}

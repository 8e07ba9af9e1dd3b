"""Adaptive rate engines producing the per-factor scalars h_n."""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from collections.abc import Callable
from typing import ClassVar

from .const import DEFAULT_BAR_BETA, V_INIT
from .exceptions import ContractViolation, DomainError, NonPositiveRateError


_LOGGER = logging.getLogger(__name__)

ENGINES: dict[str, type[RateEngine]] = {}


def register_engine(kind: str) -> Callable[[type[RateEngine]], type[RateEngine]]:
    """Register the decorated engine class under ``kind``.

    Parameters
    ----------
    kind : str
        Name the engine is resolved by.

    Returns
    -------
    Callable
        Class decorator returning the class unchanged.

    """
    def decorator(cls: type[RateEngine]) -> type[RateEngine]:
        cls.kind = kind
        ENGINES[kind] = cls
        _LOGGER.debug(f"Registered rate engine {kind}: {cls.__name__}")
        return cls

    return decorator


class RateEngine(ABC):
    """Base class of a rate engine.

    Attributes
    ----------
    monotone : bool
        True if the emitted rates adapt and never decrease.
    bar_beta : float
        Decay of the squared-gradient moving average.
    v : float
        Moving average or accumulator of squared gradient norms.
    v_hat : float
        Running maximum.
    h : float or None
        Last emitted rate.

    """

    kind: ClassVar[str]
    monotone: ClassVar[bool] = True

    def __init__(
            self,
            *,
            bar_beta: float = DEFAULT_BAR_BETA,
            v_init: float = V_INIT
    ) -> None:
        """Initialize the engine state."""
        if not 0.0 <= bar_beta < 1.0:
            raise DomainError(f"bar_beta must lie in [0, 1), got {bar_beta}")
        if v_init < 0.0:
            raise DomainError(f"v_init must be nonnegative, got {v_init}")
        self.bar_beta = bar_beta
        self.v_init = v_init
        self.v = v_init
        self.v_hat = v_init
        self.h: float | None = None

    def update(self, grad_sq_norm: float, n: int) -> float:
        """Feed |G_n|^2 and return h_n.

        Raises
        ------
        NonPositiveRateError
            If the recursion yields h <= 0.

        """
        if grad_sq_norm < 0.0:
            raise ContractViolation(
                f"Squared norm must be nonnegative, got {grad_sq_norm}"
            )
        h = self._rate(grad_sq_norm, n)
        if not h > 0.0:
            raise NonPositiveRateError(
                f"{self.kind} engine emitted h = {h!r} at n = {n}"
            )
        self.h = h
        return h

    @abstractmethod
    def _rate(self, grad_sq_norm: float, n: int) -> float:
        """Advance the recursion and return h_n."""


@register_engine("sgd")
class SgdEngine(RateEngine):
    """h_n = 1."""

    monotone = False

    def _rate(self, grad_sq_norm: float, n: int) -> float:
        return 1.0


@register_engine("adagrad")
class AdaGradEngine(RateEngine):
    """h_n = sqrt(v_init + sum_k |G_k|^2)."""

    def _rate(self, grad_sq_norm: float, n: int) -> float:
        self.v += grad_sq_norm
        return math.sqrt(self.v)


@register_engine("adam")
class AdamEngine(RateEngine):
    """Bias-corrected moving average with a running maximum."""

    def _rate(self, grad_sq_norm: float, n: int) -> float:
        self.v = self.bar_beta * self.v + (1.0 - self.bar_beta) * grad_sq_norm
        v_bar = self.v / (1.0 - self.bar_beta ** (n + 1))
        self.v_hat = max(self.v_hat, v_bar)
        return math.sqrt(self.v_hat)


@register_engine("amsgrad")
class AmsGradEngine(RateEngine):
    """Moving average with a running maximum."""

    def _rate(self, grad_sq_norm: float, n: int) -> float:
        self.v = self.bar_beta * self.v + (1.0 - self.bar_beta) * grad_sq_norm
        self.v_hat = max(self.v_hat, self.v)
        return math.sqrt(self.v_hat)


def create_engine(kind: str, **params) -> RateEngine:
    """Return a fresh engine of the given kind."""
    try:
        cls = ENGINES[kind]
    except KeyError:
        raise ContractViolation(
            f"Unknown rate engine {kind!r}, expected one of {sorted(ENGINES)}"
        ) from None
    return cls(**params)


def engine_update(engine: RateEngine, grad_sq_norm: float, n: int) -> float:
    """Advance an engine by one gradient and return h_n."""
    return engine.update(grad_sq_norm, n)

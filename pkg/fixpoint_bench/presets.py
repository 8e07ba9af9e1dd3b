"""Algorithm presets of the benchmark."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

from .exceptions import ConfigError
from .fixpoint_solver.const import DEFAULT_BAR_BETA
from .fixpoint_solver.engines import ENGINES
from .fixpoint_solver.exceptions import ContractViolation
from .fixpoint_solver.schedules import BetaSchedule, Schedule


_LOGGER = logging.getLogger(__name__)

ALPHA_RELAX = 0.5

CUSTOM = "custom"


@dataclass(frozen=True, kw_only=True)
class AlgorithmDescription:
    """Provide a description of one optimizer configuration."""

    key: str
    name: str
    engine: str
    alpha: Schedule
    beta: BetaSchedule
    hat_beta: float = 0.0
    bar_beta: float = DEFAULT_BAR_BETA
    alpha_relax: float = ALPHA_RELAX

    @property
    def diminishing(self) -> bool:
        """Return True if the step sizes diminish."""
        return not self.alpha.is_constant

    def to_dict(self) -> dict[str, Any]:
        """Return a JSON-compatible description."""
        return {
            "key": self.key,
            "name": self.name,
            "engine": self.engine,
            "alpha": self.alpha.to_dict(),
            "beta": self.beta.to_dict(),
            "hat_beta": self.hat_beta,
            "bar_beta": self.bar_beta,
            "alpha_relax": self.alpha_relax,
        }


CONSTANT_STEP_ALGORITHMS = (
    AlgorithmDescription(
        key="CSD",
        name="SGD, constant steps",
        engine="sgd",
        alpha=Schedule.constant(1e-2),
        beta=BetaSchedule.constant(0.0),
    ),
    AlgorithmDescription(
        key="CAG",
        name="AdaGrad, constant steps",
        engine="adagrad",
        alpha=Schedule.constant(1e-2),
        beta=BetaSchedule.constant(0.0),
    ),
    AlgorithmDescription(
        key="CAM1",
        name="AMSGrad, constant steps, beta 0.9",
        engine="amsgrad",
        alpha=Schedule.constant(1e-2),
        beta=BetaSchedule.constant(0.9),
    ),
    AlgorithmDescription(
        key="CAM2",
        name="AMSGrad, constant steps, beta 1e-3",
        engine="amsgrad",
        alpha=Schedule.constant(1e-2),
        beta=BetaSchedule.constant(1e-3),
    ),
    AlgorithmDescription(
        key="CAD1",
        name="Adam, constant steps, beta 0.9",
        engine="adam",
        alpha=Schedule.constant(1e-2),
        beta=BetaSchedule.constant(0.9),
        hat_beta=0.9,
    ),
    AlgorithmDescription(
        key="CAD2",
        name="Adam, constant steps, beta 1e-3",
        engine="adam",
        alpha=Schedule.constant(1e-2),
        beta=BetaSchedule.constant(1e-3),
        hat_beta=0.9,
    ),
)


DIMINISHING_STEP_ALGORITHMS = (
    AlgorithmDescription(
        key="DSD",
        name="SGD, diminishing steps",
        engine="sgd",
        alpha=Schedule.power(1e-1, 0.5),
        beta=BetaSchedule.constant(0.0),
    ),
    AlgorithmDescription(
        key="DAG",
        name="AdaGrad, diminishing steps",
        engine="adagrad",
        alpha=Schedule.power(1e-1, 0.5),
        beta=BetaSchedule.constant(0.0),
    ),
    AlgorithmDescription(
        key="DAM1",
        name="AMSGrad, diminishing steps, beta 0.5^n",
        engine="amsgrad",
        alpha=Schedule.power(1e-1, 0.5),
        beta=BetaSchedule.geometric(0.5),
    ),
    AlgorithmDescription(
        key="DAM2",
        name="AMSGrad, diminishing steps, beta 0.9^n",
        engine="amsgrad",
        alpha=Schedule.power(1e-1, 0.5),
        beta=BetaSchedule.geometric(0.9),
    ),
    AlgorithmDescription(
        key="DAD1",
        name="Adam, diminishing steps, beta 0.5^n",
        engine="adam",
        alpha=Schedule.power(1e-1, 0.5),
        beta=BetaSchedule.geometric(0.5),
        hat_beta=0.9,
    ),
    AlgorithmDescription(
        key="DAD2",
        name="Adam, diminishing steps, beta 0.9^n",
        engine="adam",
        alpha=Schedule.power(1e-1, 0.5),
        beta=BetaSchedule.geometric(0.9),
        hat_beta=0.9,
    ),
)


PRESETS = {
    description.key: description
    for description in CONSTANT_STEP_ALGORITHMS + DIMINISHING_STEP_ALGORITHMS
}


def _alpha_from(value: Any) -> Schedule:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return Schedule.constant(float(value))
    if isinstance(value, dict):
        kind = value.get("kind", "constant")
        if kind == "constant":
            return Schedule.constant(float(value["base"]))
        if kind == "power":
            return Schedule.power(
                float(value["base"]), float(value.get("exponent", 0.5))
            )
        raise ConfigError(f"Unknown alpha schedule kind {kind!r}")
    raise ConfigError(f"Invalid alpha schedule {value!r}")


def _beta_from(value: Any) -> BetaSchedule:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return BetaSchedule.constant(float(value))
    if isinstance(value, dict):
        kind = value.get("kind", "constant")
        if kind == "constant":
            return BetaSchedule.constant(float(value["base"]))
        if kind == "geometric":
            return BetaSchedule.geometric(float(value["ratio"]))
        raise ConfigError(f"Unknown beta schedule kind {kind!r}")
    raise ConfigError(f"Invalid beta schedule {value!r}")


def custom_algorithm(params: dict[str, Any]) -> AlgorithmDescription:
    """Build a description from an explicit parameter object."""
    allowed = {
        "name", "engine", "alpha", "beta", "hat_beta", "bar_beta",
        "alpha_relax",
    }
    if unknown := set(params) - allowed:
        raise ConfigError(f"Unknown algorithm keys: {sorted(unknown)}")
    for required in ("name", "engine", "alpha"):
        if required not in params:
            raise ConfigError(f"Custom algorithm is missing {required!r}")
    if params["engine"] not in ENGINES:
        raise ConfigError(
            f"Unknown engine {params['engine']!r}, "
            f"expected one of {sorted(ENGINES)}"
        )
    try:
        description = AlgorithmDescription(
            key=str(params["name"]),
            name=str(params["name"]),
            engine=params["engine"],
            alpha=_alpha_from(params["alpha"]),
            beta=_beta_from(params.get("beta", 0.0)),
            hat_beta=float(params.get("hat_beta", 0.0)),
            bar_beta=float(params.get("bar_beta", DEFAULT_BAR_BETA)),
            alpha_relax=float(params.get("alpha_relax", ALPHA_RELAX)),
        )
    except (ContractViolation, KeyError, TypeError, ValueError) as err:
        raise ConfigError(f"Invalid custom algorithm: {err}") from err
    if not 0.0 <= description.hat_beta < 1.0:
        raise ConfigError(f"hat_beta must lie in [0, 1), got {description.hat_beta}")
    if not 0.0 <= description.bar_beta < 1.0:
        raise ConfigError(f"bar_beta must lie in [0, 1), got {description.bar_beta}")
    if not 0.0 < description.alpha_relax < 1.0:
        raise ConfigError(
            f"alpha_relax must lie in (0, 1), got {description.alpha_relax}"
        )
    if not description.alpha.value(1) < 1.0:
        raise ConfigError("alpha_1 must be smaller than 1")
    _LOGGER.debug(f"Built custom algorithm {description.key}")
    return description


def resolve_preset(
        name: str,
        params: dict[str, Any] | None = None
) -> AlgorithmDescription:
    """Return the description of a named preset or of a custom algorithm.

    Raises
    ------
    ConfigError
        If the name is unknown or the custom parameters are invalid.

    """
    if name == CUSTOM:
        if params is None:
            raise ConfigError("The custom algorithm requires parameters")
        return custom_algorithm(params)
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(
            f"Unknown preset {name!r}, valid names: {', '.join(PRESETS)}"
        ) from None

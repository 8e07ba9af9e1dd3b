"""Run configuration of the benchmark."""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import orjson

from .const import (
    DEFAULT_BALLS,
    DEFAULT_ITERATIONS,
    DEFAULT_SAMPLINGS,
    LARGE_DIM_ITERATIONS,
)
from .exceptions import ConfigError
from .fixpoint_solver.problems import Consistency
from .presets import CUSTOM, AlgorithmDescription, resolve_preset


_LOGGER = logging.getLogger(__name__)

CONFIG_KEYS = frozenset({
    "case", "dim", "factors", "balls_per_factor", "iterations", "samplings",
    "master_seed", "algorithms", "alpha_relax", "out_dir", "emit_svg",
    "bound_diagnostics", "workers",
})

REQUIRED_KEYS = ("case", "dim", "algorithms")


def default_iterations(dim: int) -> int:
    """Return the default iteration count for a disk dimension."""
    for max_dim, iterations in DEFAULT_ITERATIONS:
        if dim <= max_dim:
            return iterations
    return LARGE_DIM_ITERATIONS


def _integer(data: dict[str, Any], key: str, default: int | None, minimum: int) -> int:
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key!r} must be an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(f"{key!r} must be >= {minimum}, got {value}")
    return value


def _flag(data: dict[str, Any], key: str) -> bool:
    value = data.get(key, False)
    if not isinstance(value, bool):
        raise ConfigError(f"{key!r} must be a boolean, got {value!r}")
    return value


def _algorithm(entry: Any) -> AlgorithmDescription:
    if isinstance(entry, str):
        return resolve_preset(entry)
    if isinstance(entry, dict):
        return resolve_preset(CUSTOM, entry)
    raise ConfigError(f"Invalid algorithm entry {entry!r}")


@dataclass(frozen=True, kw_only=True)
class RunConfig:
    """Validated benchmark configuration."""

    case: Consistency
    dim: int
    factors: int
    balls_per_factor: int
    iterations: int
    samplings: int
    master_seed: int
    algorithms: tuple[AlgorithmDescription, ...]
    out_dir: Path
    emit_svg: bool = False
    bound_diagnostics: bool = False
    workers: int = 1

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> RunConfig:
        """Instantiate the configuration from a decoded JSON document.

        Raises
        ------
        ConfigError
            If keys are unknown or missing, or a value is invalid.

        """
        if not isinstance(data, dict):
            raise ConfigError("The configuration must be a JSON object")
        if unknown := set(data) - CONFIG_KEYS:
            raise ConfigError(f"Unknown configuration keys: {sorted(unknown)}")
        if missing := [key for key in REQUIRED_KEYS if key not in data]:
            raise ConfigError(f"Missing configuration keys: {missing}")

        try:
            case = Consistency(data["case"])
        except ValueError:
            raise ConfigError(
                f"'case' must be one of {[str(c) for c in Consistency]}, "
                f"got {data['case']!r}"
            ) from None

        dim = _integer(data, "dim", None, 1)
        balls = _integer(data, "balls_per_factor", DEFAULT_BALLS[case], 1)
        if case is Consistency.INCONSISTENT and balls != 2:
            raise ConfigError(
                f"The inconsistent case uses two balls per factor, got {balls}"
            )

        entries = data["algorithms"]
        if not isinstance(entries, list) or not entries:
            raise ConfigError("'algorithms' must be a non-empty list")
        algorithms = tuple(_algorithm(entry) for entry in entries)
        if "alpha_relax" in data:
            alpha_relax = data["alpha_relax"]
            if isinstance(alpha_relax, bool) or not isinstance(alpha_relax, (int, float)) \
                    or not 0.0 < alpha_relax < 1.0:
                raise ConfigError(
                    f"'alpha_relax' must lie in (0, 1), got {alpha_relax!r}"
                )
            algorithms = tuple(
                dataclasses.replace(a, alpha_relax=float(alpha_relax))
                for a in algorithms
            )
        keys = [a.key for a in algorithms]
        if len(set(keys)) != len(keys):
            raise ConfigError(f"Duplicate algorithm names: {keys}")

        out_dir = data.get("out_dir", "results")
        if not isinstance(out_dir, str):
            raise ConfigError(f"'out_dir' must be a string, got {out_dir!r}")

        config = cls(
            case=case,
            dim=dim,
            factors=_integer(data, "factors", 5, 1),
            balls_per_factor=balls,
            iterations=_integer(data, "iterations", default_iterations(dim), 0),
            samplings=_integer(data, "samplings", DEFAULT_SAMPLINGS, 1),
            master_seed=_integer(data, "master_seed", 0, 0),
            algorithms=algorithms,
            out_dir=Path(out_dir),
            emit_svg=_flag(data, "emit_svg"),
            bound_diagnostics=_flag(data, "bound_diagnostics"),
            workers=_integer(data, "workers", 1, 1),
        )
        _LOGGER.debug(f"Loaded configuration: {config}")
        return config

    @classmethod
    def from_file(cls, path: str | Path) -> RunConfig:
        """Read and validate a JSON configuration file."""
        path = Path(path)
        try:
            raw = path.read_bytes()
        except OSError as err:
            raise ConfigError(f"Cannot read configuration {path}: {err}") from err
        try:
            data = orjson.loads(raw)
        except orjson.JSONDecodeError as err:
            raise ConfigError(f"Invalid JSON in {path}: {err}") from err
        return cls.from_dict(data)

    def with_overrides(self, **overrides: Any) -> RunConfig:
        """Return a copy with the non-None overrides applied."""
        changes = {k: v for k, v in overrides.items() if v is not None}
        if "out_dir" in changes:
            changes["out_dir"] = Path(changes["out_dir"])
        if changes.get("master_seed", 0) < 0 or changes.get("workers", 1) < 1:
            raise ConfigError(f"Invalid overrides: {changes}")
        return dataclasses.replace(self, **changes)

    @property
    def algorithm_keys(self) -> tuple[str, ...]:
        """Return the algorithm names in configuration order."""
        return tuple(a.key for a in self.algorithms)

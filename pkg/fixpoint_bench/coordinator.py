"""Experiment coordinator running the algorithm grid over seeded samplings."""

from __future__ import annotations

import asyncio
import hashlib
import logging
import time
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass
from statistics import fmean
from typing import Any

import numpy as np

from .config import RunConfig
from .const import (
    CLAMP_STORM_RATIO,
    STREAM_INDICES,
    STREAM_START,
    STREAM_SYSTEM,
)
from .exceptions import ConfigError, IntegrityError
from .fixpoint_solver.engines import create_engine
from .fixpoint_solver.exceptions import ContractViolation, NumericalError
from .fixpoint_solver.fixmaps import FixedPointMap, default_target, residual
from .fixpoint_solver.manifold import PoincareDisk, ProductManifold, ProductPoint
from .fixpoint_solver.models import (
    RunRecord,
    RunRow,
    StepDiagnostics,
    StepReport,
)
from .fixpoint_solver.optimizer import init_state, iterate
from .fixpoint_solver.problems import (
    BallSystem,
    Consistency,
    CouplingObjective,
    build_constraint_map,
    performance_measures,
    sample_consistent_system,
    sample_inconsistent_system,
    sample_initial_point,
)


_LOGGER = logging.getLogger(__name__)


def _seed_sequence(master_seed: int, stream: int, sampling: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([master_seed, stream, sampling])


def sampling_seed(master_seed: int, sampling: int) -> int:
    """Return the recorded seed of a sampling."""
    state = _seed_sequence(master_seed, STREAM_SYSTEM, sampling).generate_state(
        1, dtype=np.uint64
    )
    return int(state[0])


@dataclass(slots=True)
class SamplingProblem:
    """Problem instance shared by all algorithms of one sampling."""

    manifold: ProductManifold
    system: BallSystem
    objective: CouplingObjective
    x0: ProductPoint
    indices: np.ndarray
    seed: int


def build_problem(config: RunConfig, sampling: int) -> SamplingProblem:
    """Sample the ball system, x_0 and the factor index stream."""
    disk = PoincareDisk(config.dim)
    manifold = ProductManifold.power(disk, config.factors)
    seed = config.master_seed
    system_rng = np.random.default_rng(_seed_sequence(seed, STREAM_SYSTEM, sampling))
    start_rng = np.random.default_rng(_seed_sequence(seed, STREAM_START, sampling))
    index_rng = np.random.default_rng(_seed_sequence(seed, STREAM_INDICES, sampling))

    if config.case is Consistency.CONSISTENT:
        system = sample_consistent_system(
            system_rng, config.factors, config.balls_per_factor, disk
        )
    else:
        system = sample_inconsistent_system(system_rng, config.factors, disk)

    return SamplingProblem(
        manifold=manifold,
        system=system,
        objective=CouplingObjective(config.factors, config.dim),
        x0=sample_initial_point(start_rng, manifold),
        indices=index_rng.integers(0, config.factors, size=config.iterations),
        seed=sampling_seed(seed, sampling),
    )


def _row(
        n: int,
        x: ProductPoint,
        operators: list[FixedPointMap],
        objective: CouplingObjective,
        clamps: int
) -> RunRow:
    return RunRow.from_residuals(
        n,
        tuple(residual(t, p) for t, p in zip(operators, x)),
        objective.value(x),
        clamps,
    )


def _initial_reach(
        disk: PoincareDisk,
        system: BallSystem,
        x: ProductPoint
) -> list[float]:
    """Return per factor the largest origin distance of x_0 and the balls."""
    origin = disk.origin()
    return [
        max(
            disk.dist(origin, p),
            *(disk.dist(origin, ball.center) + ball.radius for ball in group),
        )
        for p, group in zip(x, system.balls)
    ]


def _extend_reach(
        disk: PoincareDisk,
        reach: list[float],
        report: StepReport,
        x: ProductPoint
) -> list[float]:
    """Grow the reach by y_k and x_{k+1}."""
    origin = disk.origin()
    return [
        max(r, disk.dist(origin, y), disk.dist(origin, p))
        for r, y, p in zip(reach, report.y, x)
    ]


def _digest(x: ProductPoint) -> str:
    sha = hashlib.sha256()
    for part in x:
        sha.update(part.coords.tobytes())
    return sha.hexdigest()


def run_single(config: RunConfig, algorithm_index: int, sampling: int) -> RunRecord:
    """Run one algorithm on one sampling and record every iterate.

    Top-level so that it can be shipped to worker processes.
    """
    started = time.perf_counter()
    description = config.algorithms[algorithm_index]
    problem = build_problem(config, sampling)
    manifold = problem.manifold
    objective = problem.objective
    disk = manifold.factors[0]
    target = default_target(disk)

    maps = [
        build_constraint_map(problem.system, disk, i, description.alpha_relax, target)
        for i in range(config.factors)
    ]
    operators = [q.mapping for q in maps]
    engines = [
        create_engine(description.engine, bar_beta=description.bar_beta)
        for _ in range(config.factors)
    ]
    state = init_state(manifold, problem.x0, maps, engines, description.hat_beta)

    record = RunRecord(
        algorithm=description.key,
        algorithm_index=algorithm_index,
        sampling=sampling,
        seed=problem.seed,
        diagnostics=[] if config.bound_diagnostics else None,
    )
    if config.bound_diagnostics:
        record.reach = _initial_reach(disk, problem.system, state.x)
    record.rows.append(_row(0, state.x, operators, objective, state.x.clamped))

    indices = problem.indices

    def gradient_fn(x: ProductPoint, n: int):
        return objective.stochastic_gradient(manifold, x, int(indices[n]))

    for report in iterate(
            state, gradient_fn, description.alpha, description.beta,
            config.iterations,
    ):
        record.rows.append(
            _row(state.n, state.x, operators, objective, report.clamps)
        )
        if report.clamps:
            record.clamped_steps += 1
        if record.diagnostics is not None:
            record.diagnostics.append(StepDiagnostics.from_report(state.n, report))
            record.reach = _extend_reach(disk, record.reach, report, state.x)

    record.average_value = objective.value(state.avg)
    record.final_digest = _digest(state.x)
    record.elapsed = time.perf_counter() - started
    _LOGGER.debug(
        f"{description.key} sampling {sampling}: D_N = "
        f"{record.rows[-1].d_contrib!r} after {config.iterations} steps"
    )
    return record


@dataclass(slots=True)
class ExperimentResult:
    """Sorted records with aggregated series and a summary."""

    config: RunConfig
    records: list[RunRecord]
    series: dict[str, list[tuple[int, float, float]]]
    summary: dict[str, Any]

    def records_for(self, key: str) -> list[RunRecord]:
        """Return the records of one algorithm."""
        return [record for record in self.records if record.algorithm == key]


def aggregate_series(
        config: RunConfig,
        records: list[RunRecord]
) -> dict[str, list[tuple[int, float, float]]]:
    """Return (n, D_n, F_n) per algorithm."""
    series = {}
    for key in config.algorithm_keys:
        runs = [record for record in records if record.algorithm == key]
        series[key] = [
            (n, *performance_measures(runs, n))
            for n in range(config.iterations + 1)
        ]
    return series


def build_summary(
        config: RunConfig,
        records: list[RunRecord],
        series: dict[str, list[tuple[int, float, float]]]
) -> dict[str, Any]:
    """Return the JSON summary of an experiment."""
    limit = CLAMP_STORM_RATIO * config.iterations
    warnings = []
    algorithms = {}
    for description in config.algorithms:
        key = description.key
        runs = [record for record in records if record.algorithm == key]
        storms = [run.sampling for run in runs if run.clamped_steps > limit]
        if storms:
            message = (
                f"{key}: more than {CLAMP_STORM_RATIO:.0%} of the steps "
                f"clamped in samplings {storms}"
            )
            _LOGGER.warning(message)
            warnings.append(message)
        _, d_0, f_0 = series[key][0]
        n_final, d_n, f_n = series[key][-1]
        algorithms[key] = {
            "description": description.to_dict(),
            "initial": {"D_n": d_0, "F_n": f_0},
            "final": {"n": n_final, "D_n": d_n, "F_n": f_n},
            "average_iterate_objective": fmean(run.average_value for run in runs),
            "mean_elapsed": fmean(run.elapsed for run in runs),
            "clamps": sum(run.clamp_count for run in runs),
            "clamped_steps": sum(run.clamped_steps for run in runs),
            "final_digests": [run.final_digest for run in runs],
        }
    return {
        "config": {
            "case": str(config.case),
            "dim": config.dim,
            "factors": config.factors,
            "balls_per_factor": config.balls_per_factor,
            "iterations": config.iterations,
            "samplings": config.samplings,
            "master_seed": config.master_seed,
        },
        "algorithms": algorithms,
        "warnings": warnings,
    }


class ExperimentCoordinator:
    """Schedule one task per (algorithm, sampling) on a bounded executor."""

    def __init__(self, config: RunConfig) -> None:
        """Initialize the coordinator."""
        self.config = config

    def tasks(self) -> list[tuple[int, int]]:
        """Return the (algorithm index, sampling) pairs."""
        return [
            (a, s)
            for a in range(len(self.config.algorithms))
            for s in range(self.config.samplings)
        ]

    def _executor(self) -> Executor:
        if self.config.workers > 1:
            return ProcessPoolExecutor(max_workers=self.config.workers)
        return ThreadPoolExecutor(max_workers=1)

    async def async_run(self) -> ExperimentResult:
        """Run every task and aggregate the results.

        Raises
        ------
        IntegrityError
            If a run produced a non-finite value or a non-positive rate.
        ConfigError
            If a run violated a library precondition.

        """
        loop = asyncio.get_running_loop()
        tasks = self.tasks()
        _LOGGER.debug(f"Scheduling {len(tasks)} runs on {self.config.workers} workers")
        with self._executor() as executor:
            futures = [
                loop.run_in_executor(executor, run_single, self.config, a, s)
                for a, s in tasks
            ]
            try:
                records = await asyncio.gather(*futures)
            except NumericalError as err:
                raise IntegrityError(f"Numerical failure: {err}") from err
            except ContractViolation as err:
                raise ConfigError(f"Invalid run parameters: {err}") from err

        records = sorted(records, key=lambda record: record.sort_key)
        series = aggregate_series(self.config, records)
        summary = build_summary(self.config, records, series)
        return ExperimentResult(self.config, records, series, summary)


def run_experiment(config: RunConfig) -> ExperimentResult:
    """Run the experiment synchronously."""
    return asyncio.run(ExperimentCoordinator(config).async_run())

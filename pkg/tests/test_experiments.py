"""Testing module reproducing the qualitative behavior of the ball experiments."""

import logging
import math
from statistics import fmean

import pytest

from fixpoint_bench.config import RunConfig
from fixpoint_bench.coordinator import build_problem, run_experiment
from fixpoint_bench.diagnostics import bound_report
from fixpoint_bench.fixpoint_solver.const import TARGET_RADIUS

_LOGGER = logging.getLogger(__name__)

ADAPTIVE = ("CAM1", "CAM2", "CAD1", "CAD2", "DAM1", "DAM2", "DAD1", "DAD2")

TAIL = 50


def tail_mean(points, column):
    """Return the mean of a measure over the last iterations."""
    return fmean(point[column] for point in points[-TAIL:])


def prefix_mean_sq(runs, n):
    """Return the sampling mean of (1/n) sum_{k<=n} sum_i d(T(y_k), y_k)^2."""
    return fmean(
        math.fsum(
            r * r for step in run.diagnostics[:n] for r in step.y_residuals
        ) / n
        for run in runs
    )


@pytest.fixture(scope="module")
def consistent_result():
    """Run the adaptive algorithms and AdaGrad on the consistent problem."""
    config = RunConfig.from_dict({
        "case": "consistent",
        "dim": 2,
        "factors": 5,
        "balls_per_factor": 5,
        "iterations": 500,
        "samplings": 10,
        "master_seed": 2024,
        "algorithms": list(ADAPTIVE) + ["CAG", "DAG"],
    })
    return run_experiment(config)


def test_adaptive_algorithms_approach_the_fixed_point_set(consistent_result):
    """Test that Adam and AMSGrad variants shrink D_n substantially."""
    for key in ADAPTIVE:
        points = consistent_result.series[key]
        _, d_0, _ = points[0]
        _, d_n, f_n = points[-1]
        _LOGGER.debug(f"{key}: D_0 = {d_0}, D_N = {d_n}, F_N = {f_n}")
        assert d_n < 0.1 * d_0, key
        assert math.isfinite(f_n)


def test_adagrad_stays_close_but_optimizes_less(consistent_result):
    """Test that AdaGrad keeps a smaller residual than Adam at a higher objective."""
    series = consistent_result.series
    adam_d = tail_mean(series["CAD1"], 1)
    adam_f = tail_mean(series["CAD1"], 2)

    for key in ("CAG", "DAG"):
        assert tail_mean(series[key], 1) <= adam_d, key
        assert tail_mean(series[key], 2) > adam_f, key


def test_common_start_across_algorithms(consistent_result):
    """Test that every algorithm starts from the same D_0 and F_0."""
    starts = {tuple(points[0]) for points in consistent_result.series.values()}
    assert len(starts) == 1
    assert consistent_result.summary["warnings"] == []


def test_inconsistent_case():
    """Test the separation certificates and the residual decay of P_1 P_2."""
    # Config --->
    config = RunConfig.from_dict({
        "case": "inconsistent",
        "dim": 2,
        "factors": 5,
        "iterations": 500,
        "samplings": 4,
        "master_seed": 99,
        "algorithms": ["CAD1", "DAD1", "CAM1"],
    })

    for sampling in range(config.samplings):
        problem = build_problem(config, sampling)
        disk = problem.manifold.factors[0]
        for b1, b2 in problem.system.balls:
            assert b1.radius + b2.radius + 0.1 <= disk.dist(b1.center, b2.center) + 1e-12

    result = run_experiment(config)
    for key in config.algorithm_keys:
        points = result.series[key]
        assert points[-1][1] < 0.1 * points[0][1], key
        assert all(math.isfinite(f_n) for _, _, f_n in points)


def test_diminishing_adam_average_residual_decays():
    """Test that the averaged squared residual keeps falling for DAD2."""
    # Config --->
    config = RunConfig.from_dict({
        "case": "consistent",
        "dim": 2,
        "factors": 3,
        "balls_per_factor": 4,
        "iterations": 1000,
        "samplings": 3,
        "master_seed": 5,
        "algorithms": ["DAD2"],
        "bound_diagnostics": True,
    })
    runs = run_experiment(config).records

    assert prefix_mean_sq(runs, 1000) < prefix_mean_sq(runs, 100) / 2.0


def test_bounds_hold_in_three_dimensions(caplog):
    """Test the empirical averages against the estimated bounds."""
    # Config --->
    config = RunConfig.from_dict({
        "case": "consistent",
        "dim": 3,
        "factors": 4,
        "balls_per_factor": 3,
        "iterations": 300,
        "samplings": 3,
        "master_seed": 17,
        "algorithms": ["CSD", "CAM1", "DAD1"],
        "bound_diagnostics": True,
    })
    records = run_experiment(config).records
    with caplog.at_level(logging.INFO, logger="fixpoint_bench.diagnostics"):
        report = bound_report(records, config)

    assert report["violations"] == []
    for checks in report["algorithms"].values():
        assert all(entry["bound"] > 0.0 for entry in checks)

    ratios = [r for r in caplog.records if "of the bound" in r.getMessage()]
    assert len(ratios) == 3 * 9
    for key in config.algorithm_keys:
        tight = report["tight"][key]
        assert max(tight["diameters"]) < 2.0 * TARGET_RADIUS
        for entry in tight["checks"]:
            _LOGGER.debug(f"{key} {entry['kind']} n={entry['n']}: {entry['ratio']}")
            assert math.isfinite(entry["ratio"])
            assert entry["ratio"] >= 0.0

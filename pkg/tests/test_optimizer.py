"""Testing module for the fixed point optimizer."""

import logging
import math

import numpy as np
import pytest

from fixpoint_bench.fixpoint_solver import init_state, iterate, step
from fixpoint_bench.fixpoint_solver.const import TARGET_RADIUS
from fixpoint_bench.fixpoint_solver.engines import create_engine
from fixpoint_bench.fixpoint_solver.exceptions import (
    BasePointMismatch,
    ContractViolation,
    LengthMismatch,
)
from fixpoint_bench.fixpoint_solver.fixmaps import Identity, projected_relax
from fixpoint_bench.fixpoint_solver.manifold import (
    PoincareDisk,
    ProductManifold,
    ProductPoint,
    ProductTangent,
    Tangent,
)
from fixpoint_bench.fixpoint_solver.optimizer import average_update
from fixpoint_bench.fixpoint_solver.problems import (
    CouplingObjective,
    build_constraint_map,
    sample_consistent_system,
    sample_initial_point,
)
from fixpoint_bench.fixpoint_solver.schedules import BetaSchedule, Schedule

_LOGGER = logging.getLogger(__name__)


def single_factor_state(engine="sgd", hat_beta=0.0, coords=(0.0, 0.0)):
    """Return a one-factor state whose map leaves feasible points alone."""
    disk = PoincareDisk(2)
    manifold = ProductManifold.power(disk, 1)
    x0 = manifold.point([coords])
    maps = [projected_relax(Identity(disk), 0.5)]
    return init_state(manifold, x0, maps, [create_engine(engine)], hat_beta)


def ball_problem(seed, engine, hat_beta, factors=3, dim=2):
    """Return a state on a sampled consistent ball system and its objective."""
    rng = np.random.default_rng(seed)
    disk = PoincareDisk(dim)
    manifold = ProductManifold.power(disk, factors)
    system = sample_consistent_system(rng, factors, 4, disk)
    maps = [build_constraint_map(system, disk, i, 0.5) for i in range(factors)]
    engines = [create_engine(engine) for _ in range(factors)]
    x0 = sample_initial_point(rng, manifold)
    state = init_state(manifold, x0, maps, engines, hat_beta)
    return state, CouplingObjective(factors, dim), rng


def test_single_step_at_the_origin():
    """Test y = exp(0, -0.01 G) for a plain SGD step."""
    # Config --->
    state = single_factor_state()
    x = state.x
    gradient = ProductTangent((Tangent(x[0], [1.0, 0.0]),))

    report = step(state, gradient, 0.01, 0.0)

    assert report.y[0].coords[0] == pytest.approx(-0.009999666686665238, abs=1e-15)
    assert report.y[0].coords[1] == 0.0
    assert np.array_equal(state.x[0].coords, report.y[0].coords)
    assert state.n == 1
    assert report.rates == (1.0,)
    assert report.step_distances[0] == pytest.approx(0.01, abs=1e-12)
    assert report.y_residuals == (0.0,)


def test_zero_gradient_is_stationary():
    """Test that a feasible fixed point with no gradient does not move."""
    state = single_factor_state(engine="adam", hat_beta=0.9, coords=(0.3, -0.2))
    x = state.x
    for n in range(5):
        report = step(state, state.manifold.zero_tangent(state.x), 0.01, 0.9)
        assert np.array_equal(state.x[0].coords, x[0].coords)
        assert report.step_distances == (0.0,)
    assert state.n == 5
    assert np.array_equal(state.avg[0].coords, x[0].coords)


def test_step_validation():
    """Test the preconditions of a step."""
    state = single_factor_state()
    gradient = state.manifold.zero_tangent(state.x)

    with pytest.raises(ContractViolation):
        step(state, gradient, 1.0, 0.0)
    with pytest.raises(ContractViolation):
        step(state, gradient, 0.01, 1.0)

    other = state.manifold.point([[0.1, 0.0]])
    with pytest.raises(BasePointMismatch):
        step(state, state.manifold.zero_tangent(other), 0.01, 0.0)

    two = ProductManifold.power(PoincareDisk(2), 2).zero_tangent(
        ProductManifold.power(PoincareDisk(2), 2).point([[0.0, 0.0]] * 2)
    )
    with pytest.raises(LengthMismatch):
        step(state, two, 0.01, 0.0)

    with pytest.raises(LengthMismatch):
        init_state(state.manifold, state.x, [], [create_engine("sgd")], 0.0)
    with pytest.raises(ContractViolation):
        init_state(state.manifold, state.x, state.maps, state.engines, 1.0)


def test_run_invariants():
    """Test the step-distance identity, monotone rates, feasibility and momentum."""
    # Config --->
    hat_beta = 0.9
    alpha = Schedule.power(0.1, 0.5)
    beta = BetaSchedule.geometric(0.9)
    state, objective, rng = ball_problem(21, "adam", hat_beta)
    manifold = state.manifold
    xi = rng.integers(0, 3, size=200)

    def gradient_fn(x, n):
        return objective.stochastic_gradient(manifold, x, int(xi[n]))

    previous_rates = None
    largest_grad = [0.0] * 3
    for report in iterate(state, gradient_fn, alpha, beta, 200):
        n = state.n - 1
        bias = 1.0 - hat_beta ** (n + 1)
        for i in range(3):
            largest_grad[i] = max(largest_grad[i], report.grad_norms[i])
            expected = alpha.value(n + 1) * report.momentum_norms[i] / (bias * report.rates[i])
            assert report.step_distances[i] == pytest.approx(expected, abs=1e-9)
            assert report.momentum_norms[i] <= largest_grad[i] + 1e-9
            origin = manifold.factors[i].origin()
            assert manifold.factors[i].dist(origin, state.x[i]) <= TARGET_RADIUS + 1e-9
        if previous_rates is not None:
            assert all(b >= a for a, b in zip(previous_rates, report.rates))
        previous_rates = report.rates

    assert state.n == 200


def test_sgd_matches_plain_projected_sgd():
    """Test the zero-momentum SGD case against a direct projected SGD loop."""
    # Config --->
    alpha = 0.05
    state, objective, rng = ball_problem(22, "sgd", 0.0)
    manifold = state.manifold
    xi = rng.integers(0, 3, size=100)
    reference = state.x

    def gradient_fn(x, n):
        return objective.stochastic_gradient(manifold, x, int(xi[n]))

    for n, _ in enumerate(iterate(
            state, gradient_fn, Schedule.constant(alpha), BetaSchedule.constant(0.0), 100
    )):
        gradient = gradient_fn(reference, n)
        reference = ProductPoint(tuple(
            q(disk.exp(p, g.scaled(-alpha)))
            for disk, q, p, g in zip(manifold.factors, state.maps, reference, gradient)
        ))
        assert manifold.dist(state.x, reference) <= 1e-12


def test_average_update():
    """Test the running geodesic mean."""
    # Config --->
    disk = PoincareDisk(2)
    manifold = ProductManifold.power(disk, 2)
    a = manifold.point([[0.1, 0.2], [-0.3, 0.0]])
    b = manifold.point([[0.4, -0.1], [0.2, 0.5]])

    assert average_update(manifold, a, b, 1) is b
    assert average_update(manifold, a, a, 7).same_point(a)

    mid = average_update(manifold, a, b, 2)
    for i in range(2):
        assert disk.dist(a[i], mid[i]) == pytest.approx(0.5 * disk.dist(a[i], b[i]), abs=1e-12)
        assert disk.dist(mid[i], b[i]) == pytest.approx(0.5 * disk.dist(a[i], b[i]), abs=1e-12)

    with pytest.raises(ContractViolation):
        average_update(manifold, a, b, 0)


def test_iterate_yields_one_report_per_step():
    """Test the iteration count and the averaged iterate."""
    state, objective, rng = ball_problem(23, "amsgrad", 0.0, factors=2)
    manifold = state.manifold

    def gradient_fn(x, n):
        return objective.stochastic_gradient(manifold, x, n % 2)

    reports = list(iterate(
        state, gradient_fn, Schedule.constant(0.01), BetaSchedule.constant(0.9), 25
    ))
    assert len(reports) == 25
    assert state.n == 25
    assert all(report.state is state for report in reports)
    assert math.isfinite(objective.value(state.avg))
    assert list(iterate(state, gradient_fn, Schedule.constant(0.01), BetaSchedule.constant(0.9), 0)) == []

"""Testing module for the ball problems and the coupling objective."""

import logging
import math

import numpy as np
import pytest

from fixpoint_bench.fixpoint_solver.exceptions import (
    ContractViolation,
    LengthMismatch,
)
from fixpoint_bench.fixpoint_solver.fixmaps import residual
from fixpoint_bench.fixpoint_solver.manifold import (
    PoincareDisk,
    ProductManifold,
    ProductTangent,
    Tangent,
)
from fixpoint_bench.fixpoint_solver.models import RunRecord, RunRow
from fixpoint_bench.fixpoint_solver.problems import (
    Consistency,
    CouplingObjective,
    constraint_operator,
    performance_measures,
    sample_consistent_system,
    sample_inconsistent_system,
    sample_initial_point,
)

from .test_manifold import random_point, random_tangent

_LOGGER = logging.getLogger(__name__)


def make_record(sampling, rows):
    """Return a run record holding the given rows."""
    return RunRecord(
        algorithm="CSD", algorithm_index=0, sampling=sampling, seed=sampling, rows=rows
    )


def test_consistent_system():
    """Test that the witness lies in every ball and is fixed by every T^i."""
    # Config --->
    rng = np.random.default_rng(30)
    disk = PoincareDisk(2)
    system = sample_consistent_system(rng, 5, 5, disk)

    assert system.consistency is Consistency.CONSISTENT
    assert system.factors == 5
    for i, group in enumerate(system.balls):
        assert len(group) == 5
        p = system.witness[i]
        assert p.sq_norm <= 0.25
        for ball in group:
            assert disk.dist(ball.center, p) <= ball.radius
            assert disk.dist(ball.center, p) <= 0.4 + 1e-12
        assert residual(constraint_operator(system, disk, i), p) == 0.0

    single = sample_consistent_system(rng, 2, 1, PoincareDisk(3))
    assert all(len(group) == 1 for group in single.balls)
    assert residual(constraint_operator(single, PoincareDisk(3), 1), single.witness[1]) == 0.0

    with pytest.raises(ContractViolation):
        constraint_operator(system, disk, 5)


def test_sampling_is_deterministic():
    """Test that equal seeds give equal systems and starting points."""
    disk = PoincareDisk(2)
    manifold = ProductManifold.power(disk, 3)

    first = np.random.default_rng(31)
    second = np.random.default_rng(31)
    a = sample_consistent_system(first, 3, 4, disk)
    b = sample_consistent_system(second, 3, 4, disk)
    assert a.digest() == b.digest()
    assert sample_initial_point(first, manifold).same_point(
        sample_initial_point(second, manifold)
    )

    c = sample_consistent_system(np.random.default_rng(32), 3, 4, disk)
    assert c.digest() != a.digest()


def test_inconsistent_system():
    """Test the separation certificate and the convergence of P_1 P_2."""
    # Config --->
    rng = np.random.default_rng(33)
    disk = PoincareDisk(2)
    system = sample_inconsistent_system(rng, 5, disk)

    assert system.consistency is Consistency.INCONSISTENT
    assert system.witness is None
    for i, (b1, b2) in enumerate(system.balls):
        separation = disk.dist(b1.center, b2.center)
        assert b1.radius >= 0.1 and b2.radius >= 0.1
        assert b1.radius + b2.radius + 0.1 <= separation + 1e-12

        mapping = constraint_operator(system, disk, i)
        x = random_point(rng, disk, 0.8)
        for _ in range(1000):
            x = mapping(x)
        assert residual(mapping, x) < 1e-6
        # the fixed point sits on the first ball, facing the second
        assert disk.dist(b1.center, x) == pytest.approx(b1.radius, abs=1e-9)
        assert disk.dist(x, b2.center) > b2.radius


def test_objective_values():
    """Test f at the origin, at equal parts and the cyclic coupling."""
    disk = PoincareDisk(2)

    objective = CouplingObjective(5, 2)
    zero = ProductManifold.power(disk, 5).point([[0.0, 0.0]] * 5)
    assert objective.value(zero) == 1.0

    pair = CouplingObjective(2, 2)
    x = ProductManifold.power(disk, 2).point([[0.5, 0.0], [0.5, 0.0]])
    assert pair.value(x) == pytest.approx(1.5340254166877414, rel=1e-15)

    triple = CouplingObjective(3, 2)
    x = ProductManifold.power(disk, 3).point([[0.5, 0.0], [0.0, 0.0], [0.4, 0.0]])
    assert triple.partner(2) == 0
    assert triple.summand(x, 2) == pytest.approx(math.exp(0.2) + 0.2)
    assert triple.summand(x, 0) == 1.0
    assert triple.value(x) == pytest.approx((2.0 + math.exp(0.2) + 0.2) / 3.0)

    with pytest.raises(LengthMismatch):
        triple.value(zero)
    with pytest.raises(ContractViolation):
        triple.euclidean_gradient(x, 3)
    with pytest.raises(ContractViolation):
        triple.summand(x, -1)


def test_gradient_example():
    """Test grad F(., 0) at x^0 = 0, x^1 = (0.5, 0)."""
    disk = PoincareDisk(2)
    manifold = ProductManifold.power(disk, 2)
    objective = CouplingObjective(2, 2)
    x = manifold.point([[0.0, 0.0], [0.5, 0.0]])

    gradient = objective.stochastic_gradient(manifold, x, 0)
    assert gradient[0].vec.tolist() == [1.0, 0.0]
    assert gradient[1].vec.tolist() == [0.0, 0.0]
    assert gradient[1].base is x[1]


def test_gradient_matches_finite_differences():
    """Test <grad F(x, xi), v> against central differences along exp_x(t v)."""
    # Config --->
    rng = np.random.default_rng(34)
    disk = PoincareDisk(2)
    count = 3
    manifold = ProductManifold.power(disk, count)
    objective = CouplingObjective(count, 2)
    t = 1e-5

    for _ in range(200):
        x = manifold.point([random_point(rng, disk, 0.5).coords for _ in range(count)])
        v = ProductTangent(tuple(random_tangent(rng, disk, p, 0.5) for p in x))
        xi = int(rng.integers(count))
        forward = manifold.exp(x, ProductTangent(tuple(u.scaled(t) for u in v)))
        backward = manifold.exp(x, ProductTangent(tuple(u.scaled(-t) for u in v)))
        numeric = (objective.summand(forward, xi) - objective.summand(backward, xi)) / (2 * t)
        exact = manifold.inner(objective.stochastic_gradient(manifold, x, xi), v)
        assert numeric == pytest.approx(exact, abs=1e-6)


def test_stochastic_gradient_is_unbiased():
    """Test that the mean over xi of grad F(x, xi) is grad f(x)."""
    rng = np.random.default_rng(35)
    disk = PoincareDisk(3)
    count = 4
    manifold = ProductManifold.power(disk, count)
    objective = CouplingObjective(count, 3)

    for _ in range(50):
        x = manifold.point([random_point(rng, disk, 0.7).coords for _ in range(count)])
        full = objective.riemannian_gradient(manifold, x)
        parts = [objective.stochastic_gradient(manifold, x, xi) for xi in range(count)]
        for i in range(count):
            mean = sum(part[i].vec for part in parts) / count
            assert np.max(np.abs(mean - full[i].vec)) <= 1e-10


def test_performance_measures():
    """Test D_n and F_n averaged over samplings."""
    # Config --->
    zero_rows = [RunRow.from_residuals(0, (0.0,) * 5, 1.0)]
    assert performance_measures([make_record(0, zero_rows)], 0) == (0.0, 5.0)

    runs = [
        make_record(s, [
            RunRow.from_residuals(0, (3.0, 4.0), 2.0),
            RunRow.from_residuals(1, (0.1 * s, 0.0), 1.0 + s),
        ])
        for s in range(4)
    ]
    d_0, f_0 = performance_measures(runs, 0)
    assert d_0 == 5.0
    assert f_0 == 4.0

    d_1, f_1 = performance_measures(runs, 1)
    assert d_1 == pytest.approx(0.15)
    assert f_1 == pytest.approx(2.0 * 2.5)
    assert performance_measures(runs[::-1], 1) == (d_1, f_1)

    ragged = runs + [make_record(9, zero_rows)]
    with pytest.raises(LengthMismatch):
        performance_measures(ragged, 0)
    with pytest.raises(LengthMismatch):
        performance_measures(runs, 2)
    with pytest.raises(ContractViolation):
        performance_measures([], 0)


def test_tangent_helpers_stay_anchored():
    """Test that stochastic gradients are anchored at the given point."""
    disk = PoincareDisk(2)
    manifold = ProductManifold.power(disk, 2)
    objective = CouplingObjective(2, 2)
    x = manifold.point([[0.1, 0.2], [-0.3, 0.4]])

    gradient = objective.stochastic_gradient(manifold, x, 1)
    assert gradient.base.same_point(x)
    assert isinstance(gradient[0], Tangent)

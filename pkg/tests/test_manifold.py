"""Testing module for the disk geometry."""

import logging
import math

import numpy as np
import pytest
from scipy.integrate import quad, solve_ivp

from fixpoint_bench.fixpoint_solver.exceptions import (
    BasePointMismatch,
    DomainError,
    LengthMismatch,
)
from fixpoint_bench.fixpoint_solver.manifold import (
    PoincareDisk,
    ProductManifold,
    Tangent,
    comparison_constant,
)

_LOGGER = logging.getLogger(__name__)


def random_point(rng, disk, max_norm):
    """Return a point uniform in the Euclidean ball of radius max_norm."""
    direction = rng.standard_normal(disk.dim)
    direction /= np.linalg.norm(direction)
    return disk.point(max_norm * rng.random() ** (1 / disk.dim) * direction)


def random_tangent(rng, disk, x, max_length):
    """Return a tangent at x of Riemannian norm at most max_length."""
    direction = rng.standard_normal(disk.dim)
    direction /= np.linalg.norm(direction)
    length = max_length * rng.random()
    return Tangent(x, direction * length / disk.conformal_factor(x))


def conformal_ode(t, state, dim):
    """Geodesic and parallel transport equations of the disk."""
    x, dx, vec = state[:dim], state[dim:2 * dim], state[2 * dim:]
    grad_phi = 2.0 * x / (1.0 - x @ x)
    ddx = -2.0 * (grad_phi @ dx) * dx + (dx @ dx) * grad_phi
    dvec = -(grad_phi @ dx) * vec - (grad_phi @ vec) * dx + (dx @ vec) * grad_phi
    return np.concatenate([dx, ddx, dvec])


def test_inner_and_norm_examples():
    """Test the inner product and the norm at the origin and at |x|^2 = 0.5."""
    # Config --->
    disk = PoincareDisk(2)
    origin = disk.origin()
    x = disk.point([math.sqrt(0.5), 0.0])

    e1 = Tangent(origin, [1.0, 0.0])
    assert disk.inner(e1, e1) == 1.0
    assert disk.inner(Tangent(x, [1.0, 0.0]), Tangent(x, [1.0, 0.0])) == pytest.approx(4.0)
    assert disk.inner(disk.zero_tangent(x), Tangent(x, [0.3, -0.2])) == 0.0

    assert disk.norm(Tangent(origin, [3.0, 4.0])) == 5.0
    assert disk.norm(Tangent(x, [3.0, 4.0])) == pytest.approx(10.0)
    assert disk.norm(disk.zero_tangent(x)) == 0.0


def test_inner_rejects_mismatched_base_points():
    """Test that tangents at different points cannot be paired."""
    disk = PoincareDisk(2)
    u = Tangent(disk.origin(), [1.0, 0.0])
    v = Tangent(disk.point([0.1, 0.0]), [1.0, 0.0])
    with pytest.raises(BasePointMismatch):
        disk.inner(u, v)

    wide = PoincareDisk(3)
    w = Tangent(wide.origin(), [1.0, 0.0, 0.0])
    with pytest.raises(LengthMismatch):
        disk.inner(w, w)
    with pytest.raises(LengthMismatch):
        disk.inner(u, w)
    with pytest.raises(LengthMismatch):
        disk.norm(w)


def test_point_validation():
    """Test that points outside the open disk are rejected."""
    disk = PoincareDisk(2)
    with pytest.raises(DomainError):
        disk.point([1.0, 0.0])
    with pytest.raises(LengthMismatch):
        disk.point([0.1, 0.2, 0.3])
    with pytest.raises(DomainError):
        PoincareDisk(0)


def test_dist_examples():
    """Test distances from the origin along a radial geodesic."""
    disk = PoincareDisk(2)
    origin = disk.origin()
    x = disk.point([0.3, -0.4])

    assert disk.dist(x, x) == 0.0
    assert disk.dist(origin, disk.point([0.6, 0.0])) == pytest.approx(math.log(2.0), abs=1e-12)
    assert disk.dist(origin, disk.point([0.9, 0.0])) == pytest.approx(1.4722194895832204, abs=1e-12)


def test_dist_matches_radial_quadrature():
    """Test dist against the length of the radial segment."""
    disk = PoincareDisk(3)
    direction = np.array([1.0, 2.0, -2.0]) / 3.0
    for r in (0.05, 0.3, 0.6, 0.9, 0.99):
        length, _ = quad(lambda t: 1.0 / (1.0 - t * t), 0.0, r, epsabs=1e-13, epsrel=1e-13)
        assert abs(disk.dist(disk.origin(), disk.point(r * direction)) - length) <= 1e-6


def test_exp_and_log_examples():
    """Test exp and log at the origin."""
    disk = PoincareDisk(2)
    origin = disk.origin()
    x = disk.point([0.2, 0.1])

    assert disk.exp(x, disk.zero_tangent(x)) is x
    y = disk.exp(origin, Tangent(origin, [0.5, 0.0]))
    assert y.coords[0] == pytest.approx(0.46211715726000974, abs=1e-15)
    assert y.coords[1] == 0.0

    v = disk.log(origin, disk.point([math.tanh(0.5), 0.0]))
    assert v.vec == pytest.approx([0.5, 0.0], abs=1e-12)
    assert np.all(disk.log(x, x).vec == 0.0)


def test_exp_matches_geodesic_ode():
    """Test exp and transport against an integration of the geodesic equations."""
    # Config --->
    rng = np.random.default_rng(3)
    disk = PoincareDisk(2)

    for _ in range(10):
        x = random_point(rng, disk, 0.6)
        v = random_tangent(rng, disk, x, 1.5)
        u = random_tangent(rng, disk, x, 1.0)
        state = np.concatenate([x.coords, v.vec, u.vec])
        solution = solve_ivp(
            conformal_ode, (0.0, 1.0), state, args=(2,),
            method="DOP853", rtol=1e-11, atol=1e-13,
        )
        end = solution.y[:, -1]
        y = disk.exp(x, v)
        assert np.allclose(y.coords, end[:2], atol=1e-7)
        assert np.allclose(disk.transport(x, y, u).vec, end[4:], atol=1e-7)


def test_exp_log_round_trip():
    """Test log(x, exp(x, v)) = v on random inputs."""
    rng = np.random.default_rng(0)
    for dim in (2, 3):
        disk = PoincareDisk(dim)
        for _ in range(500):
            x = random_point(rng, disk, 0.7)
            v = random_tangent(rng, disk, x, 5.0)
            back = disk.log(x, disk.exp(x, v))
            assert np.max(np.abs(back.vec - v.vec)) <= 1e-9


def test_dist_of_exp_is_norm():
    """Test d(x, exp(x, v)) = |v|_x."""
    rng = np.random.default_rng(1)
    disk = PoincareDisk(2)
    for _ in range(200):
        x = random_point(rng, disk, 0.8)
        v = random_tangent(rng, disk, x, 3.0)
        assert disk.dist(x, disk.exp(x, v)) == pytest.approx(disk.norm(v), abs=1e-9)


def test_triangle_inequality():
    """Test the triangle inequality on random triples."""
    rng = np.random.default_rng(2)
    disk = PoincareDisk(2)
    for _ in range(1000):
        x, y, z = (random_point(rng, disk, 0.9) for _ in range(3))
        assert disk.dist(x, z) <= disk.dist(x, y) + disk.dist(y, z) + 1e-12


def test_transport_is_an_isometry():
    """Test that transport preserves inner products and inverts itself."""
    rng = np.random.default_rng(4)
    disk = PoincareDisk(3)
    x = disk.point([0.1, 0.2, 0.3])

    assert disk.transport(x, x, Tangent(x, [1.0, 0.0, 0.0])).vec.tolist() == [1.0, 0.0, 0.0]

    for _ in range(500):
        x = random_point(rng, disk, 0.8)
        y = random_point(rng, disk, 0.8)
        u = random_tangent(rng, disk, x, 2.0)
        w = random_tangent(rng, disk, x, 2.0)
        tu = disk.transport(x, y, u)
        tw = disk.transport(x, y, w)
        assert tu.base is y
        assert disk.inner(tu, tw) == pytest.approx(disk.inner(u, w), abs=1e-9)
        back = disk.transport(y, x, tu)
        assert np.max(np.abs(back.vec - u.vec)) <= 1e-9


def test_egrad_to_rgrad_examples():
    """Test the Euclidean to Riemannian gradient conversion."""
    disk = PoincareDisk(2)
    assert disk.egrad_to_rgrad(disk.origin(), [1.0, 0.0]).vec.tolist() == [1.0, 0.0]
    x = disk.point([math.sqrt(0.5), 0.0])
    assert disk.egrad_to_rgrad(x, [1.0, 0.0]).vec == pytest.approx([0.25, 0.0])
    assert np.all(disk.egrad_to_rgrad(x, [0.0, 0.0]).vec == 0.0)


def test_clamping_near_the_boundary():
    """Test that a long step is pulled back inside the disk and flagged."""
    disk = PoincareDisk(2)
    origin = disk.origin()
    y = disk.exp(origin, Tangent(origin, [40.0, 0.0]))

    assert y.clamped
    assert np.linalg.norm(y.coords) < 1.0
    assert np.linalg.norm(y.coords) == pytest.approx(1.0 - disk.boundary_eps)


def test_comparison_constant():
    """Test zeta(kappa, D) and the comparison inequality it enters."""
    # Config --->
    rng = np.random.default_rng(5)
    disk = PoincareDisk(2)
    diameter = 1.0
    zeta = comparison_constant(-4.0, diameter)

    assert zeta == pytest.approx(2.074597, abs=1e-6)
    assert comparison_constant(-4.0, 0.0) == 1.0
    with pytest.raises(DomainError):
        comparison_constant(-4.0, -1.0)

    # points within distance D / 2 of the origin
    radius = math.tanh(diameter / 2.0)
    for _ in range(1000):
        x, y, z = (random_point(rng, disk, radius) for _ in range(3))
        lhs = disk.dist(z, y) ** 2
        rhs = (
            zeta * disk.dist(z, x) ** 2
            + disk.dist(x, y) ** 2
            - 2.0 * disk.inner(disk.log(x, z), disk.log(x, y))
        )
        assert lhs <= rhs + 1e-10


def test_product_operations():
    """Test the pointwise lifts to products of disks."""
    # Config --->
    rng = np.random.default_rng(6)
    disk = PoincareDisk(2)
    manifold = ProductManifold.power(disk, 3)

    a = random_point(rng, disk, 0.8)
    b = random_point(rng, disk, 0.8)
    x = manifold.point([a.coords] * 3)
    y = manifold.point([b.coords] * 3)
    assert manifold.dist(x, y) == pytest.approx(math.sqrt(3.0) * disk.dist(a, b))

    single = ProductManifold.power(disk, 1)
    assert single.dist(
        single.point([a.coords]), single.point([b.coords])
    ) == pytest.approx(disk.dist(a, b), rel=1e-15)

    x = manifold.point([random_point(rng, disk, 0.8).coords for _ in range(3)])
    u = manifold.log(x, y)
    v = manifold.zero_tangent(x)
    assert manifold.inner(u, u) == pytest.approx(
        sum(disk.inner(p, p) for p in u), abs=1e-12
    )
    assert manifold.inner(u, v) == 0.0
    assert manifold.dist(manifold.exp(x, u), y) < 1e-9

    with pytest.raises(LengthMismatch):
        manifold.point([a.coords] * 2)

"""Geodesic-ball feasibility problems with a pairwise coupling objective."""

from __future__ import annotations

import hashlib
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from .._compat import StrEnum

import numpy as np

from .const import (
    CENTER_SPREAD,
    CONSISTENT_SLACK,
    INCONSISTENT_CENTER_RADIUS,
    INCONSISTENT_MARGIN,
    INCONSISTENT_SEPARATION,
    MIN_RADIUS,
    START_RADIUS,
    WITNESS_RADIUS,
)
from .exceptions import ContractViolation, DomainError, LengthMismatch
from .fixmaps import (
    Composition,
    GeodesicBall,
    ProjectedRelaxation,
    compose,
    projected_relax,
    projection,
)
from .manifold import (
    PoincareDisk,
    Point,
    ProductManifold,
    ProductPoint,
    ProductTangent,
    Tangent,
)
from .models import RunRecord


_LOGGER = logging.getLogger(__name__)


class Consistency(StrEnum):
    """Whether the balls of each factor share a common point."""

    CONSISTENT = "consistent"
    INCONSISTENT = "inconsistent"


@dataclass(frozen=True, slots=True, eq=False)
class BallSystem:
    """Per-factor lists of geodesic balls.

    ``witness`` is a common point of every factor's balls and is present
    iff the system is consistent.
    """

    balls: tuple[tuple[GeodesicBall, ...], ...]
    consistency: Consistency
    witness: ProductPoint | None = None

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "balls", tuple(tuple(group) for group in self.balls)
        )
        object.__setattr__(self, "consistency", Consistency(self.consistency))
        if (self.consistency is Consistency.CONSISTENT) != (self.witness is not None):
            raise ContractViolation(
                "A witness is required exactly for consistent systems"
            )

    @property
    def factors(self) -> int:
        """Return the number of factors."""
        return len(self.balls)

    def digest(self) -> str:
        """Return a SHA-256 digest of all centers and radii."""
        sha = hashlib.sha256()
        for group in self.balls:
            for ball in group:
                sha.update(ball.center.coords.tobytes())
                sha.update(np.float64(ball.radius).tobytes())
        return sha.hexdigest()


def _unit_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    while True:
        direction = rng.standard_normal(dim)
        norm = math.sqrt(direction @ direction)
        if norm > 0.0:
            return direction / norm


def uniform_in_ball(
        rng: np.random.Generator,
        dim: int,
        radius: float
) -> np.ndarray:
    """Return a point uniform in the Euclidean ball of the given radius."""
    direction = _unit_vector(rng, dim)
    return radius * rng.random() ** (1.0 / dim) * direction


def _geodesic_offset(
        disk: PoincareDisk,
        rng: np.random.Generator,
        base: Point,
        distance: float
) -> Point:
    direction = _unit_vector(rng, disk.dim)
    vec = direction * distance / disk.conformal_factor(base)
    return disk.exp(base, Tangent(base, vec))


def sample_consistent_system(
        rng: np.random.Generator,
        factors: int,
        balls_per_factor: int,
        disk: PoincareDisk,
) -> BallSystem:
    """Sample balls sharing a witness point in every factor.

    Per factor the witness p is uniform in the Euclidean ball of radius
    0.5, each center lies within distance 0.4 of p and each radius is
    uniform in [d(c, p) + 0.05, d(c, p) + 0.5].
    """
    if factors < 1 or balls_per_factor < 1:
        raise DomainError(
            f"Need at least one factor and one ball, got {factors} "
            f"and {balls_per_factor}"
        )
    low, high = CONSISTENT_SLACK
    groups, witness = [], []
    for _ in range(factors):
        p = disk.point(uniform_in_ball(rng, disk.dim, WITNESS_RADIUS))
        group = []
        for _ in range(balls_per_factor):
            spread = CENTER_SPREAD * rng.random() ** (1.0 / disk.dim)
            center = _geodesic_offset(disk, rng, p, spread)
            distance = disk.dist(center, p)
            radius = rng.uniform(distance + low, distance + high)
            group.append(GeodesicBall(center, radius))
        groups.append(tuple(group))
        witness.append(p)
    system = BallSystem(
        tuple(groups), Consistency.CONSISTENT, ProductPoint(tuple(witness))
    )
    _LOGGER.debug(f"Sampled consistent system {system.digest()[:12]}")
    return system


def sample_inconsistent_system(
        rng: np.random.Generator,
        factors: int,
        disk: PoincareDisk,
) -> BallSystem:
    """Sample two disjoint balls per factor.

    Centers are separated by a distance in [1.0, 1.5] and both radii are
    uniform in [0.1, (d(c1, c2) - 0.1) / 2], so r1 + r2 + 0.1 <= d(c1, c2).
    """
    if factors < 1:
        raise DomainError(f"Need at least one factor, got {factors}")
    groups = []
    for _ in range(factors):
        c1 = disk.point(
            uniform_in_ball(rng, disk.dim, INCONSISTENT_CENTER_RADIUS)
        )
        c2 = _geodesic_offset(disk, rng, c1, rng.uniform(*INCONSISTENT_SEPARATION))
        separation = disk.dist(c1, c2)
        upper = (separation - INCONSISTENT_MARGIN) / 2.0
        r1, r2 = rng.uniform(MIN_RADIUS, upper, size=2)
        groups.append((GeodesicBall(c1, float(r1)), GeodesicBall(c2, float(r2))))
    system = BallSystem(tuple(groups), Consistency.INCONSISTENT)
    _LOGGER.debug(f"Sampled inconsistent system {system.digest()[:12]}")
    return system


def sample_initial_point(
        rng: np.random.Generator,
        manifold: ProductManifold,
        radius: float = START_RADIUS
) -> ProductPoint:
    """Return x_0, uniform in the Euclidean ball of ``radius`` per factor."""
    return ProductPoint(tuple(
        disk.point(uniform_in_ball(rng, disk.dim, radius))
        for disk in manifold.factors
    ))


def constraint_operator(
        system: BallSystem,
        disk: PoincareDisk,
        factor: int
) -> Composition:
    """Return T = P_1 P_2 ... P_J for the balls of one factor."""
    if not 0 <= factor < system.factors:
        raise ContractViolation(
            f"Factor index {factor} out of range for {system.factors} factors"
        )
    return compose([projection(disk, ball) for ball in system.balls[factor]])


def build_constraint_map(
        system: BallSystem,
        disk: PoincareDisk,
        factor: int,
        alpha_relax: float,
        target: GeodesicBall | None = None,
) -> ProjectedRelaxation:
    """Return Q = P_C S_alpha for the composition of a factor's projections."""
    return projected_relax(
        constraint_operator(system, disk, factor), alpha_relax, target
    )


@dataclass(frozen=True, slots=True)
class CouplingObjective:
    """f(x) = (1/I) sum_i exp(<x^i, x^j>) + <x^i, x^j> with j = i + 1 mod I."""

    factors: int
    dim: int

    def __post_init__(self) -> None:
        if self.factors < 1 or self.dim < 1:
            raise DomainError(
                f"Need positive factor count and dimension, got "
                f"{self.factors} and {self.dim}"
            )

    def partner(self, i: int) -> int:
        """Return the index coupled to factor i."""
        return (i + 1) % self.factors

    def summand(self, x: ProductPoint, i: int) -> float:
        """Return F(x, i)."""
        self._check(x)
        self._check_index(i)
        t = float(x[i].coords @ x[self.partner(i)].coords)
        return math.exp(t) + t

    def value(self, x: ProductPoint) -> float:
        """Return f(x)."""
        self._check(x)
        return math.fsum(
            self.summand(x, i) for i in range(self.factors)
        ) / self.factors

    def euclidean_gradient(self, x: ProductPoint, xi: int) -> list[np.ndarray]:
        """Return the Euclidean partials of F(., xi), one array per factor."""
        self._check(x)
        self._check_index(xi)
        j = self.partner(xi)
        a, b = x[xi].coords, x[j].coords
        coef = math.exp(float(a @ b)) + 1.0
        grads = [np.zeros(self.dim) for _ in range(self.factors)]
        grads[xi] += coef * b
        grads[j] += coef * a
        return grads

    def stochastic_gradient(
            self,
            manifold: ProductManifold,
            x: ProductPoint,
            xi: int
    ) -> ProductTangent:
        """Return the Riemannian gradient of F(., xi) at x."""
        return manifold.egrad_to_rgrad(x, self.euclidean_gradient(x, xi))

    def riemannian_gradient(
            self,
            manifold: ProductManifold,
            x: ProductPoint
    ) -> ProductTangent:
        """Return the Riemannian gradient of f at x."""
        self._check(x)
        count = self.factors
        coefs = [
            math.exp(float(x[i].coords @ x[self.partner(i)].coords)) + 1.0
            for i in range(count)
        ]
        grads = [
            (coefs[k] * x[(k + 1) % count].coords
             + coefs[k - 1] * x[(k - 1) % count].coords) / count
            for k in range(count)
        ]
        return manifold.egrad_to_rgrad(x, grads)

    def _check(self, x: ProductPoint) -> None:
        if len(x) != self.factors:
            raise LengthMismatch(f"Expected {self.factors} parts, got {len(x)}")

    def _check_index(self, i: int) -> None:
        if not 0 <= i < self.factors:
            raise ContractViolation(
                f"Factor index {i} out of range for {self.factors} factors"
            )


def performance_measures(runs: Sequence[RunRecord], n: int) -> tuple[float, float]:
    """Return (D_n, F_n) averaged over the samplings.

    D_n = (1/S) sum_s sqrt(sum_i d(x_n^i, T^i(x_n^i))^2) and
    F_n = (I/S) sum_s f(x_n).

    Raises
    ------
    LengthMismatch
        If the runs have different lengths or are too short.

    """
    if not runs:
        raise ContractViolation("No runs to aggregate")
    lengths = {len(run.rows) for run in runs}
    if len(lengths) != 1:
        raise LengthMismatch(f"Ragged run lengths: {sorted(lengths)}")
    if not 0 <= n < lengths.pop():
        raise LengthMismatch(f"Iteration {n} is not recorded in every run")
    count = len(runs)
    rows = [run.rows[n] for run in runs]
    d_n = math.fsum(row.d_contrib for row in rows) / count
    f_n = runs[0].factors * math.fsum(row.f_value for row in rows) / count
    return d_n, f_n

"""Quasinonexpansive mappings on a Poincaré disk.

Metric projections onto geodesic balls, compositions, the relaxation
S(x) = exp_x((1 - alpha) log_x T(x)), the projected relaxation
Q = P_C S, subgradient projections and the resolvent of d(., p)^2 / 2.
"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from .._compat import StrEnum

from .const import CURVATURE, TARGET_RADIUS
from .exceptions import (
    ContractViolation,
    DomainError,
    InconsistentOracleError,
)
from .manifold import PoincareDisk, Point, Tangent, comparison_constant


_LOGGER = logging.getLogger(__name__)


class MapKind(StrEnum):
    """Kind tag of a fixed point map."""

    IDENTITY = "identity"
    PROJECTION = "projection"
    COMPOSITION = "composition"
    RELAXATION = "relaxation"
    PROJECTED_RELAXATION = "projected_relaxation"
    SUBGRADIENT_PROJECTION = "subgradient_projection"
    RESOLVENT_DIST_SQ = "resolvent_dist_sq"


class Normalization(StrEnum):
    """Denominator used by the subgradient projection step."""

    SQUARED = "squared"
    NORM = "norm"


@dataclass(frozen=True, slots=True, eq=False)
class GeodesicBall:
    """Closed geodesic ball {x : d(center, x) <= radius}."""

    center: Point
    radius: float

    def __post_init__(self) -> None:
        if not self.radius > 0.0:
            raise DomainError(f"Ball radius must be positive, got {self.radius}")

    @property
    def diameter(self) -> float:
        """Return the geodesic diameter of the ball."""
        return 2.0 * self.radius


@dataclass(frozen=True, slots=True)
class ConvexFunctionOracle:
    """Geodesically convex function with a subgradient selection."""

    evaluate: Callable[[Point], float]
    subgradient: Callable[[Point], Tangent]
    name: str = "g"


def ball_constraint(
        disk: PoincareDisk,
        center: Point,
        radius: float
) -> ConvexFunctionOracle:
    """Return g(x) = d(x, center) - radius, whose 0-sublevel set is a ball."""

    def evaluate(x: Point) -> float:
        return disk.dist(x, center) - radius

    def subgradient(x: Point) -> Tangent:
        distance = disk.dist(x, center)
        if distance == 0.0:
            return disk.zero_tangent(x)
        return disk.log(x, center).scaled(-1.0 / distance)

    return ConvexFunctionOracle(evaluate, subgradient, name="ball_constraint")


def half_distance_squared(
        disk: PoincareDisk,
        center: Point,
        level: float = 0.0
) -> ConvexFunctionOracle:
    """Return g(x) = d(x, center)^2 / 2 - level."""

    def evaluate(x: Point) -> float:
        return 0.5 * disk.dist(x, center) ** 2 - level

    def subgradient(x: Point) -> Tangent:
        return disk.log(x, center).scaled(-1.0)

    return ConvexFunctionOracle(
        evaluate, subgradient, name="half_distance_squared"
    )


def project_ball(disk: PoincareDisk, ball: GeodesicBall, x: Point) -> Point:
    """Return the metric projection of x onto a geodesic ball."""
    if disk.dist(ball.center, x) <= ball.radius:
        return x
    direction = disk.log(ball.center, x)
    return disk.exp(
        ball.center, direction.scaled(ball.radius / disk.norm(direction))
    )


class FixedPointMap(ABC):
    """Base class of a mapping of the disk into itself.

    Attributes
    ----------
    disk : PoincareDisk
        The factor manifold the map acts on.
    kind : MapKind
        Descriptive kind tag.

    """

    kind: MapKind

    def __init__(self, disk: PoincareDisk) -> None:
        """Initialize the map."""
        self.disk = disk

    @abstractmethod
    def apply(self, x: Point) -> Point:
        """Return T(x)."""

    def __call__(self, x: Point) -> Point:
        """Return T(x)."""
        return self.apply(x)

    def __repr__(self) -> str:
        """Return a short representation."""
        return f"<{self.__class__.__name__} kind={self.kind}>"


class Identity(FixedPointMap):
    """The identity mapping."""

    kind = MapKind.IDENTITY

    def apply(self, x: Point) -> Point:
        """Return x."""
        return x


class BallProjection(FixedPointMap):
    """Metric projection onto a geodesic ball."""

    kind = MapKind.PROJECTION

    def __init__(self, disk: PoincareDisk, ball: GeodesicBall) -> None:
        """Initialize the projection."""
        super().__init__(disk)
        self.ball = ball

    def apply(self, x: Point) -> Point:
        """Return P(x)."""
        return project_ball(self.disk, self.ball, x)


class Composition(FixedPointMap):
    """Composition T = T_1 T_2 ... T_J, applied right to left."""

    kind = MapKind.COMPOSITION

    def __init__(self, maps: Sequence[FixedPointMap]) -> None:
        """Initialize the composition."""
        maps = tuple(maps)
        if not maps:
            raise ContractViolation("Cannot compose an empty list of maps")
        disk = maps[0].disk
        if any(m.disk != disk for m in maps):
            raise ContractViolation("Composed maps act on different disks")
        super().__init__(disk)
        self.maps = maps

    def apply(self, x: Point) -> Point:
        """Return T_1(T_2(...T_J(x)))."""
        for mapping in reversed(self.maps):
            x = mapping.apply(x)
        return x


class Relaxation(FixedPointMap):
    """Relaxation S(x) = exp_x((1 - alpha) log_x T(x))."""

    kind = MapKind.RELAXATION

    def __init__(self, mapping: FixedPointMap, alpha: float) -> None:
        """Initialize the relaxation."""
        if not 0.0 < alpha < 1.0:
            raise ContractViolation(f"alpha must lie in (0, 1), got {alpha}")
        super().__init__(mapping.disk)
        self.mapping = mapping
        self.alpha = alpha

    def apply(self, x: Point) -> Point:
        """Return S(x)."""
        return self.from_image(x, self.mapping.apply(x))

    def from_image(self, x: Point, image: Point) -> Point:
        """Return S(x) given the precomputed image T(x)."""
        if image.same_point(x):
            return x
        step = self.disk.log(x, image).scaled(1.0 - self.alpha)
        return self.disk.exp(x, step)


class ProjectedRelaxation(FixedPointMap):
    """Projected relaxation Q(x) = P_C(S(x)) with Fix(T) inside C."""

    kind = MapKind.PROJECTED_RELAXATION

    def __init__(
            self,
            mapping: FixedPointMap,
            alpha: float,
            target: GeodesicBall
    ) -> None:
        """Initialize the projected relaxation."""
        super().__init__(mapping.disk)
        self.relaxation = Relaxation(mapping, alpha)
        self.target = target

    @property
    def mapping(self) -> FixedPointMap:
        """Return the underlying map T."""
        return self.relaxation.mapping

    @property
    def alpha(self) -> float:
        """Return the relaxation parameter."""
        return self.relaxation.alpha

    def apply(self, x: Point) -> Point:
        """Return Q(x)."""
        return self.trace(x)[1]

    def trace(self, x: Point) -> tuple[Point, Point]:
        """Return (T(x), Q(x)) sharing one evaluation of T."""
        image = self.mapping.apply(x)
        relaxed = self.relaxation.from_image(x, image)
        return image, project_ball(self.disk, self.target, relaxed)


class SubgradientProjection(FixedPointMap):
    """Subgradient projection onto the 0-sublevel set of a convex function.

    P(x) = x if g(x) <= 0, otherwise
    exp_x(-lam * g(x) / |u|_x^2 * u) for a subgradient u of g at x. The
    ``norm`` normalization divides by |u|_x instead.
    """

    kind = MapKind.SUBGRADIENT_PROJECTION

    def __init__(
            self,
            disk: PoincareDisk,
            oracle: ConvexFunctionOracle,
            lam: float,
            normalization: Normalization = Normalization.SQUARED,
            diameter: float | None = None,
    ) -> None:
        """Initialize the subgradient projection.

        Raises
        ------
        DomainError
            If lam is outside (0, 2 / zeta(-4, D)), or (0, 2) without a
            diameter.

        """
        zeta = 1.0 if diameter is None else comparison_constant(CURVATURE, diameter)
        upper = 2.0 / zeta
        if not 0.0 < lam < upper:
            raise DomainError(f"lambda must lie in (0, {upper!r}), got {lam}")
        super().__init__(disk)
        self.diameter = diameter
        self.oracle = oracle
        self.lam = lam
        self.normalization = Normalization(normalization)

    def apply(self, x: Point) -> Point:
        """Return P(x)."""
        value = self.oracle.evaluate(x)
        if value <= 0.0:
            return x
        u = self.oracle.subgradient(x)
        sq_norm = self.disk.inner(u, u)
        if sq_norm == 0.0:
            raise InconsistentOracleError(
                f"Zero subgradient of {self.oracle.name} at a point with "
                f"value {value!r}"
            )
        if self.normalization is Normalization.SQUARED:
            scale = self.lam * value / sq_norm
        else:
            scale = self.lam * value / math.sqrt(sq_norm)
        return self.disk.exp(x, u.scaled(-scale))


class DistanceSquaredResolvent(FixedPointMap):
    """Resolvent of grad d(., p)^2 / 2, J(x) = exp_x(lam/(1+lam) log_x p)."""

    kind = MapKind.RESOLVENT_DIST_SQ

    def __init__(self, disk: PoincareDisk, anchor: Point, lam: float) -> None:
        """Initialize the resolvent."""
        if not lam > 0.0:
            raise ContractViolation(f"lambda must be positive, got {lam}")
        super().__init__(disk)
        self.anchor = anchor
        self.lam = lam

    def apply(self, x: Point) -> Point:
        """Return J(x)."""
        if x.same_point(self.anchor):
            return x
        weight = self.lam / (1.0 + self.lam)
        return self.disk.exp(x, self.disk.log(x, self.anchor).scaled(weight))


def default_target(disk: PoincareDisk) -> GeodesicBall:
    """Return ball(0, artanh(1 - 1e-5)), the usable part of the disk."""
    return GeodesicBall(disk.origin(), TARGET_RADIUS)


def projection(disk: PoincareDisk, ball: GeodesicBall) -> BallProjection:
    """Return the projection map onto a ball."""
    return BallProjection(disk, ball)


def compose(maps: Sequence[FixedPointMap]) -> Composition:
    """Return the composition of the maps, the last one applied first."""
    return Composition(maps)


def relax(mapping: FixedPointMap, alpha: float) -> Relaxation:
    """Return the relaxation S_alpha of a map."""
    return Relaxation(mapping, alpha)


def projected_relax(
        mapping: FixedPointMap,
        alpha: float,
        target: GeodesicBall | None = None
) -> ProjectedRelaxation:
    """Return Q_alpha = P_C S_alpha.

    The caller asserts Fix(T) is contained in ``target``; it defaults to the
    usable part of the disk.
    """
    if target is None:
        target = default_target(mapping.disk)
    return ProjectedRelaxation(mapping, alpha, target)


def subgradient_projection(
        disk: PoincareDisk,
        oracle: ConvexFunctionOracle,
        lam: float,
        *,
        diameter: float | None = None,
        normalization: Normalization = Normalization.SQUARED,
) -> SubgradientProjection:
    """Return the subgradient projection of an oracle.

    Parameters
    ----------
    disk : PoincareDisk
        Factor manifold.
    oracle : ConvexFunctionOracle
        Convex function and subgradient selection.
    lam : float
        Step parameter, in (0, 2 / zeta(-4, D)).
    diameter : float, optional
        Diameter D of the working ball. Without it only 0 < lam < 2 is
        checked.
    normalization : Normalization, optional
        Squared-norm (default) or norm denominator.

    Raises
    ------
    DomainError
        If lam is outside its admissible range.

    """
    return SubgradientProjection(disk, oracle, lam, normalization, diameter)


def resolvent_dist_sq(
        disk: PoincareDisk,
        anchor: Point,
        lam: float
) -> DistanceSquaredResolvent:
    """Return the resolvent of grad d(., anchor)^2 / 2."""
    return DistanceSquaredResolvent(disk, anchor, lam)


def residual(mapping: FixedPointMap, x: Point) -> float:
    """Return d(x, T(x))."""
    return mapping.disk.dist(x, mapping.apply(x))

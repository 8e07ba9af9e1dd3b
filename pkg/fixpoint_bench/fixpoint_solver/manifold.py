"""Closed-form geometry of the Poincaré disk and of its products.

The disk carries the conformal metric ``(1 / (1 - |x|^2))^2 <., .>_E``,
i.e. half of the conformal factor of the usual Poincaré ball. The constant
sectional curvature is therefore -4 and every distance is half the usual
Poincaré distance. Geodesics are unchanged, so the Möbius closed forms of
the unit ball apply with the conformal factor ``1 / (1 - |x|^2)``.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np

from .const import BOUNDARY_EPS, CURVATURE
from .exceptions import (
    BasePointMismatch,
    DomainError,
    LengthMismatch,
    NonFiniteError,
)


_LOGGER = logging.getLogger(__name__)


def mobius_add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Return the Möbius sum a ⊕ b in the unit ball."""
    ab = a @ b
    a2 = a @ a
    b2 = b @ b
    num = (1.0 + 2.0 * ab + b2) * a + (1.0 - a2) * b
    return num / (1.0 + 2.0 * ab + a2 * b2)


def gyration(u: np.ndarray, v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Return gyr[u, v]w, the Thomas gyration of the unit ball."""
    u2 = u @ u
    v2 = v @ v
    uv = u @ v
    uw = u @ w
    vw = v @ w
    a = -uw * v2 + vw + 2.0 * uv * vw
    b = -vw * u2 - uw
    d = 1.0 + 2.0 * uv + u2 * v2
    return w + 2.0 * (a * u + b * v) / d


def comparison_constant(curvature: float, diameter: float) -> float:
    """Return zeta(kappa, D) = sqrt(|kappa|) D / tanh(sqrt(|kappa|) D).

    Parameters
    ----------
    curvature : float
        Lower bound of the sectional curvature.
    diameter : float
        Diameter of the region the comparison is used on.

    Returns
    -------
    float
        The comparison constant, 1 for a zero diameter.

    """
    if diameter < 0:
        raise DomainError(f"Diameter must be nonnegative, got {diameter}")
    scaled = math.sqrt(abs(curvature)) * diameter
    if scaled == 0.0:
        return 1.0
    return scaled / math.tanh(scaled)


def _artanh(r: float, eps: float) -> float:
    r = min(r, 1.0 - eps)
    return 0.5 * math.log1p(2.0 * r / (1.0 - r))


@dataclass(frozen=True, slots=True, eq=False)
class Point:
    """Coordinates of a point of the disk.

    ``clamped`` is set if the point was pulled back from the boundary
    region after a geodesic step.
    """

    coords: np.ndarray
    clamped: bool = False

    def __post_init__(self) -> None:
        coords = np.array(self.coords, dtype=np.float64)
        if coords.ndim != 1:
            raise LengthMismatch(f"Expected a vector, got shape {coords.shape}")
        if not np.all(np.isfinite(coords)):
            raise NonFiniteError(f"Non-finite coordinates: {coords}")
        coords.flags.writeable = False
        object.__setattr__(self, "coords", coords)

    @property
    def dim(self) -> int:
        """Return the coordinate dimension."""
        return self.coords.shape[0]

    @property
    def sq_norm(self) -> float:
        """Return the squared Euclidean norm of the coordinates."""
        return float(self.coords @ self.coords)

    def same_point(self, other: Point) -> bool:
        """Return True if both points have identical coordinates."""
        return self is other or np.array_equal(self.coords, other.coords)


@dataclass(frozen=True, slots=True, eq=False)
class Tangent:
    """Tangent vector anchored at a point."""

    base: Point
    vec: np.ndarray

    def __post_init__(self) -> None:
        vec = np.array(self.vec, dtype=np.float64)
        if vec.shape != self.base.coords.shape:
            raise LengthMismatch(
                f"Tangent of shape {vec.shape} at a point of dimension "
                f"{self.base.dim}"
            )
        if not np.all(np.isfinite(vec)):
            raise NonFiniteError(f"Non-finite tangent vector: {vec}")
        vec.flags.writeable = False
        object.__setattr__(self, "vec", vec)

    def scaled(self, factor: float) -> Tangent:
        """Return the tangent multiplied by a scalar."""
        return Tangent(self.base, factor * self.vec)


@dataclass(frozen=True, slots=True)
class PoincareDisk:
    """The m-dimensional Poincaré disk with constant curvature -4."""

    dim: int
    boundary_eps: float = BOUNDARY_EPS

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise DomainError(f"Dimension must be >= 1, got {self.dim}")
        if not 0.0 < self.boundary_eps < 1.0:
            raise DomainError(
                f"boundary_eps must lie in (0, 1), got {self.boundary_eps}"
            )

    @property
    def curvature(self) -> float:
        """Return the sectional curvature."""
        return CURVATURE

    def origin(self) -> Point:
        """Return the center of the disk."""
        return Point(np.zeros(self.dim))

    def point(self, coords: Sequence[float] | np.ndarray) -> Point:
        """Return a validated point of the open disk."""
        coords = np.asarray(coords, dtype=np.float64)
        if coords.shape != (self.dim,):
            raise LengthMismatch(
                f"Expected {self.dim} coordinates, got shape {coords.shape}"
            )
        if not np.all(np.isfinite(coords)):
            raise NonFiniteError(f"Non-finite coordinates: {coords}")
        if coords @ coords >= 1.0:
            raise DomainError(f"Point {coords} is not inside the open disk")
        return self._clamp(coords)

    def tangent(self, x: Point, vec: Sequence[float] | np.ndarray) -> Tangent:
        """Return a tangent vector at x."""
        self._check_point(x)
        return Tangent(x, vec)

    def zero_tangent(self, x: Point) -> Tangent:
        """Return the zero tangent vector at x."""
        return Tangent(x, np.zeros(self.dim))

    def conformal_factor(self, x: Point) -> float:
        """Return lambda_x = 1 / (1 - |x|^2)."""
        return 1.0 / (1.0 - x.sq_norm)

    def inner(self, u: Tangent, v: Tangent) -> float:
        """Return the Riemannian inner product of two tangents at one point.

        Raises
        ------
        BasePointMismatch
            If the tangents are anchored at different points.
        LengthMismatch
            If the tangents do not live on this disk.

        """
        self._check_point(u.base)
        self._check_point(v.base)
        if not u.base.same_point(v.base):
            raise BasePointMismatch("Inner product of tangents at different points")
        lam = self.conformal_factor(u.base)
        return lam * lam * float(u.vec @ v.vec)

    def norm(self, u: Tangent) -> float:
        """Return the Riemannian norm of a tangent."""
        self._check_point(u.base)
        return self.conformal_factor(u.base) * math.sqrt(u.vec @ u.vec)

    def dist(self, x: Point, y: Point) -> float:
        """Return the geodesic distance, artanh(|(-x) ⊕ y|).

        Evaluated through the equivalent form
        asinh(|x - y| / sqrt((1 - |x|^2)(1 - |y|^2))), which stays accurate
        near the boundary.
        """
        self._check_point(x)
        self._check_point(y)
        diff = x.coords - y.coords
        num = float(diff @ diff)
        if num == 0.0:
            return 0.0
        den = (1.0 - x.sq_norm) * (1.0 - y.sq_norm)
        return math.asinh(math.sqrt(num / den))

    def exp(self, x: Point, v: Tangent) -> Point:
        """Return the point reached by the geodesic from x with velocity v."""
        self._check_anchor(x, v)
        vn = math.sqrt(v.vec @ v.vec)
        if vn == 0.0:
            return x
        speed = self.conformal_factor(x) * vn
        w = (math.tanh(speed) / vn) * v.vec
        return self._clamp(mobius_add(x.coords, w))

    def log(self, x: Point, y: Point) -> Tangent:
        """Return the initial velocity of the geodesic from x to y."""
        self._check_point(x)
        self._check_point(y)
        if x.same_point(y):
            return self.zero_tangent(x)
        u = mobius_add(-x.coords, y.coords)
        un = math.sqrt(u @ u)
        if un == 0.0:
            return self.zero_tangent(x)
        scale = (1.0 - x.sq_norm) * _artanh(un, self.boundary_eps) / un
        return Tangent(x, scale * u)

    def transport(self, x: Point, y: Point, u: Tangent) -> Tangent:
        """Parallel transport u from x to y along the joining geodesic."""
        self._check_anchor(x, u)
        self._check_point(y)
        if x.same_point(y):
            return u
        rotated = gyration(y.coords, -x.coords, u.vec)
        ratio = (1.0 - y.sq_norm) / (1.0 - x.sq_norm)
        return Tangent(y, ratio * rotated)

    def egrad_to_rgrad(
            self,
            x: Point,
            g_euclidean: Sequence[float] | np.ndarray
    ) -> Tangent:
        """Convert a Euclidean gradient into the Riemannian gradient at x."""
        self._check_point(x)
        g = np.asarray(g_euclidean, dtype=np.float64)
        if g.shape != (self.dim,):
            raise LengthMismatch(
                f"Expected a gradient of length {self.dim}, got {g.shape}"
            )
        factor = 1.0 - x.sq_norm
        return Tangent(x, factor * factor * g)

    def _check_point(self, x: Point) -> None:
        if x.dim != self.dim:
            raise LengthMismatch(
                f"Point of dimension {x.dim} on a disk of dimension {self.dim}"
            )

    def _check_anchor(self, x: Point, v: Tangent) -> None:
        self._check_point(x)
        if not v.base.same_point(x):
            raise BasePointMismatch("Tangent is not anchored at the given point")

    def _clamp(self, coords: np.ndarray) -> Point:
        if not np.all(np.isfinite(coords)):
            raise NonFiniteError(f"Non-finite coordinates: {coords}")
        limit = 1.0 - self.boundary_eps
        norm = math.sqrt(coords @ coords)
        if norm >= limit:
            _LOGGER.debug(f"Clamping point of norm {norm!r} to {limit!r}")
            return Point(coords * (limit / norm), clamped=True)
        return Point(coords)


@dataclass(frozen=True, slots=True, eq=False)
class ProductPoint:
    """I-tuple of factor points."""

    parts: tuple[Point, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "parts", tuple(self.parts))

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.parts)

    def __getitem__(self, index: int) -> Point:
        return self.parts[index]

    @property
    def clamped(self) -> int:
        """Return the number of clamped parts."""
        return sum(part.clamped for part in self.parts)

    def same_point(self, other: ProductPoint) -> bool:
        """Return True if all parts coincide."""
        return len(self) == len(other) and all(
            a.same_point(b) for a, b in zip(self.parts, other.parts)
        )


@dataclass(frozen=True, slots=True, eq=False)
class ProductTangent:
    """I-tuple of factor tangents."""

    parts: tuple[Tangent, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "parts", tuple(self.parts))

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self) -> Iterator[Tangent]:
        return iter(self.parts)

    def __getitem__(self, index: int) -> Tangent:
        return self.parts[index]

    @property
    def base(self) -> ProductPoint:
        """Return the anchoring product point."""
        return ProductPoint(tuple(part.base for part in self.parts))


@dataclass(frozen=True, slots=True)
class ProductManifold:
    """Cartesian product of Poincaré disks with the product metric."""

    factors: tuple[PoincareDisk, ...]

    def __post_init__(self) -> None:
        factors = tuple(self.factors)
        if not factors:
            raise DomainError("A product manifold needs at least one factor")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def power(cls, disk: PoincareDisk, count: int) -> ProductManifold:
        """Return the product of ``count`` copies of one disk."""
        return cls(tuple(disk for _ in range(count)))

    def __len__(self) -> int:
        return len(self.factors)

    def point(self, coords: Sequence[Sequence[float]]) -> ProductPoint:
        """Return a validated product point."""
        self._check_length(coords)
        return ProductPoint(tuple(
            disk.point(c) for disk, c in zip(self.factors, coords)
        ))

    def zero_tangent(self, x: ProductPoint) -> ProductTangent:
        """Return the zero tangent at x."""
        self._check_length(x)
        return ProductTangent(tuple(
            disk.zero_tangent(p) for disk, p in zip(self.factors, x)
        ))

    def inner(self, u: ProductTangent, v: ProductTangent) -> float:
        """Return the sum of the factor inner products."""
        self._check_length(u)
        self._check_length(v)
        return math.fsum(
            disk.inner(a, b) for disk, a, b in zip(self.factors, u, v)
        )

    def norm(self, u: ProductTangent) -> float:
        """Return the product norm."""
        return math.sqrt(self.inner(u, u))

    def dist(self, x: ProductPoint, y: ProductPoint) -> float:
        """Return sqrt(sum_i d_i(x^i, y^i)^2)."""
        self._check_length(x)
        self._check_length(y)
        return math.sqrt(math.fsum(
            disk.dist(a, b) ** 2 for disk, a, b in zip(self.factors, x, y)
        ))

    def exp(self, x: ProductPoint, v: ProductTangent) -> ProductPoint:
        """Apply the factor exponential maps."""
        self._check_length(x)
        self._check_length(v)
        return ProductPoint(tuple(
            disk.exp(p, t) for disk, p, t in zip(self.factors, x, v)
        ))

    def log(self, x: ProductPoint, y: ProductPoint) -> ProductTangent:
        """Apply the factor logarithm maps."""
        self._check_length(x)
        self._check_length(y)
        return ProductTangent(tuple(
            disk.log(a, b) for disk, a, b in zip(self.factors, x, y)
        ))

    def transport(
            self,
            x: ProductPoint,
            y: ProductPoint,
            u: ProductTangent
    ) -> ProductTangent:
        """Apply the factor parallel transports."""
        self._check_length(x)
        self._check_length(y)
        self._check_length(u)
        return ProductTangent(tuple(
            disk.transport(a, b, t)
            for disk, a, b, t in zip(self.factors, x, y, u)
        ))

    def egrad_to_rgrad(
            self,
            x: ProductPoint,
            grads: Sequence[np.ndarray]
    ) -> ProductTangent:
        """Convert per-factor Euclidean gradients."""
        self._check_length(x)
        self._check_length(grads)
        return ProductTangent(tuple(
            disk.egrad_to_rgrad(p, g)
            for disk, p, g in zip(self.factors, x, grads)
        ))

    def _check_length(self, parts: Sequence) -> None:
        if len(parts) != len(self.factors):
            raise LengthMismatch(
                f"Expected {len(self.factors)} parts, got {len(parts)}"
            )

"""Capability interface shared by the concrete metric spaces."""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from typing import Any, Sequence

import numpy as np

from ..errors import (
    AmbiguityError,
    ConvergenceError,
    DomainError,
    UnsupportedCapabilityError,
)

Point = Any

DEFAULT_MEAN_TOL = 1e-10
DEFAULT_MEAN_MAX_ITER = 10_000

# relative slack on closed radius tests, absorbs roundoff at the boundary
_RADIUS_SLACK = 1e-12


class MetricSpace(ABC):
    """A complete metric space with locally unique geodesics and means.

    Subclasses fix the point representation. Points are treated as
    immutable values; numpy-backed points are returned read-only.
    """

    kind: str = ""
    smooth: bool = True
    # r(N): pairs closer than 2r have a unique midpoint (open bound)
    unique_midpoint_radius: float = math.inf
    # c(N): points inside a ball of radius c have a unique center of gravity
    convexity_radius: float = math.inf
    convexity_open: bool = False

    # -- points -----------------------------------------------------------

    @abstractmethod
    def point(self, coords, project: bool = False) -> Point:
        """Build a validated point from its serialized coordinates."""

    @abstractmethod
    def coords(self, p: Point) -> list:
        """Serialize a point to a JSON-friendly list."""

    @abstractmethod
    def validate(self, p: Point) -> None:
        """Raise :class:`InvalidPointError` unless ``p`` belongs to the space."""

    @abstractmethod
    def descriptor(self) -> str:
        ...

    @abstractmethod
    def random_point(self, rng: np.random.Generator, center: Point | None = None,
                     radius: float = 1.0) -> Point:
        """Random point within ``radius`` of ``center`` (or a default base)."""

    def equal(self, p: Point, q: Point) -> bool:
        return self.distance(p, q) == 0.0

    # -- metric -----------------------------------------------------------

    @abstractmethod
    def distance(self, p: Point, q: Point) -> float:
        ...

    def midpoint_is_unique(self, d: float) -> bool:
        return d < 2.0 * self.unique_midpoint_radius

    def interpolate(self, p: Point, q: Point, t: float) -> Point:
        """Point at distance ``t * d(p, q)`` from ``p`` on the minimizing geodesic."""
        t = float(t)
        if not 0.0 <= t <= 1.0:
            raise DomainError(f"interpolation parameter {t} outside [0, 1]")
        d = self.distance(p, q)
        if not self.midpoint_is_unique(d):
            raise AmbiguityError(
                f"{self.kind}: points at distance {d:.17g} are not joined by a "
                f"unique geodesic (limit {2 * self.unique_midpoint_radius:.17g})")
        if t == 0.0 or d == 0.0:
            return p
        if t == 1.0:
            return q
        return self._interpolate(p, q, t, d)

    def _interpolate(self, p: Point, q: Point, t: float, d: float) -> Point:
        return self.exp_map(p, t * self.log_map(p, q))

    def midpoint(self, p: Point, q: Point) -> Point:
        return self.interpolate(p, q, 0.5)

    # -- tangent structure (smooth spaces) ---------------------------------

    def log_map(self, base: Point, target: Point) -> np.ndarray:
        raise UnsupportedCapabilityError(f"{self.kind} space has no log map")

    def exp_map(self, base: Point, v: np.ndarray) -> Point:
        raise UnsupportedCapabilityError(f"{self.kind} space has no exp map")

    def inner(self, base: Point, u: np.ndarray, v: np.ndarray) -> float:
        raise UnsupportedCapabilityError(f"{self.kind} space has no tangent inner product")

    def norm(self, base: Point, v: np.ndarray) -> float:
        return math.sqrt(max(self.inner(base, v, v), 0.0))

    def is_tangent(self, base: Point, v: np.ndarray, tol: float = 1e-10) -> bool:
        raise UnsupportedCapabilityError(f"{self.kind} space has no tangent spaces")

    def tangent_basis(self, base: Point) -> list[np.ndarray]:
        """Orthonormal basis of the tangent space at ``base``."""
        raise UnsupportedCapabilityError(f"{self.kind} space has no tangent spaces")

    # -- centers of gravity -------------------------------------------------

    def weighted_center_of_gravity(self, points: Sequence[Point],
                                   weights: Sequence[float],
                                   tol: float = DEFAULT_MEAN_TOL,
                                   max_iter: int = DEFAULT_MEAN_MAX_ITER) -> Point:
        """Minimizer of ``sum_j w_j**2 * d(x, p_j)**2``.

        Weights are the raw edge weights; they are squared here.
        """
        points, w2 = self._prepare_mean(points, weights)
        if len(points) == 1:
            return points[0]
        if len(points) == 2:
            # the minimizer of a*d(x,p)^2 + b*d(x,q)^2 lies on the geodesic pq
            d = self.distance(points[0], points[1])
            self.check_uniqueness(points, None, diameter=d)
            return self.interpolate(points[0], points[1], w2[1] / (w2[0] + w2[1]))
        x = self._mean(points, w2, tol, max_iter)
        self.check_uniqueness(points, x)
        return x

    def _prepare_mean(self, points, weights):
        points = list(points)
        w = np.asarray(weights, dtype=float).ravel()
        if not points:
            raise DomainError("center of gravity of an empty point set")
        if len(points) != len(w):
            raise DomainError(f"{len(points)} points but {len(w)} weights")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise DomainError("center-of-gravity weights must be positive and finite")
        return points, w * w

    def check_uniqueness(self, points: Sequence[Point], center: Point | None,
                         diameter: float | None = None) -> None:
        """Raise :class:`AmbiguityError` unless some ball of radius c(N) holds all points.

        Candidate centers are ``center`` and then the points themselves. For two
        points the midpoint is the optimal center, so ``diameter`` suffices.
        """
        c = self.convexity_radius
        if math.isinf(c):
            return
        if diameter is not None:
            if self._within(diameter / 2.0):
                return
            raise AmbiguityError(
                f"{self.kind}: points at distance {diameter:.17g} exceed the "
                f"uniqueness diameter {2 * c:.17g}")
        candidates = ([center] if center is not None else []) + list(points)
        best = math.inf
        for x in candidates:
            spread = max(self.distance(x, p) for p in points)
            if self._within(spread):
                return
            best = min(best, spread)
        raise AmbiguityError(
            f"{self.kind}: no ball of radius {c:.17g} around the candidates holds "
            f"all {len(points)} points (smallest spread found {best:.17g})")

    def _within(self, radius: float) -> bool:
        c = self.convexity_radius
        if self.convexity_open:
            return radius < c
        return radius <= c * (1.0 + _RADIUS_SLACK)

    def _initial_mean(self, points, w2):
        return points[int(np.argmax(w2))]

    def _step(self, x, points, w2) -> float:
        # unit steps never overshoot under nonnegative curvature
        return 1.0

    def _mean(self, points, w2, tol, max_iter):
        # fixed point x <- exp_x(s * sum w2 log_x p / sum w2), with the step s
        # bounded by the curvature of the objective
        total = float(w2.sum())
        x = self._initial_mean(points, w2)
        scale = max(self.distance(x, p) for p in points)
        eff_tol = max(tol, 64 * np.finfo(float).eps * (1.0 + scale))
        gn = math.inf
        for _ in range(max_iter):
            g = sum(wj * self.log_map(x, p) for p, wj in zip(points, w2)) / total
            gn = self.norm(x, g)
            if gn < eff_tol:
                return x
            x = self.exp_map(x, self._step(x, points, w2) * g)
        raise ConvergenceError(
            f"{self.kind}: center of gravity not converged after {max_iter} "
            f"iterations (gradient norm {gn:.3e})", best=x, residual=gn)

    def mean_residual(self, x: Point, points: Sequence[Point], weights: Sequence[float]) -> float:
        """First-order optimality residual of ``x`` for the weighted mean problem."""
        points, w2 = self._prepare_mean(points, weights)
        g = sum(wj * self.log_map(x, p) for p, wj in zip(points, w2)) / float(w2.sum())
        return self.norm(x, g)

    def __repr__(self):
        return f"<{type(self).__name__} {self.descriptor()}>"


def frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a

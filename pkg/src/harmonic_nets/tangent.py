"""Angles, tangent cones and first-order criticality of harmonic nets.

On the smooth model spaces the projection to the tangent cone is the log
map, so angles and cone distances are evaluated in closed form. On metric
trees the space of directions at a point is finite (two directions inside
an edge, one per incident edge at a vertex, any two at angle pi) and the
criticality test enumerates it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import DomainError, UnsupportedCapabilityError
from .net import NetMap
from .spaces import MetricSpace, MetricTree, TreeRay


@dataclass(frozen=True, eq=False)
class ConePoint:
    """Element [direction, radius] of the tangent cone of ``space`` at ``base``.

    ``direction`` is a unit tangent vector on smooth spaces and a
    :class:`TreeRay` on trees. All radius-0 points are the cone apex.
    """

    space: MetricSpace
    base: Any
    direction: Any
    radius: float

    def __post_init__(self):
        if not self.radius >= 0:
            raise DomainError(f"cone radius must be nonnegative, got {self.radius!r}")

    @property
    def is_apex(self) -> bool:
        return self.radius == 0.0

    def __eq__(self, other):
        if not isinstance(other, ConePoint) or not _same_base(self, other):
            return NotImplemented if not isinstance(other, ConePoint) else False
        if self.is_apex or other.is_apex:
            return self.is_apex and other.is_apex
        return self.radius == other.radius and cone_angle(self, other) == 0.0

    __hash__ = None


def _same_base(p1: ConePoint, p2: ConePoint) -> bool:
    if p1.space is not p2.space and p1.space.descriptor() != p2.space.descriptor():
        return False
    return p1.space.equal(p1.base, p2.base)


def project(space: MetricSpace, base, target) -> ConePoint:
    """Image of ``target`` in the tangent cone at ``base``."""
    if isinstance(space, MetricTree):
        d = space.distance(base, target)
        if d == 0.0:
            return ConePoint(space, base, None, 0.0)
        ray = next(r for r in space.rays(base) if space.ray_contains(base, r, target))
        return ConePoint(space, base, ray, d)
    v = space.log_map(base, target)
    r = space.norm(base, v)
    return ConePoint(space, base, v / r if r > 0 else None, r)


def cone_angle(p1: ConePoint, p2: ConePoint) -> float:
    """Angle between the directions of two cone points at the same base."""
    if not _same_base(p1, p2):
        raise DomainError("cone points live at different base points")
    if p1.is_apex or p2.is_apex:
        return 0.0
    if isinstance(p1.space, MetricTree):
        return 0.0 if p1.direction == p2.direction else math.pi
    c = p1.space.inner(p1.base, p1.direction, p2.direction)
    return math.acos(min(1.0, max(-1.0, c)))


def cone_distance(p1: ConePoint, p2: ConePoint) -> float:
    """Law of cosines below angle pi, x1 + x2 at angle pi or more."""
    theta = cone_angle(p1, p2)
    x1, x2 = p1.radius, p2.radius
    if theta >= math.pi:
        return x1 + x2
    if p1.space.smooth and not (p1.is_apex or p2.is_apex):
        # same value as the law of cosines, without cancellation at small angles
        return p1.space.norm(p1.base, x1 * p1.direction - x2 * p2.direction)
    return math.sqrt(max(x1 * x1 + x2 * x2 - 2.0 * x1 * x2 * math.cos(theta), 0.0))


def cone_inner(p1: ConePoint, p2: ConePoint) -> float:
    """<[g1, x1], [g2, x2]> = x1 x2 cos(angle(g1, g2))."""
    return p1.radius * p2.radius * math.cos(cone_angle(p1, p2))


def angle(space: MetricSpace, base, q, r) -> float:
    """Angle at ``base`` subtended by ``q`` and ``r``, in [0, pi]."""
    if not space.smooth:
        raise UnsupportedCapabilityError(
            f"{space.kind}: angles are only evaluated on smooth spaces; "
            "enumerate tree directions instead")
    u = space.log_map(base, q)
    v = space.log_map(base, r)
    nu, nv = space.norm(base, u), space.norm(base, v)
    if nu == 0.0 or nv == 0.0:
        raise DomainError("angle needs both points distinct from the base")
    c = space.inner(base, u, v) / (nu * nv)
    return math.acos(min(1.0, max(-1.0, c)))


def _weighted_log_sum(f: NetMap, i: int):
    space = f.space
    base = f.image[i]
    nbrs = f.graph.neighbors[i]
    total = sum(w * w for _, w in nbrs)
    g = sum(w * w * space.log_map(base, f.image[j]) for j, w in nbrs)
    return g, total


def criticality_residual(f: NetMap, i: int) -> float:
    """|sum_j w(i,j)^2 log_{f(i)} f(j)| / w(i) with w(i) = sum_j w(i,j)^2.

    Vanishes exactly when the weighted barycenter of the projected
    neighbors is the origin of the tangent space at f(i).
    """
    if not f.space.smooth:
        raise UnsupportedCapabilityError(
            f"{f.space.kind}: criticality residual needs a log map; use "
            "variational_inequality_check")
    if not f.graph.neighbors[i]:
        return 0.0
    g, total = _weighted_log_sum(f, i)
    return f.space.norm(f.image[i], g) / total


def variational_inequality_check(f: NetMap, i: int, directions=None) -> float:
    """Worst value of sum_j w(i,j)^2 <V, pi f(j)> over unit directions V.

    The value is <= 0 (up to tolerance) at a harmonic vertex. Smooth spaces
    take tangent vectors at f(i) (normalized here); by default the steepest
    direction and +/- an orthonormal basis are tried. Trees take
    :class:`TreeRay` directions, by default every direction at f(i).
    """
    space = f.space
    base = f.image[i]
    nbrs = f.graph.neighbors[i]
    if not nbrs:
        return 0.0
    if isinstance(space, MetricTree):
        rays = space.rays(base) if directions is None else list(directions)
        for ray in rays:
            if not isinstance(ray, TreeRay):
                raise DomainError(f"tree directions must be TreeRay values, got {ray!r}")
        points = [f.image[j] for j, _ in nbrs]
        w2 = [w * w for _, w in nbrs]
        return max(space.first_variation(base, ray, points, w2) for ray in rays)
    g, _ = _weighted_log_sum(f, i)
    if directions is None:
        basis = space.tangent_basis(base)
        directions = basis + [-b for b in basis]
        # re-expand g in the basis: near a critical point, rounding noise off
        # the tangent space would dominate g / |g|
        g_t = sum(space.inner(base, g, b) * b for b in basis)
        gn = space.norm(base, g_t)
        if gn > 0:
            directions.append(g_t / gn)
    worst = -math.inf
    for v in directions:
        v = np.asarray(v, dtype=float)
        if not space.is_tangent(base, v, tol=1e-8):
            raise DomainError(f"direction {v.tolist()} is not tangent at vertex {i}")
        n = space.norm(base, v)
        if n == 0.0:
            continue
        worst = max(worst, space.inner(base, v, g) / n)
    return worst

"""Constant-curvature model spaces: Euclidean, sphere, hyperbolic, circle."""

from __future__ import annotations

import math

import numpy as np

from ..errors import AmbiguityError, DomainError, InvalidPointError
from .base import MetricSpace, frozen

TWO_PI = 2.0 * math.pi


def _as_vector(coords, size: int, kind: str) -> np.ndarray:
    try:
        a = np.array(coords, dtype=float).ravel()
    except (TypeError, ValueError) as exc:
        raise InvalidPointError(f"{kind}: cannot read coordinates {coords!r}") from exc
    if a.shape != (size,):
        raise InvalidPointError(f"{kind}: expected {size} coordinates, got {a.size}")
    if not np.all(np.isfinite(a)):
        raise InvalidPointError(f"{kind}: non-finite coordinates {a.tolist()}")
    return a


class Euclidean(MetricSpace):
    kind = "euclidean"

    def __init__(self, dim: int):
        if dim < 1:
            raise DomainError("euclidean dimension must be >= 1")
        self.dim = int(dim)

    def descriptor(self):
        return f"euclidean:{self.dim}"

    def point(self, coords, project=False):
        return frozen(_as_vector(coords, self.dim, self.kind))

    def coords(self, p):
        return [float(x) for x in p]

    def validate(self, p):
        _as_vector(p, self.dim, self.kind)

    def distance(self, p, q):
        return float(np.linalg.norm(np.subtract(p, q)))

    def _interpolate(self, p, q, t, d):
        return frozen(p + t * (q - p))

    def log_map(self, base, target):
        return np.subtract(target, base)

    def exp_map(self, base, v):
        return frozen(np.add(base, v))

    def inner(self, base, u, v):
        return float(np.dot(u, v))

    def is_tangent(self, base, v, tol=1e-10):
        return np.shape(v) == (self.dim,)

    def tangent_basis(self, base):
        return list(np.eye(self.dim))

    def weighted_center_of_gravity(self, points, weights, tol=1e-10, max_iter=10_000):
        points, w2 = self._prepare_mean(points, weights)
        if len(points) == 1:
            return points[0]
        return frozen(w2 @ np.asarray(points) / w2.sum())

    def random_point(self, rng, center=None, radius=1.0):
        center = np.zeros(self.dim) if center is None else center
        v = rng.normal(size=self.dim)
        v *= radius * rng.uniform() ** (1.0 / self.dim) / np.linalg.norm(v)
        return frozen(center + v)


class Sphere(MetricSpace):
    """Unit sphere S^n embedded in R^(n+1)."""

    kind = "sphere"
    unique_midpoint_radius = math.pi / 2
    convexity_radius = math.pi / 4

    def __init__(self, dim: int):
        if dim < 1:
            raise DomainError("sphere dimension must be >= 1")
        self.dim = int(dim)

    def descriptor(self):
        return f"sphere:{self.dim}"

    def point(self, coords, project=False):
        a = _as_vector(coords, self.dim + 1, self.kind)
        err = abs(np.linalg.norm(a) - 1.0)
        if err > 1e-12:
            if not project or err > 1e-6:
                raise InvalidPointError(f"sphere: |x| - 1 = {err:.3e} for {a.tolist()}")
            a = a / np.linalg.norm(a)
        return frozen(a)

    def coords(self, p):
        return [float(x) for x in p]

    def validate(self, p):
        self.point(p)

    def _normalize(self, a):
        return frozen(a / np.linalg.norm(a))

    def distance(self, p, q):
        # chord form keeps d(p, q) == d(q, p) bitwise
        chord = float(np.linalg.norm(np.subtract(p, q)))
        return 2.0 * math.asin(min(chord / 2.0, 1.0))

    def log_map(self, base, target):
        d = self.distance(base, target)
        if d == 0.0:
            return np.zeros(self.dim + 1)
        s = math.sin(d)
        if s < 1e-12 and d > 1.0:
            raise AmbiguityError("sphere: log map undefined at the antipode")
        # target - cos(d) base, rewritten to avoid cancellation for small d
        u = np.subtract(target, base) + 2.0 * math.sin(d / 2.0) ** 2 * np.asarray(base)
        u = u - np.dot(base, u) * np.asarray(base)
        return (d / s) * u

    def exp_map(self, base, v):
        v = np.asarray(v, dtype=float)
        n = float(np.linalg.norm(v))
        if n == 0.0:
            return base
        return self._normalize(math.cos(n) * np.asarray(base) + (math.sin(n) / n) * v)

    def inner(self, base, u, v):
        return float(np.dot(u, v))

    def is_tangent(self, base, v, tol=1e-10):
        return (np.shape(v) == (self.dim + 1,)
                and abs(float(np.dot(base, v))) <= tol * max(1.0, float(np.linalg.norm(v))))

    def tangent_basis(self, base):
        # orthonormal complement of base via QR of [base | I]
        m = np.column_stack([np.asarray(base), np.eye(self.dim + 1)])
        q, _ = np.linalg.qr(m)
        return [q[:, k] for k in range(1, self.dim + 1)]

    def _initial_mean(self, points, w2):
        m = w2 @ np.asarray(points)
        n = np.linalg.norm(m)
        if n < 1e-12:
            return points[int(np.argmax(w2))]
        return self._normalize(m)

    def random_point(self, rng, center=None, radius=1.0):
        if center is None:
            center = np.eye(self.dim + 1)[-1]
        basis = self.tangent_basis(center)
        v = sum(rng.normal() * b for b in basis)
        v *= radius * rng.uniform() ** (1.0 / self.dim) / np.linalg.norm(v)
        return self.exp_map(center, v)


def minkowski(u, v) -> float:
    u = np.asarray(u)
    v = np.asarray(v)
    return float(-u[0] * v[0] + np.dot(u[1:], v[1:]))


class Hyperbolic(MetricSpace):
    """Hyperbolic space H^n in the hyperboloid model <x, x> = -1, x0 > 0."""

    kind = "hyperbolic"

    def __init__(self, dim: int):
        if dim < 1:
            raise DomainError("hyperbolic dimension must be >= 1")
        self.dim = int(dim)

    def descriptor(self):
        return f"hyperbolic:{self.dim}"

    def _step(self, x, points, w2):
        # the Hessian of d^2/2 is bounded by d coth d here
        h = [d / math.tanh(d) if d > 1e-8 else 1.0 for d in (self.distance(x, p) for p in points)]
        return float(w2.sum()) / float(np.dot(w2, h))

    def point(self, coords, project=False):
        a = _as_vector(coords, self.dim + 1, self.kind)
        err = abs(minkowski(a, a) + 1.0)
        if err > 1e-10 * max(1.0, a[0] ** 2) or a[0] < 1.0:
            if not project or a[0] <= 0 or err > 1e-6 * max(1.0, a[0] ** 2):
                raise InvalidPointError(
                    f"hyperbolic: <x,x> + 1 = {err:.3e}, x0 = {a[0]} for {a.tolist()}")
            return self._lift(a[1:])
        return frozen(a)

    def _lift(self, spatial):
        spatial = np.asarray(spatial, dtype=float)
        return frozen(np.concatenate([[math.sqrt(1.0 + float(np.dot(spatial, spatial)))], spatial]))

    def coords(self, p):
        return [float(x) for x in p]

    def validate(self, p):
        self.point(p)

    def distance(self, p, q):
        # 2 asinh(|p - q|_M / 2) is accurate for close points, unlike arcosh(-<p,q>)
        u = np.subtract(p, q)
        s = max(minkowski(u, u), 0.0)
        return 2.0 * math.asinh(math.sqrt(s) / 2.0)

    def log_map(self, base, target):
        d = self.distance(base, target)
        if d == 0.0:
            return np.zeros(self.dim + 1)
        x = np.asarray(base)
        # target - cosh(d) base with cosh(d) - 1 = 2 sinh^2(d/2)
        u = np.subtract(target, x) - 2.0 * math.sinh(d / 2.0) ** 2 * x
        u = u + minkowski(x, u) * x
        return (d / math.sinh(d)) * u

    def exp_map(self, base, v):
        v = np.asarray(v, dtype=float)
        n = math.sqrt(max(minkowski(v, v), 0.0))
        if n == 0.0:
            return base
        y = math.cosh(n) * np.asarray(base) + (math.sinh(n) / n) * v
        return self._lift(y[1:])

    def inner(self, base, u, v):
        return minkowski(u, v)

    def is_tangent(self, base, v, tol=1e-10):
        scale = float(np.linalg.norm(base) * np.linalg.norm(v))
        return np.shape(v) == (self.dim + 1,) and abs(minkowski(base, v)) <= tol * max(1.0, scale)

    def tangent_basis(self, base):
        x = np.asarray(base)
        basis = []
        for k in range(1, self.dim + 1):
            e = np.zeros(self.dim + 1)
            e[k] = 1.0
            v = e + minkowski(x, e) * x
            for b in basis:
                v = v - minkowski(b, v) * b
            basis.append(v / math.sqrt(minkowski(v, v)))
        return basis

    def _initial_mean(self, points, w2):
        m = w2 @ np.asarray(points)
        return self._lift(m[1:] / math.sqrt(-minkowski(m, m)))

    def random_point(self, rng, center=None, radius=1.0):
        if center is None:
            center = self._lift(np.zeros(self.dim))
        basis = self.tangent_basis(center)
        v = sum(rng.normal() * b for b in basis)
        v *= radius * rng.uniform() ** (1.0 / self.dim) / math.sqrt(minkowski(v, v))
        return self.exp_map(center, v)


def wrap_angle(a: float) -> float:
    """Representative of ``a`` in [-pi, pi)."""
    return (a + math.pi) % TWO_PI - math.pi


class Circle(MetricSpace):
    """The unit circle; points are angles in [0, 2 pi)."""

    kind = "circle"
    unique_midpoint_radius = math.pi / 2
    # every open half circle has a unique weighted mean
    convexity_radius = math.pi / 2
    convexity_open = True

    def descriptor(self):
        return "circle"

    def point(self, coords, project=False):
        a = np.array(coords, dtype=float).ravel()
        if a.size != 1 or not np.isfinite(a[0]):
            raise InvalidPointError(f"circle: expected one finite angle, got {coords!r}")
        theta = float(a[0]) % TWO_PI
        if theta >= TWO_PI:
            theta = 0.0
        return theta

    def coords(self, p):
        return [float(p)]

    def validate(self, p):
        if not isinstance(p, float) or not 0.0 <= p < TWO_PI:
            raise InvalidPointError(f"circle: {p!r} is not a canonical angle in [0, 2pi)")

    def distance(self, p, q):
        delta = abs(p - q)
        return min(delta, TWO_PI - delta)

    def _signed(self, base, target) -> float:
        delta = target - base
        if delta > math.pi:
            delta -= TWO_PI
        elif delta < -math.pi:
            delta += TWO_PI
        return delta

    def log_map(self, base, target):
        delta = self._signed(base, target)
        if abs(delta) == math.pi:
            raise AmbiguityError("circle: log map undefined at the antipode")
        return np.array([delta])

    def exp_map(self, base, v):
        return self.point(base + float(np.asarray(v).ravel()[0]))

    def _interpolate(self, p, q, t, d):
        return self.point(p + t * self._signed(p, q))

    def inner(self, base, u, v):
        return float(np.asarray(u).ravel()[0] * np.asarray(v).ravel()[0])

    def is_tangent(self, base, v, tol=1e-10):
        return np.size(v) == 1

    def tangent_basis(self, base):
        return [np.array([1.0])]

    def random_point(self, rng, center=None, radius=1.0):
        center = 0.0 if center is None else center
        return self.point(center + rng.uniform(-radius, radius))

"""Finite metric trees: CAT(0) 1-complexes with positive edge lengths."""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import DomainError, GraphError, InvalidPointError
from .base import MetricSpace


@dataclass(frozen=True, order=True)
class TreePoint:
    """A point ``offset`` units along edge ``edge`` measured from its first endpoint."""

    edge: int
    offset: float


@dataclass(frozen=True, order=True)
class TreeRay:
    """Direction leaving a point along ``edge`` toward its endpoint ``toward``."""

    edge: int
    toward: int


class MetricTree(MetricSpace):
    kind = "tree"
    smooth = False

    def __init__(self, n_vertices: int, edges, source: str | None = None):
        self.n_vertices = int(n_vertices)
        self.edges = tuple((int(u), int(v), float(length)) for u, v, length in edges)
        self.source = source
        problems = self._problems()
        if problems:
            raise GraphError("invalid tree: " + "; ".join(problems), problems)
        self._u = np.array([e[0] for e in self.edges], dtype=int)
        self._v = np.array([e[1] for e in self.edges], dtype=int)
        self._len = np.array([e[2] for e in self.edges])
        self.incident = [[] for _ in range(self.n_vertices)]
        for k, (u, v, _) in enumerate(self.edges):
            self.incident[u].append(k)
            self.incident[v].append(k)
        self._all_pairs()

    @classmethod
    def from_json(cls, data: dict, source: str | None = None) -> "MetricTree":
        try:
            return cls(data["vertices"], data["edges"], source=source)
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphError(f"malformed tree description: {exc}") from exc

    @classmethod
    def from_file(cls, path) -> "MetricTree":
        path = Path(path)
        with open(path) as fh:
            return cls.from_json(json.load(fh), source=str(path.resolve()))

    def to_json(self) -> dict:
        return {"vertices": self.n_vertices, "edges": [list(e) for e in self.edges]}

    def descriptor(self):
        return f"tree:{self.source}" if self.source else "tree"

    def _problems(self) -> list[str]:
        out = []
        n = self.n_vertices
        if n < 2:
            out.append("a tree needs at least two vertices")
        if len(self.edges) != n - 1:
            out.append(f"{len(self.edges)} edges for {n} vertices (a tree has n - 1)")
        parent = list(range(max(n, 0)))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for k, (u, v, length) in enumerate(self.edges):
            if not (0 <= u < n and 0 <= v < n):
                out.append(f"edge {k} has an endpoint outside 0..{n - 1}")
                continue
            if u == v:
                out.append(f"edge {k} is a loop at vertex {u}")
                continue
            if not (length > 0 and math.isfinite(length)):
                out.append(f"edge {k} has non-positive length {length}")
            ru, rv = find(u), find(v)
            if ru == rv:
                out.append(f"edge {k} closes a cycle")
            parent[ru] = rv
        if not out and len({find(a) for a in range(n)}) != 1:
            out.append("tree is not connected")
        return out

    def _all_pairs(self):
        n = self.n_vertices
        self._vdist = np.zeros((n, n))
        # hop[a][b]: edge leaving a on the path to b
        self._hop = np.full((n, n), -1, dtype=int)
        for src in range(n):
            seen = {src}
            queue = deque([src])
            while queue:
                a = queue.popleft()
                for k in self.incident[a]:
                    u, v, length = self.edges[k]
                    b = v if a == u else u
                    if b in seen:
                        continue
                    seen.add(b)
                    self._vdist[src, b] = self._vdist[src, a] + length
                    self._hop[b, src] = k
                    queue.append(b)

    # -- points -----------------------------------------------------------

    def length(self, edge: int) -> float:
        return self.edges[edge][2]

    def vertex_point(self, x: int) -> TreePoint:
        if not 0 <= x < self.n_vertices:
            raise InvalidPointError(f"tree: no vertex {x}")
        k = min(self.incident[x])
        u, _, length = self.edges[k]
        return TreePoint(k, 0.0 if u == x else length)

    def vertex_at(self, p: TreePoint) -> int | None:
        """Tree vertex coinciding with ``p``, if any."""
        u, v, length = self.edges[p.edge]
        if p.offset == 0.0:
            return u
        if p.offset == length:
            return v
        return None

    def canonical(self, edge: int, offset: float) -> TreePoint:
        length = self.length(edge)
        if offset <= 0.0:
            return self.vertex_point(self.edges[edge][0])
        if offset >= length:
            return self.vertex_point(self.edges[edge][1])
        return TreePoint(edge, float(offset))

    def point(self, coords, project=False):
        if isinstance(coords, TreePoint):
            coords = (coords.edge, coords.offset)
        try:
            edge, offset = coords
            edge_f = float(edge)
            offset = float(offset)
        except (TypeError, ValueError) as exc:
            raise InvalidPointError(f"tree: expected [edge, offset], got {coords!r}") from exc
        if edge_f != int(edge_f) or not 0 <= int(edge_f) < len(self.edges):
            raise InvalidPointError(f"tree: no edge {edge!r}")
        edge = int(edge_f)
        length = self.length(edge)
        slack = 1e-12 * length
        if not (-slack <= offset <= length + slack):
            raise InvalidPointError(f"tree: offset {offset} outside [0, {length}] on edge {edge}")
        return self.canonical(edge, offset)

    def coords(self, p):
        return [p.edge, float(p.offset)]

    def validate(self, p):
        if not isinstance(p, TreePoint):
            raise InvalidPointError(f"tree: {p!r} is not a TreePoint")
        if not 0 <= p.edge < len(self.edges) or not 0.0 <= p.offset <= self.length(p.edge):
            raise InvalidPointError(f"tree: {p!r} is not on the tree")

    def equal(self, p, q):
        return self.canonical(p.edge, p.offset) == self.canonical(q.edge, q.offset)

    def random_point(self, rng, center=None, radius=1.0):
        weights = self._len / self._len.sum()
        edge = int(rng.choice(len(self.edges), p=weights))
        p = self.canonical(edge, rng.uniform(0.0, self.length(edge)))
        if center is None:
            return p
        d = self.distance(center, p)
        if d <= radius:
            return p
        return self.interpolate(center, p, radius * rng.uniform() / d)

    # -- metric -----------------------------------------------------------

    def _ends(self, p: TreePoint):
        """(vertex, distance from p) for both endpoints of p's edge."""
        u, v, length = self.edges[p.edge]
        return ((u, p.offset), (v, length - p.offset))

    def vertex_distance(self, x: int, p: TreePoint) -> float:
        (u, du), (v, dv) = self._ends(p)
        return float(min(self._vdist[x, u] + du, self._vdist[x, v] + dv))

    def distance(self, p, q):
        if q < p:
            p, q = q, p  # fixed evaluation order makes the result symmetric bitwise
        if p.edge == q.edge:
            return abs(q.offset - p.offset)
        return float(min(da + self._vdist[a, b] + db
                         for a, da in self._ends(p) for b, db in self._ends(q)))

    def _route(self, p, q):
        """Legs (edge, start offset, end offset) of the geodesic from p to q."""
        if p.edge == q.edge:
            return [(p.edge, p.offset, q.offset)]
        best = None
        for a, da in self._ends(p):
            for b, db in self._ends(q):
                total = da + self._vdist[a, b] + db
                if best is None or total < best[0]:
                    best = (total, a, b)
        _, a, b = best
        legs = [(p.edge, p.offset, self._offset_of(p.edge, a))]
        x = a
        while x != b:
            k = self._hop[x, b]
            u, v, length = self.edges[k]
            y = v if x == u else u
            legs.append((k, self._offset_of(k, x), self._offset_of(k, y)))
            x = y
        legs.append((q.edge, self._offset_of(q.edge, b), q.offset))
        return legs

    def _offset_of(self, edge: int, x: int) -> float:
        u, v, length = self.edges[edge]
        return 0.0 if x == u else length

    def _interpolate(self, p, q, t, d):
        legs = self._route(p, q)
        total = sum(abs(e - s) for _, s, e in legs)
        remaining = t * total
        for edge, s, e in legs:
            leg = abs(e - s)
            if remaining <= leg:
                return self.canonical(edge, s + math.copysign(remaining, e - s))
            remaining -= leg
        return q

    # -- centers of gravity -------------------------------------------------

    def _positions(self, points):
        """Matrix c[e, j]: signed coordinate of point j along edge e's axis.

        Along edge e = (u, v) a point on the u side sits at -d(u, p), one on
        the v side at length + d(v, p); a point on e sits at its offset.
        """
        m = len(points)
        c = np.empty((len(self.edges), m))
        for j, p in enumerate(points):
            (pu, du), (pv, dv) = self._ends(p)
            to_u = np.minimum(self._vdist[self._u, pu] + du, self._vdist[self._u, pv] + dv)
            to_v = np.minimum(self._vdist[self._v, pu] + du, self._vdist[self._v, pv] + dv)
            c[:, j] = np.where(to_u <= to_v, -to_u, self._len + to_v)
            c[p.edge, j] = p.offset
        return c

    def weighted_center_of_gravity(self, points, weights, tol=1e-10, max_iter=10_000):
        # F restricted to an edge is a convex quadratic in the offset, so the
        # global minimizer is the best clamped per-edge minimizer
        points, w2 = self._prepare_mean(points, weights)
        if len(points) == 1:
            return points[0]
        c = self._positions(points)
        t = np.clip(c @ w2 / w2.sum(), 0.0, self._len)
        values = ((t[:, None] - c) ** 2) @ w2
        k = int(np.argmin(values))
        return self.canonical(k, float(t[k]))

    # -- tangent cone -------------------------------------------------------

    def rays(self, p: TreePoint) -> list[TreeRay]:
        """Space of directions at p: two at an edge interior point, deg(x) at a vertex."""
        x = self.vertex_at(p)
        if x is None:
            u, v, _ = self.edges[p.edge]
            return [TreeRay(p.edge, u), TreeRay(p.edge, v)]
        out = []
        for k in self.incident[x]:
            u, v, _ = self.edges[k]
            out.append(TreeRay(k, v if x == u else u))
        return out

    def ray_contains(self, base: TreePoint, ray: TreeRay, p: TreePoint) -> bool:
        """Whether the geodesic from base to p leaves base along ``ray``."""
        u, v, length = self.edges[ray.edge]
        if ray.toward not in (u, v):
            raise DomainError(f"tree: vertex {ray.toward} is not an end of edge {ray.edge}")
        if base.edge == ray.edge:
            t = base.offset
        else:
            x = self.vertex_at(base)
            if x not in (u, v):
                raise DomainError(f"tree: ray {ray} does not start at {base}")
            t = self._offset_of(ray.edge, x)
        c = self._positions([p])[ray.edge, 0]
        return c > t if ray.toward == v else c < t

    def first_variation(self, base: TreePoint, ray: TreeRay, points, w2) -> float:
        """``sum_j w2_j <V, pi(p_j)>`` for the unit direction V along ``ray``.

        Distinct directions at a tree point are at angle pi, so each term is
        +d or -d depending on whether p_j lies along the ray.
        """
        total = 0.0
        for p, wj in zip(points, w2):
            d = self.distance(base, p)
            if d == 0.0:
                continue
            total += wj * d if self.ray_contains(base, ray, p) else -wj * d
        return total

    def mean_residual(self, x, points, weights):
        points, w2 = self._prepare_mean(points, weights)
        worst = max(self.first_variation(x, r, points, w2) for r in self.rays(x))
        return max(worst, 0.0) / float(w2.sum())

"""Maps from weighted graphs into metric spaces and their harmonic relaxation."""

from __future__ import annotations

import logging
import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import AmbiguityError, DomainError, GraphError, InvalidPointError
from .graph import RefinementRecord, WeightedGraph, check, make_bipartite, path_graph, refine
from .spaces import Euclidean, MetricSpace

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-8
DEFAULT_MAX_SWEEPS = 100_000

CONVERGED = "converged"
ITERATION_CAP = "iteration-cap"
AMBIGUITY = "ambiguity"


@dataclass(frozen=True, eq=False)
class NetMap:
    """A map f: graph -> space, one image point per vertex.

    Pinned vertices keep their images during relaxation; harmonicity is
    only required at unpinned vertices.
    """

    graph: WeightedGraph
    space: MetricSpace
    image: tuple
    pins: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "image", tuple(self.image))
        object.__setattr__(self, "pins", frozenset(int(i) for i in self.pins))
        n = self.graph.n_vertices
        if len(self.image) != n:
            raise InvalidPointError(f"map has {len(self.image)} images for {n} vertices")
        bad = [i for i in self.pins if not 0 <= i < n]
        if bad:
            raise DomainError(f"pinned vertices {sorted(bad)} are not in the graph")
        for i, p in enumerate(self.image):
            try:
                self.space.validate(p)
            except InvalidPointError as exc:
                raise InvalidPointError(f"vertex {i}: {exc}") from None

    def __getitem__(self, i):
        return self.image[i]

    def __len__(self):
        return len(self.image)

    def with_image(self, image) -> "NetMap":
        """Same graph, space and pins with new images (points are trusted)."""
        f = object.__new__(NetMap)
        object.__setattr__(f, "graph", self.graph)
        object.__setattr__(f, "space", self.space)
        object.__setattr__(f, "image", tuple(image))
        object.__setattr__(f, "pins", self.pins)
        return f

    def coords(self) -> list:
        return [self.space.coords(p) for p in self.image]


@dataclass
class RelaxationReport:
    """Outcome of :func:`relax`.

    ``energy_trace`` holds E(f) initially and after every half-sweep;
    ``residual_trace`` holds the harmonicity residual initially and after
    every full sweep.
    """

    energy_trace: list = field(default_factory=list)
    residual_trace: list = field(default_factory=list)
    sweeps: int = 0
    terminated: str = ITERATION_CAP
    final: NetMap | None = None

    @property
    def residual(self) -> float:
        return self.residual_trace[-1]

    @property
    def energy(self) -> float:
        return self.energy_trace[-1]

    @property
    def converged(self) -> bool:
        return self.terminated == CONVERGED


# -- energy ------------------------------------------------------------------


def vertex_energy(f: NetMap, i: int) -> float:
    """E_i(f) = sum over neighbors j of w(i,j)^2 d(f(i), f(j))^2."""
    d = f.space.distance
    return sum(w * w * d(f.image[i], f.image[j]) ** 2 for j, w in f.graph.neighbors[i])


def energy(f: NetMap) -> float:
    """E(f) = sum_i E_i(f); every edge is counted once from each end."""
    if isinstance(f.space, Euclidean) and f.graph.edges:
        x = np.asarray(f.image)
        ii, jj, w = _edge_arrays(f.graph)
        return 2.0 * float(np.sum(w * w * np.sum((x[ii] - x[jj]) ** 2, axis=1)))
    d = f.space.distance
    return 2.0 * sum(w * w * d(f.image[i], f.image[j]) ** 2 for i, j, w in f.graph.edges)


@lru_cache(maxsize=64)
def _edge_arrays(g: WeightedGraph):
    ii = np.array([e[0] for e in g.edges], dtype=int)
    jj = np.array([e[1] for e in g.edges], dtype=int)
    w = np.array([e[2] for e in g.edges])
    return ii, jj, w


# -- refinement --------------------------------------------------------------


def refine_map(f: NetMap, refined: WeightedGraph | None = None,
               record: RefinementRecord | None = None) -> NetMap:
    """Extend f to the refined graph by placing every edge vertex at the midpoint.

    ``refined`` and ``record`` must come from ``graph.refine(f.graph)``;
    they are computed here when omitted.
    """
    if refined is None or record is None:
        refined, record = refine(f.graph)
    if record.parent != f.graph or refined.n_vertices != f.graph.n_vertices + len(record.parent_edge_of):
        raise DomainError("refinement record does not belong to this map's graph")
    image = list(f.image)
    for m in range(f.graph.n_vertices, refined.n_vertices):
        i, j = record.parent_edge_of[m]
        try:
            image.append(f.space.midpoint(f.image[i], f.image[j]))
        except AmbiguityError as exc:
            raise AmbiguityError(f"edge ({i}, {j}): {exc}", edge=(i, j)) from exc
    return NetMap(refined, f.space, image, f.pins)


def refine_net(f: NetMap, times: int = 1) -> NetMap:
    for _ in range(times):
        f = refine_map(f)
    return f


# -- relaxation ----------------------------------------------------------------


def local_center(f: NetMap, i: int):
    """Center of gravity of the neighbors' images with weights w(i, j)."""
    nbrs = f.graph.neighbors[i]
    try:
        return f.space.weighted_center_of_gravity(
            [f.image[j] for j, _ in nbrs], [w for _, w in nbrs])
    except AmbiguityError as exc:
        raise AmbiguityError(f"vertex {i}: {exc}", vertex=i) from exc


def _movable(f: NetMap, alpha: int | None) -> list[int]:
    verts = range(f.graph.n_vertices) if alpha is None else f.graph.vertex_class(alpha)
    return [i for i in verts if i not in f.pins and f.graph.neighbors[i]]


@lru_cache(maxsize=64)
def _averaging_operator(g: WeightedGraph, pins: frozenset, alpha: int | None):
    # row i holds w(i, j)^2 / sum_k w(i, k)^2 for each movable vertex i
    verts = range(g.n_vertices) if alpha is None else g.vertex_class(alpha)
    rows = [i for i in verts if i not in pins and g.neighbors[i]]
    a = np.zeros((len(rows), g.n_vertices))
    for r, i in enumerate(rows):
        for j, w in g.neighbors[i]:
            a[r, j] += w * w
    a /= a.sum(axis=1, keepdims=True) if rows else 1.0
    return np.array(rows, dtype=int), a


def _relaxed(f: NetMap, alpha: int | None, workers: int | None = None):
    """Local centers for the movable vertices of class ``alpha`` (all if None)."""
    if isinstance(f.space, Euclidean):
        rows, a = _averaging_operator(f.graph, f.pins, alpha)
        centers = a @ np.asarray(f.image)
        centers.flags.writeable = False
        return rows.tolist(), list(centers)
    verts = _movable(f, alpha)
    if workers and workers > 1 and len(verts) > 1:
        # updates within one class read only the other class
        with ThreadPoolExecutor(max_workers=workers) as pool:
            centers = list(pool.map(lambda i: local_center(f, i), verts))
    else:
        centers = [local_center(f, i) for i in verts]
    return verts, centers


def _rho(f: NetMap, alpha: int, workers=None) -> tuple[NetMap, float]:
    verts, centers = _relaxed(f, alpha, workers)
    image = list(f.image)
    moved = 0.0
    for i, c in zip(verts, centers):
        moved = max(moved, f.space.distance(image[i], c))
        image[i] = c
    return f.with_image(image), moved


def rho(f: NetMap, alpha: int, workers: int | None = None) -> NetMap:
    """Move every unpinned vertex of class ``alpha`` to its local center of gravity.

    Pinned and isolated vertices keep their images.
    """
    if alpha not in (1, 2):
        raise DomainError(f"vertex class must be 1 or 2, got {alpha!r}")
    return _rho(f, alpha, workers)[0]


def harmonicity_residual(f: NetMap) -> float:
    """max over unpinned vertices of d(f(i), local center of gravity)."""
    verts, centers = _relaxed(f, None)
    return max((f.space.distance(f.image[i], c) for i, c in zip(verts, centers)), default=0.0)


def fixed_point_energy_test(f: NetMap) -> tuple[float, float]:
    """(E(f), E(rho_2 rho_1 f)); equal exactly when f is harmonic."""
    return energy(f), energy(rho(rho(f, 1), 2))


def relax(f: NetMap, tol: float = DEFAULT_TOL, max_sweeps: int = DEFAULT_MAX_SWEEPS,
          workers: int | None = None) -> RelaxationReport:
    """Iterate f <- rho_2(rho_1(f)) until the harmonicity residual drops below ``tol``.

    Hitting ``max_sweeps`` is reported through ``terminated``, not raised.
    Ambiguity errors propagate with ``sweep`` and the partial ``report``
    attached.
    """
    if not tol > 0:
        raise DomainError(f"tolerance must be positive, got {tol!r}")
    if max_sweeps < 1:
        raise DomainError(f"max_sweeps must be >= 1, got {max_sweeps!r}")
    if f.graph.labels is None:
        raise GraphError("relax needs a bipartition; call make_bipartite first")
    check(f.graph)

    report = RelaxationReport(final=f)
    report.energy_trace.append(energy(f))
    probe = None
    sweep = 0
    try:
        report.residual_trace.append(harmonicity_residual(f))
        if report.residual < tol:
            report.terminated = CONVERGED
            return report
        while sweep < max_sweeps:
            sweep += 1
            half, _ = probe if probe is not None else _rho(f, 1, workers)
            report.energy_trace.append(energy(half))
            f, _ = _rho(half, 2, workers)
            report.energy_trace.append(energy(f))
            # After rho_2 every class-2 vertex sits exactly on its (deterministic)
            # local center, so the residual is the class-1 displacement of the
            # next rho_1, which is reused as the first half of the next sweep.
            probe = _rho(f, 1, workers)
            report.residual_trace.append(probe[1])
            report.sweeps = sweep
            report.final = f
            if probe[1] < tol:
                report.terminated = CONVERGED
                return report
    except AmbiguityError as exc:
        report.terminated = AMBIGUITY
        exc.sweep = sweep
        exc.report = report
        exc.args = (f"sweep {sweep}: {exc}",)
        raise
    report.terminated = ITERATION_CAP
    return report


# -- pairs of maps -------------------------------------------------------------


def _same_domain(f1: NetMap, f2: NetMap):
    same_space = f1.space is f2.space or f1.space.descriptor() == f2.space.descriptor()
    if f1.graph != f2.graph or not same_space:
        raise DomainError("maps must share graph and space")


def geodesically_close(f1: NetMap, f2: NetMap, levels: int = 0) -> bool:
    """Whether every vertex pair f1(i), f2(i) has a unique midpoint.

    With ``levels = n`` the refinements r^k(f1), r^k(f2) for k <= n are
    checked too; this cannot decide closeness for all k.
    """
    _same_domain(f1, f2)
    for level in range(levels + 1):
        if level:
            try:
                f1, f2 = refine_map(f1), refine_map(f2)
            except AmbiguityError:
                return False
        s = f1.space
        if not all(s.midpoint_is_unique(s.distance(p, q)) for p, q in zip(f1.image, f2.image)):
            return False
    return True


def midpoint_map(f1: NetMap, f2: NetMap) -> NetMap:
    """Vertexwise midpoint of two geodesically close maps."""
    _same_domain(f1, f2)
    if f1.pins != f2.pins:
        raise DomainError("midpoint map needs identical pin sets")
    image = []
    for i, (p, q) in enumerate(zip(f1.image, f2.image)):
        try:
            image.append(f1.space.midpoint(p, q))
        except AmbiguityError as exc:
            raise AmbiguityError(f"vertex {i}: {exc}", vertex=i) from exc
    return f1.with_image(image)


# -- initial maps --------------------------------------------------------------


def _hops_from(g: WeightedGraph, src: int) -> list[float]:
    dist = [math.inf] * g.n_vertices
    dist[src] = 0
    queue = deque([src])
    while queue:
        i = queue.popleft()
        for j, _ in g.neighbors[i]:
            if dist[j] == math.inf:
                dist[j] = dist[i] + 1
                queue.append(j)
    return dist


def interpolate_pins(graph: WeightedGraph, space: MetricSpace, pins: dict) -> list:
    """Initial images interpolating between the two nearest pins (by hop count).

    A vertex reachable from a single pin copies that pin's image; vertices
    in components without pins raise :class:`DomainError`.
    """
    if not pins:
        raise DomainError("interpolate-pins initialization needs at least one pin")
    hops = {k: _hops_from(graph, k) for k in sorted(pins)}
    image = []
    for i in range(graph.n_vertices):
        if i in pins:
            image.append(pins[i])
            continue
        near = sorted((h[i], k) for k, h in hops.items() if h[i] < math.inf)
        if not near:
            raise DomainError(f"vertex {i} is not connected to any pin")
        if len(near) == 1:
            image.append(pins[near[0][1]])
            continue
        (da, a), (db, b) = near[:2]
        image.append(space.interpolate(pins[a], pins[b], da / (da + db)))
    return image


def random_init(graph: WeightedGraph, space: MetricSpace, pins: dict, seed: int) -> list:
    """Seeded random images near the first pin (or the space's base point).

    Points stay within c(N)/2 of the center so local centers are unique.
    """
    rng = np.random.default_rng(seed)
    center = pins[min(pins)] if pins else None
    if math.isinf(space.convexity_radius):
        radius = max((space.distance(center, p) for p in pins.values()), default=0.0) if pins else 0.0
        radius = radius or 1.0
    else:
        radius = space.convexity_radius / 2.0
    return [pins[i] if i in pins else space.random_point(rng, center, radius)
            for i in range(graph.n_vertices)]


# -- geodesics -------------------------------------------------------------------


@dataclass
class GeodesicTrace:
    net: NetMap
    reports: list
    refinements: int

    @property
    def points(self) -> list:
        """Images from start to end; refined vertices are not stored in path order."""
        return [self.net.image[i] for i in path_order(self.net.graph)]

    @property
    def length(self) -> float:
        d = self.net.space.distance
        pts = self.points
        return sum(d(p, q) for p, q in zip(pts, pts[1:]))


def path_order(g: WeightedGraph, start: int = 0) -> list[int]:
    """Vertices of a path graph walked from ``start``."""
    order = [start]
    prev = None
    while True:
        nxt = [j for j, _ in g.neighbors[order[-1]] if j != prev]
        if not nxt:
            return order
        prev = order[-1]
        order.append(nxt[0])


def _max_edge_distance(f: NetMap) -> float:
    d = f.space.distance
    return max((d(f.image[i], f.image[j]) for i, j, _ in f.graph.edges), default=0.0)


def _refine_until_local(f: NetMap, stage: str) -> tuple[NetMap, int]:
    limit = 0.9 * f.space.convexity_radius
    extra = 0
    while _max_edge_distance(f) > limit:
        f = refine_map(f)
        extra += 1
        logger.info("%s: refined to %d vertices to keep edges below %.3g",
                    stage, f.graph.n_vertices, limit)
    return f, extra


def _relax_stage(f: NetMap, tol, max_sweeps, stage, workers=None):
    try:
        return relax(f, tol, max_sweeps, workers)
    except AmbiguityError as exc:
        exc.args = (f"{stage}: {exc}",)
        raise


def trace_geodesic_full(space: MetricSpace, a, b, segments: int = 8, refinements: int = 0,
                        tol: float = DEFAULT_TOL, max_sweeps: int = DEFAULT_MAX_SWEEPS,
                        workers: int | None = None) -> GeodesicTrace:
    """Like :func:`trace_geodesic` but also returns the per-stage reports."""
    graph, _ = make_bipartite(path_graph(segments))
    try:
        image = [space.interpolate(a, b, k / segments) for k in range(segments + 1)]
    except AmbiguityError as exc:
        raise AmbiguityError(f"initialization: {exc}") from exc
    f = NetMap(graph, space, image, {0, segments})
    f, extra = _refine_until_local(f, "initialization")
    reports = [_relax_stage(f, tol, max_sweeps, "stage 0", workers)]
    f = reports[-1].final
    done = extra
    for stage in range(1, refinements + 1):
        f = refine_map(f)
        f, more = _refine_until_local(f, f"stage {stage}")
        done += 1 + more
        reports.append(_relax_stage(f, tol, max_sweeps, f"stage {stage}", workers))
        f = reports[-1].final
    return GeodesicTrace(f, reports, done)


def trace_geodesic(space: MetricSpace, a, b, segments: int = 8, refinements: int = 0,
                   tol: float = DEFAULT_TOL, max_sweeps: int = DEFAULT_MAX_SWEEPS) -> NetMap:
    """Geodesic from a to b as a pinned harmonic path of midpoints."""
    return trace_geodesic_full(space, a, b, segments, refinements, tol, max_sweeps).net

"""Finite weighted graphs, bipartition and edge refinement."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

from .errors import DomainError, GraphError

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph on vertices ``0..n_vertices-1`` with positive edge weights.

    ``labels`` optionally assigns every vertex to class 1 or 2 of a
    bipartition. Instances are immutable; use :func:`validate` to list
    invariant violations.
    """

    n_vertices: int
    edges: tuple = ()
    labels: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "n_vertices", int(self.n_vertices))
        object.__setattr__(
            self, "edges", tuple((int(i), int(j), float(w)) for i, j, w in self.edges))
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(int(x) for x in self.labels))

    @cached_property
    def neighbors(self) -> list[list[tuple[int, float]]]:
        """``neighbors[i]`` lists ``(j, w(i, j))`` in edge order."""
        adj = [[] for _ in range(self.n_vertices)]
        for i, j, w in self.edges:
            if 0 <= i < self.n_vertices and 0 <= j < self.n_vertices:
                adj[i].append((j, w))
                if i != j:
                    adj[j].append((i, w))
        return adj

    def degree(self, i: int) -> int:
        return len(self.neighbors[i])

    def weight(self, i: int, j: int) -> float:
        for k, w in self.neighbors[i]:
            if k == j:
                return w
        raise KeyError((i, j))

    def vertex_class(self, alpha: int) -> list[int]:
        if self.labels is None:
            raise GraphError("graph carries no bipartition; call make_bipartite first")
        return [i for i, lab in enumerate(self.labels) if lab == alpha]

    def with_labels(self, labels) -> "WeightedGraph":
        return WeightedGraph(self.n_vertices, self.edges, tuple(labels))

    def to_json(self) -> dict:
        return {"vertices": self.n_vertices, "edges": [[i, j, w] for i, j, w in self.edges]}

    @classmethod
    def from_json(cls, data) -> "WeightedGraph":
        try:
            n = data["vertices"]
            edges = [tuple(e) for e in data["edges"]]
        except (KeyError, TypeError) as exc:
            raise GraphError(f"graph object needs 'vertices' and 'edges': {exc}") from exc
        if isinstance(n, bool) or not isinstance(n, int) or n < 0:
            raise GraphError(f"'vertices' must be a nonnegative integer, got {n!r}")
        for k, e in enumerate(edges):
            if len(e) != 3:
                raise GraphError(f"edge {k} must be [i, j, weight], got {list(e)!r}")
            try:
                float(e[2])
                if int(e[0]) != e[0] or int(e[1]) != e[1]:
                    raise ValueError
            except (TypeError, ValueError):
                raise GraphError(f"edge {k} has non-numeric entries {list(e)!r}") from None
        return cls(n, tuple(edges))


@dataclass(frozen=True)
class RefinementRecord:
    """Provenance of a refinement: which parent edge each new vertex subdivides.

    Old vertices keep their indices; new vertex ``parent.n_vertices + k``
    subdivides parent edge ``k``.
    """

    parent: WeightedGraph
    parent_edge_of: dict = field(default_factory=dict)

    @property
    def embedding(self) -> list[int]:
        return list(range(self.parent.n_vertices))

    def to_json(self) -> dict:
        return {"parent_edge_of": {str(v): list(e) for v, e in self.parent_edge_of.items()}}


def validate(g: WeightedGraph) -> list[str]:
    """All invariant violations of ``g``; an empty list means the graph is valid."""
    problems = []
    n = g.n_vertices
    if n < 0:
        problems.append(f"negative vertex count {n}")
    seen = {}
    for k, (i, j, w) in enumerate(g.edges):
        if not (0 <= i < n and 0 <= j < n):
            problems.append(f"edge {k} ({i}, {j}): endpoint outside 0..{n - 1}")
            continue
        if i == j:
            problems.append(f"edge {k} ({i}, {j}): self-loop")
        if not (w > 0 and math.isfinite(w)):
            problems.append(f"edge {k} ({i}, {j}): weight {w} is not positive")
        key = (min(i, j), max(i, j))
        if key in seen:
            problems.append(f"edge {k} ({i}, {j}): duplicate of edge {seen[key]}")
        else:
            seen[key] = k
    if g.labels is not None:
        if len(g.labels) != n:
            problems.append(f"{len(g.labels)} bipartition labels for {n} vertices")
        else:
            for k, lab in enumerate(g.labels):
                if lab not in (1, 2):
                    problems.append(f"vertex {k}: bipartition label {lab} not in {{1, 2}}")
            for k, (i, j, _) in enumerate(g.edges):
                if 0 <= i < n and 0 <= j < n and i != j and g.labels[i] == g.labels[j]:
                    problems.append(f"edge {k} ({i}, {j}): both ends in class {g.labels[i]}")
    return problems


def check(g: WeightedGraph) -> WeightedGraph:
    """Return ``g`` unchanged, raising :class:`GraphError` if it is invalid."""
    problems = validate(g)
    if problems:
        raise GraphError("invalid graph: " + "; ".join(problems), problems)
    return g


def two_coloring(g: WeightedGraph) -> list[int] | None:
    """Labels 1/2 with every edge joining different classes, or None if ``g`` has an odd cycle.

    Each component's lowest vertex goes to class 1.
    """
    labels = [0] * g.n_vertices
    for root in range(g.n_vertices):
        if labels[root]:
            continue
        labels[root] = 1
        queue = deque([root])
        while queue:
            i = queue.popleft()
            for j, _ in g.neighbors[i]:
                if labels[j] == 0:
                    labels[j] = 3 - labels[i]
                    queue.append(j)
                elif labels[j] == labels[i]:
                    return None
    return labels


def refine(g: WeightedGraph) -> tuple[WeightedGraph, RefinementRecord]:
    """Subdivide every edge; each half carries weight ``sqrt(2) * w``.

    The result is bipartite with the old vertices in class 1 and the new
    edge vertices in class 2.
    """
    check(g)
    n = g.n_vertices
    edges = []
    parent_edge_of = {}
    for k, (i, j, w) in enumerate(g.edges):
        m = n + k
        edges.append((i, m, SQRT2 * w))
        edges.append((m, j, SQRT2 * w))
        parent_edge_of[m] = (i, j)
    labels = (1,) * n + (2,) * len(g.edges)
    refined = WeightedGraph(n + len(g.edges), tuple(edges), labels)
    return refined, RefinementRecord(g, parent_edge_of)


def make_bipartite(g: WeightedGraph) -> tuple[WeightedGraph, RefinementRecord | None]:
    """Attach a bipartition, refining all edges if ``g`` has an odd cycle.

    Returns the labelled graph and the refinement record, or None when no
    refinement was needed.
    """
    check(g)
    labels = two_coloring(g)
    if labels is not None:
        return g.with_labels(labels), None
    return refine(g)


def path_graph(segments: int, weight: float = 1.0) -> WeightedGraph:
    """Path ``0 - 1 - ... - segments`` with uniform edge weight."""
    if int(segments) != segments or segments < 1:
        raise DomainError(f"a path needs at least one segment, got {segments!r}")
    if not weight > 0:
        raise DomainError(f"edge weight must be positive, got {weight!r}")
    segments = int(segments)
    return WeightedGraph(segments + 1, tuple((k, k + 1, weight) for k in range(segments)))


def cycle_graph(n: int, weight: float = 1.0) -> WeightedGraph:
    if n < 3:
        raise DomainError(f"a cycle needs at least three vertices, got {n!r}")
    return WeightedGraph(n, tuple((k, (k + 1) % n, weight) for k in range(n)))

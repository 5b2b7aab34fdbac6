import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from harmonic_nets.errors import DomainError, UnsupportedCapabilityError
from harmonic_nets.graph import WeightedGraph, make_bipartite, path_graph
from harmonic_nets.net import NetMap, harmonicity_residual, local_center, relax, trace_geodesic
from harmonic_nets.spaces import Circle, Euclidean, Hyperbolic, Sphere, TreeRay
from harmonic_nets.tangent import (
    ConePoint,
    angle,
    cone_angle,
    cone_distance,
    cone_inner,
    criticality_residual,
    project,
    variational_inequality_check,
)

from netgen import SMOOTH_KINDS, SPACE_KINDS, random_pinned_net, tripod

E2 = Euclidean(2)
S2 = Sphere(2)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def star(space, center, leaves, weights=None, pinned_leaves=True):
    """Vertex 0 joined to every leaf."""
    weights = weights or [1.0] * len(leaves)
    n = len(leaves) + 1
    g = WeightedGraph(n, tuple((0, k + 1, w) for k, w in enumerate(weights)), (1,) + (2,) * len(leaves))
    pins = set(range(1, n)) if pinned_leaves else set()
    return NetMap(g, space, [center, *leaves], pins)


class TestAngle:
    def test_orthogonal(self):
        assert angle(E2, E2.point([0, 0]), E2.point([1, 0]), E2.point([0, 1])) == pytest.approx(math.pi / 2)

    def test_same_direction(self):
        q = E2.point([2, 3])
        assert angle(E2, E2.point([0, 0]), q, q) == 0.0

    def test_sphere_opposite(self):
        a = angle(S2, S2.point([0, 0, 1]), S2.point([1, 0, 0]), S2.point([-1, 0, 0]))
        assert a == pytest.approx(math.pi, abs=1e-7)

    def test_tree_unsupported(self):
        t = tripod()
        with pytest.raises(UnsupportedCapabilityError):
            angle(t, t.vertex_point(0), t.vertex_point(1), t.vertex_point(2))

    def test_point_at_base(self):
        p = E2.point([0, 0])
        with pytest.raises(DomainError):
            angle(E2, p, p, E2.point([1, 0]))


class TestConeDistance:
    def _cone(self, radius, direction):
        return ConePoint(E2, E2.point([0, 0]), np.array(direction, dtype=float), radius)

    def test_law_of_cosines(self):
        assert cone_distance(self._cone(3, [1, 0]), self._cone(4, [0, 1])) == 5.0

    def test_apex(self):
        apex = ConePoint(E2, E2.point([0, 0]), None, 0.0)
        assert cone_distance(apex, self._cone(2.5, [0, 1])) == 2.5

    def test_straight_angle(self):
        assert cone_distance(self._cone(1, [1, 0]), self._cone(2, [-1, 0])) == 3.0

    def test_tree_branch_sum(self):
        t = tripod()
        hub = t.vertex_point(0)
        p1 = project(t, hub, t.point([0, 0.5]))
        p2 = project(t, hub, t.point([1, 0.25]))
        assert cone_angle(p1, p2) == math.pi
        assert cone_distance(p1, p2) == 0.75
        assert cone_distance(p1, project(t, hub, t.point([0, 0.2]))) == pytest.approx(0.3)

    def test_mismatched_base(self):
        a = ConePoint(E2, E2.point([0, 0]), np.array([1.0, 0]), 1.0)
        b = ConePoint(E2, E2.point([1, 0]), np.array([1.0, 0]), 1.0)
        with pytest.raises(DomainError):
            cone_distance(a, b)

    def test_negative_radius(self):
        with pytest.raises(DomainError):
            ConePoint(E2, E2.point([0, 0]), None, -1.0)

    def test_apex_identification(self):
        base = S2.point([0, 0, 1])
        a = ConePoint(S2, base, np.array([1.0, 0, 0]), 0.0)
        b = ConePoint(S2, base, np.array([0, 1.0, 0]), 0.0)
        assert a == b
        assert a != ConePoint(S2, base, np.array([0, 1.0, 0]), 0.1)

    def test_inner(self):
        base = E2.point([0, 0])
        p = project(E2, base, E2.point([2, 0]))
        q = project(E2, base, E2.point([1, 1]))
        assert cone_inner(p, q) == pytest.approx(2.0)


@given(x=st.lists(st.floats(-5, 5), min_size=4, max_size=4))
@settings(max_examples=200, deadline=None)
def test_cone_distance_is_euclidean_distance(x):
    base = E2.point([0, 0])
    q, r = E2.point(x[:2]), E2.point(x[2:])
    d = cone_distance(project(E2, base, q), project(E2, base, r))
    assert d == pytest.approx(E2.distance(q, r), abs=1e-9)


@pytest.mark.parametrize("kind", ["euclidean", "sphere", "hyperbolic"])
@given(seed=seeds)
@settings(max_examples=40, deadline=None)
def test_angle_symmetric_and_parallel(kind, seed):
    rng = np.random.default_rng(seed)
    space = {"euclidean": Euclidean(3), "sphere": Sphere(2), "hyperbolic": Hyperbolic(2)}[kind]
    base = space.random_point(rng, None, 1.0)
    q, r = space.random_point(rng, base, 1.0), space.random_point(rng, base, 1.0)
    a = angle(space, base, q, r)
    assert 0.0 <= a <= math.pi
    assert a == angle(space, base, r, q)
    # a point further along the geodesic through q lies in the same direction
    q2 = space.exp_map(base, 0.5 * space.log_map(base, q))
    assert angle(space, base, q, q2) < 1e-7


class TestCriticality:
    def test_symmetric(self):
        e = Euclidean(1)
        f = star(e, e.point([0.0]), [e.point([-1.0]), e.point([1.0])])
        assert criticality_residual(f, 0) == 0.0

    def test_off_center(self):
        e = Euclidean(1)
        f = star(e, e.point([0.5]), [e.point([-1.0]), e.point([1.0])])
        assert criticality_residual(f, 0) == 0.5

    def test_sphere_geodesic(self):
        f = trace_geodesic(S2, S2.point([0, 0, 1]), S2.point([0, 1, 0]), segments=8)
        assert max(criticality_residual(f, i) for i in range(1, 8)) < 1e-6

    def test_tree_unsupported(self):
        t = tripod()
        f = star(t, t.vertex_point(0), [t.vertex_point(k) for k in (1, 2, 3)])
        with pytest.raises(UnsupportedCapabilityError):
            criticality_residual(f, 0)

    def test_isolated_vertex(self):
        f = NetMap(WeightedGraph(1), S2, [S2.point([0, 0, 1])])
        assert criticality_residual(f, 0) == 0.0

    def test_pinned_vertex_is_evaluable(self):
        e = Euclidean(1)
        f = star(e, e.point([0.5]), [e.point([-1.0]), e.point([1.0])])
        assert criticality_residual(f, 1) == 1.5


class TestVariationalInequality:
    def test_sphere_random_directions(self):
        f = trace_geodesic(S2, S2.point([0, 0, 1]), S2.point([0, 1, 0]), segments=8)
        rng = np.random.default_rng(0)
        for i in range(1, 8):
            base = f.image[i]
            dirs = []
            for _ in range(32):
                v = rng.normal(size=3)
                v -= np.dot(v, base) * base
                dirs.append(v / np.linalg.norm(v))
            assert variational_inequality_check(f, i, dirs) <= 1e-6

    def test_tripod_hub(self):
        t = tripod()
        f = star(t, t.vertex_point(0), [t.vertex_point(k) for k in (1, 2, 3)])
        for ray in t.rays(t.vertex_point(0)):
            # the ray's own leaf pulls +1, the other two push -1 each
            assert variational_inequality_check(f, 0, [ray]) == pytest.approx(-1.0)
        assert variational_inequality_check(f, 0) <= 0

    def test_tripod_off_hub_is_violated(self):
        t = tripod()
        f = star(t, t.point([0, 0.3]), [t.vertex_point(k) for k in (1, 2, 3)])
        assert variational_inequality_check(f, 0) > 0

    def test_euclidean_descent_direction(self):
        f = star(E2, E2.point([1, 1]), [E2.point([0, 0]), E2.point([1, 0]), E2.point([0, 1])])
        center = local_center(f, 0)
        v = center - f.image[0]
        assert variational_inequality_check(f, 0, [v / np.linalg.norm(v)]) > 0.1

    def test_non_tangent_direction(self):
        f = star(S2, S2.point([0, 0, 1]), [S2.point([1, 0, 0])])
        with pytest.raises(DomainError):
            variational_inequality_check(f, 0, [np.array([0, 0, 1.0])])

    def test_tree_needs_rays(self):
        t = tripod()
        f = star(t, t.vertex_point(0), [t.vertex_point(1)])
        with pytest.raises(DomainError):
            variational_inequality_check(f, 0, [np.array([1.0])])

    def test_explicit_ray(self):
        t = tripod()
        f = star(t, t.point([0, 0.5]), [t.vertex_point(1)])
        assert variational_inequality_check(f, 0, [TreeRay(0, 1)]) == pytest.approx(0.5)
        assert variational_inequality_check(f, 0, [TreeRay(0, 0)]) == pytest.approx(-0.5)


# -- properties on converged maps ------------------------------------------------------


@pytest.mark.parametrize("kind", SPACE_KINDS)
@given(seed=seeds)
@settings(max_examples=6, deadline=None)
def test_converged_maps_are_critical(kind, seed):
    rng = np.random.default_rng(seed)
    rep = relax(random_pinned_net(rng, kind), tol=1e-10)
    f = rep.final
    for i in range(f.graph.n_vertices):
        if i in f.pins or not f.graph.neighbors[i]:
            continue
        w = sum(wt * wt for _, wt in f.graph.neighbors[i])
        assert variational_inequality_check(f, i) / w <= 1e-6
        if kind in SMOOTH_KINDS:
            assert criticality_residual(f, i) < 1e-6


@pytest.mark.parametrize("kind", SMOOTH_KINDS)
@given(seed=seeds)
@settings(max_examples=6, deadline=None)
def test_criticality_matches_harmonicity(kind, seed):
    rng = np.random.default_rng(seed)
    f = relax(random_pinned_net(rng, kind), tol=1e-10).final
    assert harmonicity_residual(f) < 1e-10
    for i in range(f.graph.n_vertices):
        if i not in f.pins and f.graph.neighbors[i]:
            assert criticality_residual(f, i) < 1e-6


def test_circle_criticality_sign():
    c = Circle()
    g, _ = make_bipartite(path_graph(2))
    f = NetMap(g, c, [0.0, 0.2, 1.0], {0, 2})
    # both neighbors pull toward 0.5
    assert criticality_residual(f, 1) == pytest.approx(0.3)

"""Harmonic maps from finite weighted graphs into metric spaces.

A map is relaxed to harmonicity by alternately moving each vertex class of
a bipartite graph to the weighted centers of gravity of its neighbors.
Geodesics are traced as pinned, refinable strings of midpoints.
"""

from .errors import (
    AmbiguityError,
    ConvergenceError,
    DomainError,
    GraphError,
    HarmonicNetError,
    InvalidPointError,
    UnsupportedCapabilityError,
)
from .graph import (
    RefinementRecord,
    WeightedGraph,
    cycle_graph,
    make_bipartite,
    path_graph,
    refine,
    validate,
)
from .net import (
    NetMap,
    RelaxationReport,
    energy,
    fixed_point_energy_test,
    geodesically_close,
    harmonicity_residual,
    midpoint_map,
    refine_map,
    relax,
    rho,
    trace_geodesic,
    vertex_energy,
)
from .spaces import (
    Circle,
    Euclidean,
    Hyperbolic,
    MetricSpace,
    MetricTree,
    Sphere,
    TreePoint,
    TreeRay,
    parse_space,
)
from .tangent import (
    ConePoint,
    angle,
    cone_distance,
    criticality_residual,
    project,
    variational_inequality_check,
)

__version__ = "0.1.0"

__all__ = [
    "AmbiguityError",
    "Circle",
    "ConePoint",
    "ConvergenceError",
    "DomainError",
    "Euclidean",
    "GraphError",
    "HarmonicNetError",
    "Hyperbolic",
    "InvalidPointError",
    "MetricSpace",
    "MetricTree",
    "NetMap",
    "RefinementRecord",
    "RelaxationReport",
    "Sphere",
    "TreePoint",
    "TreeRay",
    "UnsupportedCapabilityError",
    "WeightedGraph",
    "angle",
    "cone_distance",
    "criticality_residual",
    "cycle_graph",
    "energy",
    "fixed_point_energy_test",
    "geodesically_close",
    "harmonicity_residual",
    "make_bipartite",
    "midpoint_map",
    "parse_space",
    "path_graph",
    "project",
    "refine",
    "refine_map",
    "relax",
    "rho",
    "trace_geodesic",
    "validate",
    "variational_inequality_check",
    "vertex_energy",
]

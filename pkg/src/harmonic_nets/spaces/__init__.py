"""Metric spaces with locally unique geodesics and centers of gravity."""

from pathlib import Path

from ..errors import DomainError
from .base import MetricSpace, Point
from .smooth import Circle, Euclidean, Hyperbolic, Sphere, minkowski, wrap_angle
from .tree import MetricTree, TreePoint, TreeRay

__all__ = [
    "Circle",
    "Euclidean",
    "Hyperbolic",
    "MetricSpace",
    "MetricTree",
    "Point",
    "Sphere",
    "TreePoint",
    "TreeRay",
    "minkowski",
    "parse_space",
    "wrap_angle",
]


def parse_space(descriptor: str, base_dir=None) -> MetricSpace:
    """Build a space from ``euclidean:n``, ``sphere:n``, ``hyperbolic:n``,
    ``circle`` or ``tree:<path>``.

    Relative tree paths are resolved against ``base_dir`` when the file is
    not found relative to the working directory.
    """
    kind, _, arg = descriptor.strip().partition(":")
    kind = kind.lower()
    if kind == "circle" and not arg:
        return Circle()
    if kind == "tree":
        if not arg:
            raise DomainError("tree descriptor needs a file: tree:<path>")
        path = Path(arg)
        if not path.is_absolute() and not path.exists() and base_dir is not None:
            path = Path(base_dir) / path
        return MetricTree.from_file(path)
    classes = {"euclidean": Euclidean, "sphere": Sphere, "hyperbolic": Hyperbolic}
    if kind not in classes:
        raise DomainError(f"unknown space descriptor {descriptor!r}")
    try:
        dim = int(arg)
    except ValueError:
        raise DomainError(f"space descriptor {descriptor!r} needs an integer dimension") from None
    return classes[kind](dim)

"""Derivative-free descent on manifolds cut out by triangular polynomial systems."""

from ._core import (
    LinearTriangularForm,
    Partition,
    Polynomial,
    Problem,
    TriangularSystem,
    VariableOrder,
    WhitneyError,
    geodesic,
    lift,
    linear_whitney,
    load_problem,
    parse_problem,
    partition,
    project,
    run,
    tangent_frame,
    validate_triangular,
)

__all__ = [
    "LinearTriangularForm",
    "Partition",
    "Polynomial",
    "Problem",
    "TriangularSystem",
    "VariableOrder",
    "WhitneyError",
    "geodesic",
    "lift",
    "linear_whitney",
    "load_problem",
    "parse_problem",
    "partition",
    "project",
    "run",
    "tangent_frame",
    "validate_triangular",
]

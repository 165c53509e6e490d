"""Numerical certificates of uniform amenability and Property A on finite groups."""

from .errors import AmenabilityError
from .group_core import (
    INFINITE,
    FamilySpec,
    FiniteGroup,
    FiniteMetricSpace,
    GeneratingSet,
    build_group_from_permutations,
    build_group_from_table,
    word_length,
    word_metric,
)
from .group_functions import GroupVector

__version__ = "0.1.0"

__all__ = [
    "AmenabilityError",
    "INFINITE",
    "FamilySpec",
    "FiniteGroup",
    "FiniteMetricSpace",
    "GeneratingSet",
    "GroupVector",
    "build_group_from_permutations",
    "build_group_from_table",
    "word_length",
    "word_metric",
]

"""Конечноэлементные пространства и операторы."""
from .quadrature import triangle_rule, line_rule, element_means, edge_means
from .spaces import DofMap, FeFunction, interpolate
from .operators import (
    elementwise_div,
    elementwise_curl,
    curl_of_p1,
    evaluate,
    mass_matrix,
    l2_norm,
    l2_error,
)
from .derham import (
    SpaceDimensions,
    hodge_decompose,
    space_dimensions,
    discrete_poincare_constant,
    laplace_identity_defect,
    l2_inner,
)

__all__ = [
    "triangle_rule",
    "line_rule",
    "element_means",
    "edge_means",
    "DofMap",
    "FeFunction",
    "interpolate",
    "elementwise_div",
    "elementwise_curl",
    "curl_of_p1",
    "evaluate",
    "mass_matrix",
    "l2_norm",
    "l2_error",
    "SpaceDimensions",
    "hodge_decompose",
    "space_dimensions",
    "discrete_poincare_constant",
    "laplace_identity_defect",
    "l2_inner",
]

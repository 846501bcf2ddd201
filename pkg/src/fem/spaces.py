"""Дискретные пространства P0, CR, RT0, P1 и их степени свободы."""
from typing import Callable, Optional

import numpy as np

from .quadrature import edge_means, element_means, evaluate_field
from ..mesh.triangulation import Mesh
from ..utils.errors import InvalidInputError

SPACES = ("P0", "CR", "RT0", "P1")
CONSTRAINTS = {
    "P0": ("none",),
    "CR": ("none", "navier", "dirichlet"),
    "RT0": ("none", "navier"),
    "P1": ("none", "zero-trace"),
}


class DofMap:
    """Нумерация степеней свободы пространства на сетке.

    P0: треугольник. P1: вершина. RT0: ребро, значение ``int_G v.nu``.
    CR: два значения на ребро ``e``: среднее ``v.nu`` (номер ``2e``) и
    среднее ``v.tau`` (номер ``2e + 1``), ``tau = (-nu_y, nu_x)``.
    Связанные степени свободы (граничные условия) всегда равны нулю.
    """

    def __init__(self, mesh: Mesh, space: str, constraint: str = "none"):
        if space not in SPACES:
            raise InvalidInputError(f"unknown space {space!r}")
        if constraint not in CONSTRAINTS[space]:
            raise InvalidInputError(f"constraint {constraint!r} is not available for {space}")
        self.mesh = mesh
        self.space = space
        self.constraint = constraint

        nt = mesh.n_triangles
        constrained_entities = None
        if space == "P0":
            self.ndofs = nt
            self.cell_dofs = np.arange(nt)[:, None]
        elif space == "P1":
            self.ndofs = mesh.n_vertices
            self.cell_dofs = mesh.triangles.copy()
            constrained_entities = mesh.boundary_vertices
        elif space == "RT0":
            self.ndofs = mesh.n_edges
            self.cell_dofs = mesh.triangle_edges.copy()
            constrained_entities = mesh.boundary_edges
        else:
            self.ndofs = 2 * mesh.n_edges
            te = mesh.triangle_edges
            self.cell_dofs = np.stack([2 * te, 2 * te + 1], axis=2).reshape(nt, 6)

        constrained = np.zeros(self.ndofs, dtype=bool)
        if constraint in ("zero-trace", "navier") and space in ("P1", "RT0"):
            constrained[:] = constrained_entities
        elif space == "CR" and constraint == "navier":
            constrained[0::2] = mesh.boundary_edges
        elif space == "CR" and constraint == "dirichlet":
            constrained[0::2] = mesh.boundary_edges
            constrained[1::2] = mesh.boundary_edges
        constrained.setflags(write=False)
        self.constrained = constrained
        self.free_dofs = np.flatnonzero(~constrained)
        self.cell_dofs.setflags(write=False)

    @property
    def nfree(self) -> int:
        return len(self.free_dofs)

    def __repr__(self) -> str:
        return f"DofMap({self.space}, {self.constraint}, ndofs={self.ndofs}, free={self.nfree})"


class FeFunction:
    """Конечноэлементная функция: DofMap и вектор коэффициентов."""

    def __init__(self, dofmap: DofMap, coefficients: Optional[np.ndarray] = None):
        self.dofmap = dofmap
        if coefficients is None:
            coefficients = np.zeros(dofmap.ndofs)
        coefficients = np.array(coefficients, dtype=float).reshape(-1)
        if len(coefficients) != dofmap.ndofs:
            raise InvalidInputError(
                f"{dofmap.space} function needs {dofmap.ndofs} coefficients, got {len(coefficients)}"
            )
        if np.any(coefficients[dofmap.constrained] != 0.0):
            raise InvalidInputError(f"constrained {dofmap.space} coefficients must vanish")
        self.coefficients = coefficients

    @property
    def space(self) -> str:
        return self.dofmap.space

    @property
    def mesh(self) -> Mesh:
        return self.dofmap.mesh

    def copy(self) -> "FeFunction":
        return FeFunction(self.dofmap, self.coefficients.copy())

    def __add__(self, other: "FeFunction") -> "FeFunction":
        self._check_compatible(other)
        return FeFunction(self.dofmap, self.coefficients + other.coefficients)

    def __sub__(self, other: "FeFunction") -> "FeFunction":
        self._check_compatible(other)
        return FeFunction(self.dofmap, self.coefficients - other.coefficients)

    def __mul__(self, scalar: float) -> "FeFunction":
        return FeFunction(self.dofmap, float(scalar) * self.coefficients)

    __rmul__ = __mul__

    def _check_compatible(self, other: "FeFunction") -> None:
        if self.dofmap.mesh is not other.dofmap.mesh or self.space != other.space:
            raise InvalidInputError(f"incompatible functions: {self.dofmap} and {other.dofmap}")

    def cell_coefficients(self) -> np.ndarray:
        return self.coefficients[self.dofmap.cell_dofs]

    def __repr__(self) -> str:
        return f"FeFunction({self.dofmap.space}, ndofs={self.dofmap.ndofs})"


def tangents(mesh: Mesh) -> np.ndarray:
    n = mesh.normals
    return np.column_stack([-n[:, 1], n[:, 0]])


def interpolate(space: DofMap, f: Callable, t: float = 0.0) -> FeFunction:
    """Интерполянт поля f(x, y, t) в пространстве ``space``.

    P0 - средние по треугольникам, CR - средние по ребрам компонент по
    (nu, tau), RT0 - потоки через ребра, P1 - значения в вершинах.
    Связанные степени свободы обнуляются.
    """
    mesh = space.mesh
    if space.space == "P0":
        values = element_means(mesh, f, order=4, t=t)
    elif space.space == "P1":
        values = evaluate_field(f, mesh.vertices, t)
    else:
        means = edge_means(mesh, f, n_points=3, t=t)
        if means.ndim != 2 or means.shape[1] != 2:
            raise InvalidInputError(f"{space.space} interpolation needs a vector field")
        normal = np.einsum("ed,ed->e", means, mesh.normals)
        if space.space == "RT0":
            values = normal * mesh.edge_lengths
        else:
            tangential = np.einsum("ed,ed->e", means, tangents(mesh))
            values = np.column_stack([normal, tangential]).ravel()
    values = np.array(values, dtype=float).reshape(-1)
    values[space.constrained] = 0.0
    return FeFunction(space, values)

"""Дискретный комплекс де Рама P1 -> RT0 -> P0 и разложение Ходжа."""
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np
import scipy.linalg

from .operators import (
    curl_of_p1,
    curl_pairing_matrix,
    div_matrix,
    divdiv_matrix,
    mass_matrix,
    stiffness_matrix,
)
from .quadrature import integrate, physical_points, triangle_rule
from .spaces import DofMap, FeFunction, tangents
from ..linalg.sparse import restrict, solve
from ..mesh.triangulation import Mesh
from ..utils.errors import InvalidInputError, SolverFailureError
from ..utils.logger import setup_logger

logger = setup_logger(__name__)


def _curl_matrix(velocity: DofMap, vorticity: DofMap) -> np.ndarray:
    """Матрица отображения curl: P1 -> RT0 на всех степенях свободы (плотная)."""
    mesh = velocity.mesh
    lo, hi = mesh.edges[:, 0], mesh.edges[:, 1]
    direction = np.sign(np.einsum("ed,ed->e", tangents(mesh), mesh.vertices[hi] - mesh.vertices[lo]))
    matrix = np.zeros((velocity.ndofs, vorticity.ndofs))
    rows = np.arange(mesh.n_edges)
    matrix[rows, hi] += direction
    matrix[rows, lo] -= direction
    return matrix


def hodge_decompose(v: FeFunction, tol: float = 1e-12) -> Tuple[FeFunction, FeFunction]:
    """Разложение v = curl s + v_perp, v_perp ортогонально curl W_h в L2.

    s находится из (curl s, curl t) = (v, curl t) для всех t из P1 с нулевым следом.
    """
    if v.space != "RT0" or v.dofmap.constraint != "navier":
        raise InvalidInputError(f"hodge_decompose needs a Navier-constrained RT0 function, got {v.dofmap}")
    mesh = v.mesh
    scalar = DofMap(mesh, "P1", "zero-trace")
    s = FeFunction(scalar)
    if scalar.nfree:
        K = restrict(stiffness_matrix(scalar), scalar.free_dofs)
        R = curl_pairing_matrix(DofMap(mesh, "RT0"), scalar)
        rhs = (R.T @ v.coefficients)[scalar.free_dofs]
        try:
            values, _ = solve(K, rhs, method="direct", tol=tol)
        except SolverFailureError as e:
            raise SolverFailureError(f"Hodge projection system is singular: {e}", e.report) from e
        s.coefficients[scalar.free_dofs] = values
    curl_s = curl_of_p1(s)
    v_perp = FeFunction(v.dofmap, v.coefficients - curl_s.coefficients)
    return s, v_perp


def l2_inner(u: FeFunction, v: FeFunction) -> float:
    """Скалярное произведение L2 двух функций одного пространства."""
    M = mass_matrix(DofMap(u.mesh, u.space))
    return float(u.coefficients @ (M @ v.coefficients))


@dataclass
class SpaceDimensions:
    """Размерности пространств комплекса и проверка точности."""
    dim_p1: int
    dim_rt0: int
    dim_p0: int
    rank_div: int
    rank_curl: int
    div_curl_norm: float
    checks: Dict[str, bool] = field(default_factory=dict)

    @property
    def exact(self) -> bool:
        return all(self.checks.values())

    @property
    def dim_perp(self) -> int:
        return self.dim_rt0 - self.rank_curl


def space_dimensions(mesh: Mesh, constraint: str = "navier") -> SpaceDimensions:
    """Размерности P1, RT0, P0, ранги div и curl и проверка точности последовательности."""
    if constraint not in ("navier", "none"):
        raise InvalidInputError(f"unknown constraint mode {constraint!r}")
    scalar = DofMap(mesh, "P1", "zero-trace" if constraint == "navier" else "none")
    velocity = DofMap(mesh, "RT0", constraint)

    div = div_matrix(velocity).toarray()[:, velocity.free_dofs]
    curl = _curl_matrix(velocity, scalar)[np.ix_(velocity.free_dofs, scalar.free_dofs)]
    rank_div = int(np.linalg.matrix_rank(div)) if div.size else 0
    rank_curl = int(np.linalg.matrix_rank(curl)) if curl.size else 0
    product = div @ curl if curl.size else np.zeros((mesh.n_triangles, 0))
    div_curl_norm = float(np.abs(product).max()) if product.size else 0.0

    nt = mesh.n_triangles
    dims = SpaceDimensions(
        dim_p1=scalar.nfree,
        dim_rt0=velocity.nfree,
        dim_p0=nt,
        rank_div=rank_div,
        rank_curl=rank_curl,
        div_curl_norm=div_curl_norm,
    )
    kernel_div = velocity.nfree - rank_div
    dims.checks["div_curl_zero"] = div_curl_norm <= 1e-12
    dims.checks["kernel_div_equals_image_curl"] = kernel_div == rank_curl
    dims.checks["curl_plus_perp_is_full"] = rank_curl + dims.dim_perp == velocity.nfree
    if constraint == "navier":
        # образ div - функции P0 с нулевым средним
        column_means = np.abs(div.sum(axis=0)).max() if div.size else 0.0
        dims.checks["curl_injective"] = rank_curl == scalar.nfree
        dims.checks["image_div_mean_zero"] = rank_div == nt - 1 and column_means <= 1e-12
    else:
        dims.checks["image_div_surjective"] = rank_div == nt
    logger.debug(f"de Rham dimensions on {mesh}: {dims}")
    return dims


def discrete_poincare_constant(mesh: Mesh) -> float:
    """Наименьшее собственное значение (div v, div v) = l (v, v) на V^{0,perp}."""
    velocity = DofMap(mesh, "RT0", "navier")
    free = velocity.free_dofs
    D = restrict(divdiv_matrix(velocity), free).toarray()
    M = restrict(mass_matrix(velocity), free).toarray()
    eigenvalues = scipy.linalg.eigh(D, M, eigvals_only=True)
    # ядро div совпадает с curl W_h, его размерность - число внутренних вершин
    kernel = int((~mesh.boundary_vertices).sum())
    return float(np.sort(eigenvalues)[kernel])


def laplace_identity_defect(mesh: Mesh, grad_u, grad_v, order: int = 8) -> float:
    """|int Du:Dv - int (curl u curl v + div u div v)| для полей с нулевым следом.

    grad_u, grad_v - функции (x, y) -> массив (..., 2, 2), J[i, j] = d u_i / d x_j.
    """
    rule = triangle_rule(order)
    pts = physical_points(mesh, rule)
    Ju = np.asarray(grad_u(pts[..., 0], pts[..., 1]))
    Jv = np.asarray(grad_v(pts[..., 0], pts[..., 1]))
    full = np.einsum("tqij,tqij->tq", Ju, Jv)
    div_u = Ju[..., 0, 0] + Ju[..., 1, 1]
    div_v = Jv[..., 0, 0] + Jv[..., 1, 1]
    curl_u = Ju[..., 1, 0] - Ju[..., 0, 1]
    curl_v = Jv[..., 1, 0] - Jv[..., 0, 1]
    split = curl_u * curl_v + div_u * div_v
    return float(abs(integrate(mesh, full - split, rule).sum()))

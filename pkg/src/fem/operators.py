"""Базисные функции, поэлементные операторы и матрицы пространств."""
from typing import Optional

import numpy as np

from .quadrature import integrate, triangle_rule
from .spaces import DofMap, FeFunction, tangents
from ..linalg.sparse import SparseMatrix, assemble_local, assemble_vector
from ..utils.errors import InvalidInputError


def _cells(dofmap: DofMap, cells: Optional[np.ndarray]) -> np.ndarray:
    return np.arange(dofmap.mesh.n_triangles) if cells is None else np.asarray(cells)


def basis_values(dofmap: DofMap, bary: np.ndarray, cells: Optional[np.ndarray] = None) -> np.ndarray:
    """Значения локальных базисных функций, (n, nloc, nq, ncomp).

    ``bary`` - барицентрические координаты формы (nq, 3) или (n, nq, 3).
    """
    mesh = dofmap.mesh
    cells = _cells(dofmap, cells)
    n = len(cells)
    bary = np.broadcast_to(np.asarray(bary, dtype=float), (n,) + np.shape(bary)[-2:])
    nq = bary.shape[1]

    if dofmap.space == "P0":
        return np.ones((n, 1, nq, 1))
    if dofmap.space == "P1":
        return np.transpose(bary, (0, 2, 1))[..., None].copy()
    if dofmap.space == "RT0":
        corners = mesh.vertices[mesh.triangles[cells]]
        x = np.einsum("nqk,nkd->nqd", bary, corners)
        scale = mesh.edge_signs[cells] / (2.0 * mesh.areas[cells])[:, None]
        return scale[:, :, None, None] * (x[:, None, :, :] - corners[:, :, None, :])

    edges = mesh.triangle_edges[cells]
    phi = 1.0 - 2.0 * np.transpose(bary, (0, 2, 1))
    frames = np.stack([mesh.normals[edges], tangents(mesh)[edges]], axis=2)
    values = phi[:, :, None, :, None] * frames[:, :, :, None, :]
    return values.reshape(n, 6, nq, 2)


def basis_div(dofmap: DofMap, cells: Optional[np.ndarray] = None) -> np.ndarray:
    """Поэлементная дивергенция базисных функций CR/RT0, (n, nloc)."""
    mesh = dofmap.mesh
    cells = _cells(dofmap, cells)
    if dofmap.space == "RT0":
        return mesh.edge_signs[cells] / mesh.areas[cells][:, None]
    if dofmap.space == "CR":
        grads = -2.0 * mesh.barycentric_gradients[cells]
        edges = mesh.triangle_edges[cells]
        div_n = np.einsum("nid,nid->ni", grads, mesh.normals[edges])
        div_t = np.einsum("nid,nid->ni", grads, tangents(mesh)[edges])
        return np.stack([div_n, div_t], axis=2).reshape(len(cells), 6)
    raise InvalidInputError(f"divergence is defined for CR and RT0, not {dofmap.space}")


def basis_curl(dofmap: DofMap, cells: Optional[np.ndarray] = None) -> np.ndarray:
    """Поэлементный скалярный ротор d_x u2 - d_y u1 базисных функций, (n, nloc)."""
    mesh = dofmap.mesh
    cells = _cells(dofmap, cells)
    if dofmap.space == "RT0":
        return np.zeros((len(cells), 3))
    if dofmap.space == "CR":
        grads = -2.0 * mesh.barycentric_gradients[cells]
        edges = mesh.triangle_edges[cells]

        def rot(frame):
            return grads[..., 0] * frame[..., 1] - grads[..., 1] * frame[..., 0]

        curl_n = rot(mesh.normals[edges])
        curl_t = rot(tangents(mesh)[edges])
        return np.stack([curl_n, curl_t], axis=2).reshape(len(cells), 6)
    raise InvalidInputError(f"scalar curl is defined for CR and RT0, not {dofmap.space}")


def p1_vector_curl(dofmap: DofMap) -> np.ndarray:
    """Векторный ротор (d_y w, -d_x w) базисных функций P1, (nt, 3, 2)."""
    if dofmap.space != "P1":
        raise InvalidInputError(f"vector curl is defined for P1, not {dofmap.space}")
    g = dofmap.mesh.barycentric_gradients
    return np.stack([g[..., 1], -g[..., 0]], axis=-1)


def evaluate(u: FeFunction, bary: np.ndarray, cells: Optional[np.ndarray] = None) -> np.ndarray:
    """Значения функции в точках, заданных барицентрически, (n, nq, ncomp)."""
    cells = _cells(u.dofmap, cells)
    values = basis_values(u.dofmap, bary, cells)
    coeffs = u.coefficients[u.dofmap.cell_dofs[cells]]
    return np.einsum("nl,nlqc->nqc", coeffs, values)


def elementwise_div(u: FeFunction) -> FeFunction:
    """Дивергенция внутри каждого треугольника (P0)."""
    if u.space not in ("CR", "RT0"):
        raise InvalidInputError(f"elementwise_div needs a CR or RT0 function, got {u.space}")
    values = np.einsum("nl,nl->n", u.cell_coefficients(), basis_div(u.dofmap))
    return FeFunction(DofMap(u.mesh, "P0"), values)


def elementwise_curl(u: FeFunction) -> FeFunction:
    """Скалярный ротор внутри каждого треугольника (P0)."""
    if u.space != "CR":
        raise InvalidInputError(f"elementwise_curl needs a CR function, got {u.space}")
    values = np.einsum("nl,nl->n", u.cell_coefficients(), basis_curl(u.dofmap))
    return FeFunction(DofMap(u.mesh, "P0"), values)


def curl_of_p1(w: FeFunction) -> FeFunction:
    """Векторный ротор функции P1 как функция RT0.

    Степень свободы ребра равна приращению w вдоль tau = (-nu_y, nu_x).
    """
    if w.space != "P1":
        raise InvalidInputError(f"curl_of_p1 needs a P1 function, got {w.space}")
    mesh = w.mesh
    lo, hi = mesh.edges[:, 0], mesh.edges[:, 1]
    direction = np.sign(np.einsum("ed,ed->e", tangents(mesh), mesh.vertices[hi] - mesh.vertices[lo]))
    values = direction * (w.coefficients[hi] - w.coefficients[lo])
    constraint = "navier" if w.dofmap.constraint == "zero-trace" else "none"
    space = DofMap(mesh, "RT0", constraint)
    values[space.constrained] = 0.0
    return FeFunction(space, values)


def mass_matrix(dofmap: DofMap, order: int = 4) -> SparseMatrix:
    """Матрица масс L2 на всем пространстве."""
    rule = triangle_rule(order)
    phi = basis_values(dofmap, rule.points)
    local = np.einsum("tiqc,tjqc,q,t->tij", phi, phi, rule.weights, dofmap.mesh.areas)
    return assemble_local(dofmap.cell_dofs, dofmap.cell_dofs, local, (dofmap.ndofs, dofmap.ndofs))


def divdiv_matrix(dofmap: DofMap) -> SparseMatrix:
    """(div_h u, div_h v)."""
    d = basis_div(dofmap)
    local = dofmap.mesh.areas[:, None, None] * d[:, :, None] * d[:, None, :]
    return assemble_local(dofmap.cell_dofs, dofmap.cell_dofs, local, (dofmap.ndofs, dofmap.ndofs))


def curlcurl_matrix(dofmap: DofMap) -> SparseMatrix:
    """(curl_h u, curl_h v) для CR."""
    c = basis_curl(dofmap)
    local = dofmap.mesh.areas[:, None, None] * c[:, :, None] * c[:, None, :]
    return assemble_local(dofmap.cell_dofs, dofmap.cell_dofs, local, (dofmap.ndofs, dofmap.ndofs))


def div_matrix(dofmap: DofMap) -> SparseMatrix:
    """B[E, j] = int_E div phi_j, форма (nt, ndofs)."""
    mesh = dofmap.mesh
    local = (mesh.areas[:, None] * basis_div(dofmap))[:, None, :]
    rows = np.arange(mesh.n_triangles)[:, None]
    return assemble_local(rows, dofmap.cell_dofs, local, (mesh.n_triangles, dofmap.ndofs))


def curl_pairing_matrix(velocity: DofMap, vorticity: DofMap, order: int = 4) -> SparseMatrix:
    """R[v, eta] = int curl(eta) . psi_v для RT0 x P1."""
    if velocity.space != "RT0" or vorticity.space != "P1":
        raise InvalidInputError("curl pairing is defined between RT0 and P1")
    rule = triangle_rule(order)
    psi = basis_values(velocity, rule.points)
    curl = p1_vector_curl(vorticity)
    local = np.einsum("tiqc,tjc,q,t->tij", psi, curl, rule.weights, velocity.mesh.areas)
    return assemble_local(velocity.cell_dofs, vorticity.cell_dofs, local, (velocity.ndofs, vorticity.ndofs))


def stiffness_matrix(dofmap: DofMap) -> SparseMatrix:
    """(grad w, grad eta) = (curl w, curl eta) для P1."""
    if dofmap.space != "P1":
        raise InvalidInputError(f"stiffness matrix is defined for P1, not {dofmap.space}")
    g = dofmap.mesh.barycentric_gradients
    local = np.einsum("tid,tjd,t->tij", g, g, dofmap.mesh.areas)
    return assemble_local(dofmap.cell_dofs, dofmap.cell_dofs, local, (dofmap.ndofs, dofmap.ndofs))


def pressure_load(dofmap: DofMap, p: np.ndarray) -> np.ndarray:
    """Вектор int p div_h phi_i для кусочно-постоянного p."""
    mesh = dofmap.mesh
    p = np.asarray(p, dtype=float).reshape(-1)
    if len(p) != mesh.n_triangles:
        raise InvalidInputError(f"pressure needs {mesh.n_triangles} element values, got {len(p)}")
    local = (mesh.areas * p)[:, None] * basis_div(dofmap)
    return assemble_vector(dofmap.cell_dofs, local, dofmap.ndofs)


def force_load(dofmap: DofMap, f: np.ndarray, order: int = 4) -> np.ndarray:
    """Вектор int f . phi_i для кусочно-постоянной силы f (nt, 2)."""
    mesh = dofmap.mesh
    f = np.asarray(f, dtype=float).reshape(mesh.n_triangles, 2)
    rule = triangle_rule(order)
    phi = basis_values(dofmap, rule.points)
    mean_phi = np.einsum("tiqc,q->tic", phi, rule.weights)
    local = mesh.areas[:, None] * np.einsum("tic,tc->ti", mean_phi, f)
    return assemble_vector(dofmap.cell_dofs, local, dofmap.ndofs)


def l2_norm(u: FeFunction, order: int = 4) -> float:
    """Норма L2 функции любого из пространств."""
    rule = triangle_rule(order)
    values = evaluate(u, rule.points)
    return float(np.sqrt(integrate(u.mesh, np.sum(values ** 2, axis=-1), rule).sum()))


def l2_error(u: FeFunction, exact, t: float = 0.0, order: int = 4) -> float:
    """Ошибка ||u - exact||_L2, exact(x, y, t) скалярная или векторная."""
    from .quadrature import evaluate_field, physical_points

    rule = triangle_rule(order)
    values = evaluate(u, rule.points)
    reference = evaluate_field(exact, physical_points(u.mesh, rule), t)
    reference = reference.reshape(values.shape)
    return float(np.sqrt(integrate(u.mesh, np.sum((values - reference) ** 2, axis=-1), rule).sum()))

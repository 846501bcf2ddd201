"""Конформные треугольные сетки с фиксированными нормалями ребер."""
from typing import Dict, NamedTuple, Optional, Tuple

import numpy as np
from scipy.spatial import cKDTree

from ..utils.errors import InvalidInputError
from ..utils.logger import setup_logger

logger = setup_logger(__name__)


class MeshStatistics(NamedTuple):
    h_max: float
    shape_regularity: float
    counts: Tuple[int, int, int]


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array)
    array.setflags(write=False)
    return array


class Mesh:
    """Треугольная сетка.

    Ребро ``e`` ориентировано от меньшего номера вершины к большему; нормаль
    ``normals[e]`` получена поворотом касательной на -90 градусов. Для
    внутреннего ребра ``edge_elements[e] = (E-, E+)``, нормаль направлена из
    E- в E+. Для граничного ребра нормаль внешняя, ``E+ = -1``.
    Локальное ребро ``i`` треугольника лежит напротив его вершины ``i``.
    """

    def __init__(self, vertices: np.ndarray, triangles: np.ndarray):
        vertices = np.asarray(vertices, dtype=float)
        triangles = np.asarray(triangles, dtype=np.int64)
        if vertices.ndim != 2 or vertices.shape[1] != 2:
            raise InvalidInputError("vertices must have shape (n, 2)")
        if triangles.ndim != 2 or triangles.shape[1] != 3 or len(triangles) == 0:
            raise InvalidInputError("triangles must have shape (m, 3), m >= 1")
        if triangles.min() < 0 or triangles.max() >= len(vertices):
            raise InvalidInputError("triangle vertex index out of range")

        p0, p1, p2 = (vertices[triangles[:, k]] for k in range(3))
        signed = 0.5 * ((p1[:, 0] - p0[:, 0]) * (p2[:, 1] - p0[:, 1])
                        - (p1[:, 1] - p0[:, 1]) * (p2[:, 0] - p0[:, 0]))
        if np.any(signed <= 0):
            bad = int(np.argmax(signed <= 0))
            raise InvalidInputError(f"triangle {bad} is degenerate or not counterclockwise")

        self.vertices = _frozen(vertices)
        self.triangles = _frozen(triangles)
        self.areas = _frozen(signed)
        self.centroids = _frozen((p0 + p1 + p2) / 3.0)
        self._build_edges()
        self._build_geometry()

    def _build_edges(self) -> None:
        tri = self.triangles
        nt = len(tri)
        local = np.stack([tri[:, [1, 2]], tri[:, [2, 0]], tri[:, [0, 1]]], axis=1)
        pairs = np.sort(local.reshape(-1, 2), axis=1)
        edges, inverse, counts = np.unique(pairs, axis=0, return_inverse=True, return_counts=True)
        inverse = inverse.reshape(-1)
        if np.any(counts > 2):
            raise InvalidInputError("non-manifold triangulation: an edge is shared by more than two triangles")

        ne = len(edges)
        owners = np.repeat(np.arange(nt), 3)
        tangent = self.vertices[edges[:, 1]] - self.vertices[edges[:, 0]]
        lengths = np.hypot(tangent[:, 0], tangent[:, 1])
        normals = np.stack([tangent[:, 1], -tangent[:, 0]], axis=1) / lengths[:, None]
        midpoints = 0.5 * (self.vertices[edges[:, 0]] + self.vertices[edges[:, 1]])

        # +1, если фиксированная нормаль внешняя для треугольника-владельца
        outward = np.einsum("ij,ij->i", normals[inverse], midpoints[inverse] - self.centroids[owners]) > 0

        boundary = counts == 1
        edge_elements = np.full((ne, 2), -1, dtype=np.int64)
        for slot, (edge, owner, out) in enumerate(zip(inverse, owners, outward)):
            if boundary[edge]:
                edge_elements[edge, 0] = owner
                if not out:
                    normals[edge] = -normals[edge]
            else:
                edge_elements[edge, 0 if out else 1] = owner
        if np.any(edge_elements[~boundary] < 0):
            raise InvalidInputError("inconsistent orientation: interior edge with two triangles on one side")

        triangle_edges = inverse.reshape(nt, 3)
        signs = np.where(edge_elements[triangle_edges, 0] == np.arange(nt)[:, None], 1.0, -1.0)

        self.edges = _frozen(edges)
        self.edge_lengths = _frozen(lengths)
        self.normals = _frozen(normals)
        self.edge_midpoints = _frozen(midpoints)
        self.edge_elements = _frozen(edge_elements)
        self.boundary_edges = _frozen(boundary)
        self.triangle_edges = _frozen(triangle_edges)
        self.edge_signs = _frozen(signs)
        boundary_vertices = np.zeros(len(self.vertices), dtype=bool)
        boundary_vertices[edges[boundary].ravel()] = True
        self.boundary_vertices = _frozen(boundary_vertices)

    def _build_geometry(self) -> None:
        p = self.vertices[self.triangles]
        # градиенты барицентрических координат, (nt, 3, 2)
        grads = np.empty((len(self.triangles), 3, 2))
        for i in range(3):
            j, k = (i + 1) % 3, (i + 2) % 3
            d = p[:, k] - p[:, j]
            grads[:, i, 0] = -d[:, 1]
            grads[:, i, 1] = d[:, 0]
        grads /= (2.0 * self.areas)[:, None, None]
        self.barycentric_gradients = _frozen(grads)

        side = np.linalg.norm(p[:, [1, 2, 0]] - p[:, [2, 0, 1]], axis=2)
        diameters = side.max(axis=1)
        inradius = 2.0 * self.areas / side.sum(axis=1)
        self.diameters = _frozen(diameters)
        self.h_max = float(diameters.max())
        self.shape_regularity = float((inradius / diameters).min())
        self.total_area = float(self.areas.sum())
        self._tree: Optional[cKDTree] = None

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def interior_edges(self) -> np.ndarray:
        return np.flatnonzero(~self.boundary_edges)

    def barycentric(self, tri: np.ndarray, points: np.ndarray) -> np.ndarray:
        """Барицентрические координаты точек ``points`` в треугольниках ``tri``."""
        tri = np.asarray(tri)
        points = np.asarray(points, dtype=float)
        p0 = self.vertices[self.triangles[tri, 0]]
        grads = self.barycentric_gradients[tri]
        lam12 = np.einsum("...ij,...j->...i", grads[..., 1:, :], points - p0)
        return np.concatenate([1.0 - lam12.sum(axis=-1, keepdims=True), lam12], axis=-1)

    def locate(self, points: np.ndarray, candidates: int = 12, tol: float = 1e-12) -> np.ndarray:
        """Номер треугольника, содержащего точку, или -1 вне области."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if self._tree is None:
            self._tree = cKDTree(self.centroids)
        k = min(candidates, self.n_triangles)
        _, near = self._tree.query(points, k=k)
        near = near.reshape(len(points), k)
        found = np.full(len(points), -1, dtype=np.int64)
        for column in range(k):
            todo = found < 0
            if not todo.any():
                break
            tri = near[todo, column]
            lam = self.barycentric(tri, points[todo])
            inside = lam.min(axis=1) >= -tol
            idx = np.flatnonzero(todo)[inside]
            found[idx] = tri[inside]
        # ближайшие центроиды могут пропустить вытянутые треугольники
        lower = self.vertices.min(axis=0) - tol
        upper = self.vertices.max(axis=0) + tol
        boxed = np.all((points >= lower) & (points <= upper), axis=1)
        all_triangles = np.arange(self.n_triangles)
        for i in np.flatnonzero((found < 0) & boxed):
            lam = self.barycentric(all_triangles, np.broadcast_to(points[i], (self.n_triangles, 2)))
            hits = np.flatnonzero(lam.min(axis=1) >= -tol)
            if hits.size:
                found[i] = hits[0]
        return found

    def statistics(self) -> MeshStatistics:
        return mesh_statistics(self)

    def __repr__(self) -> str:
        return (f"Mesh(vertices={self.n_vertices}, edges={self.n_edges}, "
                f"triangles={self.n_triangles}, h_max={self.h_max:.4g})")


def build_structured(
    nx: int,
    ny: int,
    domain: Tuple[float, float, float, float] = (0.0, 1.0, 0.0, 1.0),
) -> Mesh:
    """Равномерная сетка прямоугольника, каждая ячейка делится диагональю (x0,y0)-(x1,y1)."""
    x0, x1, y0, y1 = (float(v) for v in domain)
    if nx < 1 or ny < 1:
        raise InvalidInputError(f"cell counts must be >= 1, got nx={nx}, ny={ny}")
    if not (x1 > x0 and y1 > y0):
        raise InvalidInputError(f"degenerate rectangle {domain}")

    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)
    gx, gy = np.meshgrid(xs, ys)
    vertices = np.column_stack([gx.ravel(), gy.ravel()])

    i, j = np.meshgrid(np.arange(nx), np.arange(ny))
    v00 = (j * (nx + 1) + i).ravel()
    v10 = v00 + 1
    v01 = v00 + nx + 1
    v11 = v01 + 1
    lower = np.column_stack([v00, v10, v11])
    upper = np.column_stack([v00, v11, v01])
    triangles = np.stack([lower, upper], axis=1).reshape(-1, 3)

    mesh = Mesh(vertices, triangles)
    logger.debug(f"Built structured mesh {nx}x{ny}: {mesh}")
    return mesh


def refine_uniform(mesh: Mesh) -> Mesh:
    """Делит каждый треугольник на четыре подобных через середины ребер."""
    nv = mesh.n_vertices
    vertices = np.vstack([mesh.vertices, mesh.edge_midpoints])
    tri = mesh.triangles
    # середина ребра напротив вершины i имеет номер nv + triangle_edges[:, i]
    m = nv + mesh.triangle_edges
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    m_bc, m_ca, m_ab = m[:, 0], m[:, 1], m[:, 2]
    children = np.stack([
        np.column_stack([a, m_ab, m_ca]),
        np.column_stack([m_ab, b, m_bc]),
        np.column_stack([m_ca, m_bc, c]),
        np.column_stack([m_ab, m_bc, m_ca]),
    ], axis=1).reshape(-1, 3)
    refined = Mesh(vertices, children)
    logger.debug(f"Refined {mesh} -> {refined}")
    return refined


def mesh_statistics(mesh: Mesh) -> MeshStatistics:
    """h_max, показатель регулярности и (вершины, ребра, треугольники)."""
    return MeshStatistics(
        h_max=mesh.h_max,
        shape_regularity=mesh.shape_regularity,
        counts=(mesh.n_vertices, mesh.n_edges, mesh.n_triangles),
    )


def describe(mesh: Mesh) -> Dict[str, float]:
    """Сводка для CLI (mesh-info)."""
    stats = mesh_statistics(mesh)
    nv, ne, nt = stats.counts
    return {
        "vertices": nv,
        "edges": ne,
        "triangles": nt,
        "boundary_edges": int(mesh.boundary_edges.sum()),
        "h_max": stats.h_max,
        "shape_regularity": stats.shape_regularity,
        "euler_characteristic": nv - ne + nt,
        "area": mesh.total_area,
    }

"""Тесты сеток: построение, измельчение, статистика, текстовый формат."""
import math

import numpy as np
import pytest

from src.mesh import (
    Mesh,
    build_structured,
    describe,
    mesh_statistics,
    parse_mesh,
    read_mesh,
    refine_uniform,
    write_mesh,
)
from src.utils.errors import InvalidInputError


def test_smallest_structured_mesh(unit_square):
    stats = mesh_statistics(unit_square)
    assert stats.counts == (4, 5, 2)
    assert stats.h_max == pytest.approx(math.sqrt(2))
    assert stats.shape_regularity == pytest.approx((1 - math.sqrt(2) / 2) / math.sqrt(2))
    assert stats.shape_regularity == pytest.approx(0.2071, abs=1e-4)


def test_structured_counts_match_formula():
    nx, ny = 3, 2
    mesh = build_structured(nx, ny)
    assert mesh.n_vertices == (nx + 1) * (ny + 1)
    assert mesh.n_edges == 3 * nx * ny + nx + ny
    assert mesh.n_triangles == 2 * nx * ny
    assert build_structured(2, 2).statistics().counts == (9, 16, 8)


def test_degenerate_rectangle_rejected():
    with pytest.raises(InvalidInputError):
        build_structured(1, 1, (0.0, 0.0, 0.0, 1.0))
    with pytest.raises(InvalidInputError):
        build_structured(0, 1)


def test_edge_orientation_and_normals(mesh2):
    lo, hi = mesh2.edges[:, 0], mesh2.edges[:, 1]
    assert np.all(lo < hi)
    assert np.allclose(np.linalg.norm(mesh2.normals, axis=1), 1.0)
    # внутреннее ребро: нормаль направлена из E- в E+
    for e in mesh2.interior_edges:
        minus, plus = mesh2.edge_elements[e]
        assert np.dot(mesh2.normals[e], mesh2.centroids[plus] - mesh2.centroids[minus]) > 0
    # граничное ребро: нормаль внешняя
    for e in np.flatnonzero(mesh2.boundary_edges):
        owner = mesh2.edge_elements[e, 0]
        assert mesh2.edge_elements[e, 1] == -1
        assert np.dot(mesh2.normals[e], mesh2.edge_midpoints[e] - mesh2.centroids[owner]) > 0


def test_local_edge_is_opposite_vertex(mesh2):
    for t, tri in enumerate(mesh2.triangles):
        for i in range(3):
            edge = mesh2.edges[mesh2.triangle_edges[t, i]]
            assert tri[i] not in edge


def test_outward_sign_sums_to_boundary_integral(mesh2):
    # sum_G sigma |G| nu_G = 0 для каждого треугольника
    flux = mesh2.edge_signs[:, :, None] * (mesh2.edge_lengths[:, None] * mesh2.normals)[mesh2.triangle_edges]
    assert np.allclose(flux.sum(axis=1), 0.0, atol=1e-14)


def test_refinement_halves_diameter(unit_square):
    once = refine_uniform(unit_square)
    twice = refine_uniform(once)
    assert once.n_triangles == 8
    assert once.h_max == pytest.approx(math.sqrt(2) / 2)
    assert twice.n_triangles == 32
    assert twice.h_max == pytest.approx(math.sqrt(2) / 4)
    assert twice.total_area == pytest.approx(1.0)


def test_clockwise_triangle_rejected():
    with pytest.raises(InvalidInputError):
        Mesh([[0, 0], [1, 0], [0, 1]], [[0, 2, 1]])


def test_non_manifold_rejected():
    vertices = [[0, 0], [1, 0], [0, 1], [1, 1], [0.5, -1]]
    triangles = [[0, 1, 2], [1, 3, 2], [0, 4, 1], [0, 1, 3]]
    with pytest.raises(InvalidInputError):
        Mesh(vertices, triangles)


def test_locate_points(mesh2):
    inside = mesh2.locate(mesh2.centroids)
    assert np.array_equal(inside, np.arange(mesh2.n_triangles))
    assert mesh2.locate(np.array([[1.5, 0.5]]))[0] == -1


def test_locate_falls_back_to_full_scan(mesh4, rng):
    points = rng.uniform(0.0, 1.0, (200, 2))
    found = mesh4.locate(points, candidates=1)
    assert np.all(found >= 0)
    lam = mesh4.barycentric(found, points)
    assert lam.min() >= -1e-12
    outside = mesh4.locate(np.array([[-0.5, 0.5], [0.5, 1.5]]), candidates=1)
    assert np.array_equal(outside, [-1, -1])


def test_locate_on_anisotropic_mesh(rng):
    mesh = build_structured(1, 40, (0.0, 100.0, 0.0, 1.0))
    points = np.column_stack([rng.uniform(0.0, 100.0, 300), rng.uniform(0.0, 1.0, 300)])
    found = mesh.locate(points)
    assert np.all(found >= 0)
    assert mesh.barycentric(found, points).min() >= -1e-10


def test_describe_reports_euler_characteristic(mesh2):
    info = describe(mesh2)
    assert info["euler_characteristic"] == 1
    assert info["boundary_edges"] == 8
    assert info["area"] == pytest.approx(1.0)


def test_mesh_text_round_trip(tmp_path, mesh2):
    path = write_mesh(mesh2, tmp_path / "square.mesh")
    loaded = read_mesh(path)
    assert np.array_equal(loaded.vertices, mesh2.vertices)
    assert np.array_equal(loaded.triangles, mesh2.triangles)


def test_parse_mesh_reports_line():
    text = "# unit triangle\nvertices 3\n0 0\n1 0\n0 oops\ntriangles 1\n0 1 2\n"
    with pytest.raises(InvalidInputError, match="line 5"):
        parse_mesh(text)

"""Треугольные сетки."""
from .triangulation import Mesh, MeshStatistics, build_structured, refine_uniform, mesh_statistics, describe
from .mesh_io import parse_mesh, read_mesh, write_mesh, format_mesh

__all__ = [
    "Mesh",
    "MeshStatistics",
    "build_structured",
    "refine_uniform",
    "mesh_statistics",
    "describe",
    "parse_mesh",
    "read_mesh",
    "write_mesh",
    "format_mesh",
]

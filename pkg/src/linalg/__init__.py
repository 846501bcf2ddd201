"""Разреженная линейная алгебра."""
from .sparse import (
    SparseMatrix,
    LinearSolveReport,
    assemble,
    assemble_local,
    assemble_vector,
    restrict,
    solve,
    solve_constrained,
)

__all__ = [
    "SparseMatrix",
    "LinearSolveReport",
    "assemble",
    "assemble_local",
    "assemble_vector",
    "restrict",
    "solve",
    "solve_constrained",
]

"""Сборка разреженных матриц и линейные решатели."""
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sparse
from scipy.sparse.linalg import LinearOperator, cg, splu

from ..utils.errors import InvalidInputError, SolverFailureError
from ..utils.logger import setup_logger

logger = setup_logger(__name__)

SparseMatrix = sparse.csr_matrix
Triplets = Union[Iterable[Tuple[int, int, float]], Tuple[np.ndarray, np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class LinearSolveReport:
    """Итог линейного решения."""
    residual: float
    relative_residual: float
    iterations: int
    success: bool
    method: str = "direct"


def _as_arrays(triplets: Triplets) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    if isinstance(triplets, tuple) and len(triplets) == 3 and all(isinstance(t, np.ndarray) for t in triplets):
        rows, cols, values = triplets
    else:
        data = list(triplets)
        if not data:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64), np.zeros(0)
        rows, cols, values = (np.array(v) for v in zip(*data))
    rows = np.asarray(rows, dtype=np.int64).ravel()
    cols = np.asarray(cols, dtype=np.int64).ravel()
    values = np.asarray(values, dtype=float).ravel()
    if not (len(rows) == len(cols) == len(values)):
        raise InvalidInputError("triplet arrays must have equal length")
    return rows, cols, values


def assemble(triplets: Triplets, shape: Tuple[int, int]) -> SparseMatrix:
    """CSR-матрица из троек (i, j, v); повторы суммируются в фиксированном порядке."""
    n_rows, n_cols = shape
    rows, cols, values = _as_arrays(triplets)
    if len(rows) and (rows.min() < 0 or rows.max() >= n_rows or cols.min() < 0 or cols.max() >= n_cols):
        raise InvalidInputError(f"triplet index out of range for shape {shape}")

    # сортировка и по значению делает сумму независимой от порядка троек
    order = np.lexsort((values, cols, rows))
    rows, cols, values = rows[order], cols[order], values[order]
    if len(rows):
        new = np.empty(len(rows), dtype=bool)
        new[0] = True
        new[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
        starts = np.flatnonzero(new)
        summed = np.add.reduceat(values, starts)
        rows, cols = rows[starts], cols[starts]
    else:
        summed = values
    indptr = np.zeros(n_rows + 1, dtype=np.int64)
    np.add.at(indptr, rows + 1, 1)
    np.cumsum(indptr, out=indptr)
    matrix = sparse.csr_matrix((summed, cols, indptr), shape=(n_rows, n_cols))
    matrix.has_sorted_indices = True
    return matrix


def assemble_local(
    cell_rows: np.ndarray,
    cell_cols: np.ndarray,
    local: np.ndarray,
    shape: Tuple[int, int],
) -> SparseMatrix:
    """Сборка поэлементных блоков local[c, i, j] в позиции (cell_rows[c, i], cell_cols[c, j])."""
    rows = np.broadcast_to(cell_rows[:, :, None], local.shape)
    cols = np.broadcast_to(cell_cols[:, None, :], local.shape)
    return assemble((rows.ravel(), cols.ravel(), local.ravel()), shape)


def assemble_vector(cell_rows: np.ndarray, local: np.ndarray, size: int) -> np.ndarray:
    out = np.zeros(size)
    np.add.at(out, cell_rows.ravel(), local.ravel())
    return out


def restrict(matrix: SparseMatrix, rows: np.ndarray, cols: Optional[np.ndarray] = None) -> SparseMatrix:
    """Подматрица на свободных степенях свободы."""
    cols = rows if cols is None else cols
    return sparse.csr_matrix(matrix[rows][:, cols])


def _report(A: SparseMatrix, x: np.ndarray, b: np.ndarray, iterations: int, tol: float, method: str) -> LinearSolveReport:
    residual = float(np.linalg.norm(A @ x - b))
    scale = float(np.linalg.norm(b))
    relative = residual / scale if scale > 0 else residual
    ok = bool(np.all(np.isfinite(x))) and relative <= tol
    return LinearSolveReport(residual, relative, iterations, ok, method)


def solve(
    A: SparseMatrix,
    b: Sequence[float],
    method: str = "direct",
    tol: float = 1e-10,
    max_iter: Optional[int] = None,
) -> Tuple[np.ndarray, LinearSolveReport]:
    """Решает A x = b: разреженный LU (direct) или CG с диагональным предобуславливателем."""
    A = sparse.csr_matrix(A)
    b = np.asarray(b, dtype=float)
    n, m = A.shape
    if n != m:
        raise InvalidInputError(f"matrix must be square, got {A.shape}")
    if b.shape != (n,):
        raise InvalidInputError(f"right-hand side has shape {b.shape}, expected ({n},)")
    if n == 0:
        return np.zeros(0), LinearSolveReport(0.0, 0.0, 0, True, method)

    if method == "direct":
        try:
            lu = splu(A.tocsc())
        except RuntimeError as e:
            report = LinearSolveReport(np.inf, np.inf, 0, False, method)
            raise SolverFailureError(f"sparse LU failed: {e}", report) from e
        x = lu.solve(b)
        # один шаг итерационного уточнения
        x += lu.solve(b - A @ x)
        report = _report(A, x, b, 0, tol, method)
    elif method == "cg":
        diagonal = A.diagonal()
        if np.any(diagonal <= 0):
            raise SolverFailureError("cg requires a positive diagonal (SPD matrix)")
        preconditioner = LinearOperator((n, n), matvec=lambda r: r / diagonal)
        iterations = 0

        def count(_):
            nonlocal iterations
            iterations += 1

        x, info = cg(A, b, rtol=tol, atol=0.0, maxiter=max_iter or 10 * n, M=preconditioner, callback=count)
        report = _report(A, x, b, iterations, tol, method)
        if info != 0:
            raise SolverFailureError(f"cg did not converge (info={info}, iterations={iterations})", report)
    else:
        raise InvalidInputError(f"unknown linear solver method {method!r}")

    logger.debug(f"Linear solve n={n} method={method}: rel. residual {report.relative_residual:.2e}")
    if not report.success:
        raise SolverFailureError(
            f"{method} solve residual {report.relative_residual:.3e} exceeds tolerance {tol:.1e}", report
        )
    return x, report


def solve_constrained(
    A: SparseMatrix,
    b: np.ndarray,
    free: np.ndarray,
    method: str = "direct",
    tol: float = 1e-10,
) -> Tuple[np.ndarray, LinearSolveReport]:
    """Решение на свободных степенях свободы; связанные равны нулю."""
    x = np.zeros(A.shape[0])
    x_free, report = solve(restrict(A, free), b[free], method=method, tol=tol)
    x[free] = x_free
    return x, report

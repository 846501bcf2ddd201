"""Запись результатов: поля в legacy VTK, диагностика в CSV, сводка в JSON."""
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Union

import meshio
import numpy as np
import pandas as pd

from ..diagnostics.flux import effective_viscous_flux
from ..diagnostics.records import CSV_COLUMNS, DiagnosticsRecord
from ..fem.operators import evaluate
from ..utils.logger import setup_logger

logger = setup_logger(__name__)

PathLike = Union[str, Path]

CENTROID = np.full((1, 3), 1.0 / 3.0)


def _prepare(path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def write_fields(state, path: PathLike, physics=None) -> Path:
    """Слой в legacy VTK ASCII.

    CELL_DATA: rho, effective_viscous_flux (если заданы физические параметры),
    u (значение в центре треугольника, z = 0). POINT_DATA: w для смешанных схем.
    """
    path = _prepare(path)
    mesh = state.rho.mesh
    points = np.column_stack([mesh.vertices, np.zeros(mesh.n_vertices)])
    u = evaluate(state.u, CENTROID)[:, 0, :]
    cell_data = {
        "rho": [state.rho.coefficients.copy()],
        "u": [np.column_stack([u, np.zeros(mesh.n_triangles)])],
    }
    if physics is not None:
        cell_data["effective_viscous_flux"] = [effective_viscous_flux(state, physics).coefficients]
    point_data = {}
    if state.w is not None:
        point_data["w"] = state.w.coefficients.copy()

    grid = meshio.Mesh(points, [("triangle", mesh.triangles)], point_data=point_data, cell_data=cell_data)
    try:
        meshio.write(path, grid, file_format="vtk42", binary=False)
    except OSError as e:
        raise OSError(f"cannot write fields to {path}: {e}") from e
    logger.debug(f"Fields of step {state.step} written to {path}")
    return path


def read_fields(path: PathLike) -> Dict[str, Any]:
    """Читает файл write_fields: точки, треугольники и массивы данных."""
    try:
        grid = meshio.read(path, file_format="vtk")
    except OSError as e:
        raise OSError(f"cannot read fields from {path}: {e}") from e
    return {
        "points": np.asarray(grid.points)[:, :2],
        "triangles": np.asarray(grid.cells_dict["triangle"]),
        "cell_data": {name: np.asarray(values[0]) for name, values in grid.cell_data.items()},
        "point_data": {name: np.asarray(values) for name, values in grid.point_data.items()},
    }


def diagnostics_frame(records: Sequence[DiagnosticsRecord]) -> pd.DataFrame:
    return pd.DataFrame([record.as_row() for record in records], columns=list(CSV_COLUMNS))


def write_diagnostics(records: Sequence[DiagnosticsRecord], path: PathLike) -> Path:
    """CSV с фиксированной шапкой; числа с 17 значащими цифрами."""
    path = _prepare(path)
    try:
        diagnostics_frame(records).to_csv(path, index=False, float_format="%.17g")
    except OSError as e:
        raise OSError(f"cannot write diagnostics to {path}: {e}") from e
    logger.info(f"Diagnostics ({len(records)} rows) written to {path}")
    return path


def read_diagnostics(path: PathLike) -> pd.DataFrame:
    return pd.read_csv(path)


def write_table(table: pd.DataFrame, path: PathLike) -> Path:
    """Таблица исследования сходимости."""
    path = _prepare(path)
    table.to_csv(path, index=False, float_format="%.17g")
    logger.info(f"Table written to {path}")
    return path


@dataclass
class RunSummary:
    """Сводка расчета для JSON."""
    config: Dict[str, Any]
    invariants: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)
    files: Dict[str, Any] = field(default_factory=dict)
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(item.get("passed", False) for item in self.invariants.values())


def _to_json(obj):
    if isinstance(obj, dict):
        return {str(k): _to_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_json(item) for item in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, Path):
        return str(obj)
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    return obj


def write_summary(summary: RunSummary, path: PathLike) -> Path:
    """JSON с ключами config, invariants, timings, files (и error при сбое)."""
    path = _prepare(path)
    data = asdict(summary)
    if data["error"] is None:
        data.pop("error")
    with open(path, "w", encoding="utf-8") as f:
        json.dump(_to_json(data), f, indent=2, ensure_ascii=False)
    logger.info(f"Summary written to {path}")
    return path


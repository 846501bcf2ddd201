"""Текстовый формат сетки: блоки "vertices N" и "triangles M"."""
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np

from .triangulation import Mesh
from ..utils.errors import InvalidInputError
from ..utils.logger import setup_logger

logger = setup_logger(__name__)


def _read_block(lines: List[Tuple[int, str]], start: int, keyword: str, width: int, dtype) -> tuple:
    """Блок "keyword N" и N строк; lines - пары (номер строки в файле, текст)."""
    if start >= len(lines):
        last = lines[-1][0] if lines else 0
        raise InvalidInputError(f"line {last + 1}: expected '{keyword} <count>'")
    line_no, text = lines[start]
    header = text.split()
    if len(header) != 2 or header[0] != keyword:
        raise InvalidInputError(f"line {line_no}: expected '{keyword} <count>'")
    try:
        count = int(header[1])
    except ValueError:
        raise InvalidInputError(f"line {line_no}: bad count {header[1]!r}") from None
    rows = []
    for offset in range(count):
        if start + 1 + offset >= len(lines):
            raise InvalidInputError(f"line {line_no}: unexpected end of file in '{keyword}' block")
        number, row = lines[start + 1 + offset]
        parts = row.split()
        if len(parts) != width:
            raise InvalidInputError(f"line {number}: expected {width} values, got {len(parts)}")
        try:
            rows.append([dtype(v) for v in parts])
        except ValueError:
            raise InvalidInputError(f"line {number}: cannot parse {parts}") from None
    return np.array(rows, dtype=dtype).reshape(count, width), start + 1 + count


def parse_mesh(text: str) -> Mesh:
    """Разбирает текст сетки; треугольники должны быть ориентированы против часовой стрелки."""
    lines = [(number, raw.split("#", 1)[0].strip()) for number, raw in enumerate(text.splitlines(), start=1)]
    lines = [(number, ln) for number, ln in lines if ln]
    vertices, nxt = _read_block(lines, 0, "vertices", 2, float)
    triangles, nxt = _read_block(lines, nxt, "triangles", 3, int)
    if nxt != len(lines):
        number, ln = lines[nxt]
        raise InvalidInputError(f"line {number}: trailing content after triangles block: {ln!r}")
    return Mesh(vertices, triangles)


def read_mesh(path: Union[str, Path]) -> Mesh:
    """Читает сетку из файла."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InvalidInputError(f"cannot read mesh file {path}: {e}") from e
    mesh = parse_mesh(text)
    logger.info(f"Loaded {mesh} from {path}")
    return mesh


def format_mesh(mesh: Mesh) -> str:
    out = [f"vertices {mesh.n_vertices}"]
    out += [f"{x!r} {y!r}" for x, y in mesh.vertices.tolist()]
    out.append(f"triangles {mesh.n_triangles}")
    out += [f"{i} {j} {k}" for i, j, k in mesh.triangles.tolist()]
    return "\n".join(out) + "\n"


def write_mesh(mesh: Mesh, path: Union[str, Path]) -> Path:
    """Записывает сетку в текстовом формате."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_mesh(mesh), encoding="utf-8")
    return path

"""Оценки сдвигов: ||v(.) - v(. - xi)|| против границы из леммы для пространства."""
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from ..fem.derham import hodge_decompose
from ..fem.operators import curlcurl_matrix, divdiv_matrix, elementwise_div, evaluate
from ..fem.quadrature import physical_points, triangle_rule
from ..fem.spaces import FeFunction
from ..schemes.momentum_cr import jump_penalty_matrix
from ..utils.errors import InvalidInputError


@dataclass
class TranslationReport:
    """Нормы разностей, границы и их отношения для каждого сдвига."""
    shifts: np.ndarray
    differences: List[float] = field(default_factory=list)
    bounds: List[float] = field(default_factory=list)
    ratios: List[float] = field(default_factory=list)

    @property
    def max_ratio(self) -> float:
        return max(self.ratios, default=0.0)


def cr_seminorm(u: FeFunction, eps: float) -> float:
    """|u|_{V_h} = (||curl_h u||^2 + ||div_h u||^2 + штраф скачков)^{1/2}."""
    c = u.coefficients
    dofmap = u.dofmap
    total = c @ (curlcurl_matrix(dofmap) @ c) + c @ (divdiv_matrix(dofmap) @ c)
    total += c @ (jump_penalty_matrix(dofmap, eps) @ c)
    return float(np.sqrt(max(total, 0.0)))


def translate_difference(u: FeFunction, shift: np.ndarray, order: int = 4) -> float:
    """||u(x) - u(x - xi)||_L2 по точкам x, для которых x - xi остается в области."""
    mesh = u.mesh
    rule = triangle_rule(order)
    points = physical_points(mesh, rule)
    nt, nq = points.shape[:2]
    flat = points.reshape(-1, 2)
    shifted = flat - shift
    owner = mesh.locate(shifted)
    inside = owner >= 0

    here = evaluate(u, rule.points).reshape(nt * nq, -1)
    there = np.zeros_like(here)
    if inside.any():
        cells = owner[inside]
        bary = mesh.barycentric(cells, shifted[inside])
        there[inside] = evaluate(u, bary[:, None, :], cells)[:, 0, :]

    weights = (rule.weights[None, :] * mesh.areas[:, None]).reshape(-1)
    squared = np.sum((here - there) ** 2, axis=1)
    return float(np.sqrt(np.sum(weights[inside] * squared[inside])))


def _check_shift(mesh, shift: np.ndarray) -> None:
    extent = mesh.vertices.max(axis=0) - mesh.vertices.min(axis=0)
    if np.any(np.abs(shift) >= extent):
        raise InvalidInputError(f"shift {shift.tolist()} exceeds the domain extent {extent.tolist()}")


def translation_estimate_check(u: FeFunction, shifts: Sequence[Sequence[float]], eps: float = 0.05) -> TranslationReport:
    """Отношения ||u - u(. - xi)|| к границе оценки сдвигов.

    CR: граница |xi|^{1/2 - eps/4} |u|_{V_h}.
    RT0 (условие Навье): оценивается компонента v_perp из разложения Ходжа,
    граница (|xi| + |xi|^2)^{1/2} ||div v||.
    """
    shifts = np.atleast_2d(np.asarray(shifts, dtype=float))
    mesh = u.mesh
    for shift in shifts:
        _check_shift(mesh, shift)

    if u.space == "CR":
        target = u
        scale = cr_seminorm(u, eps)

        def bound(size: float) -> float:
            return size ** (0.5 - eps / 4.0) * scale
    elif u.space == "RT0":
        _, target = hodge_decompose(u)
        div = elementwise_div(u).coefficients
        scale = float(np.sqrt(mesh.areas @ div ** 2))

        def bound(size: float) -> float:
            return np.sqrt(size + size ** 2) * scale
    else:
        raise InvalidInputError(f"translation estimate needs a CR or RT0 function, got {u.space}")

    report = TranslationReport(shifts=shifts)
    for shift in shifts:
        difference = translate_difference(target, shift)
        limit = float(bound(float(np.linalg.norm(shift))))
        report.differences.append(difference)
        report.bounds.append(limit)
        report.ratios.append(difference / limit if limit > 0 else 0.0)
    return report

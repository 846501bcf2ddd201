"""Квадратуры на треугольнике и на отрезке."""
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from ..utils.errors import InvalidInputError


class TriangleRule(NamedTuple):
    """Барицентрические узлы (q, 3) и веса (q,), сумма весов равна 1."""
    points: np.ndarray
    weights: np.ndarray
    order: int


class LineRule(NamedTuple):
    """Узлы s на [0, 1] и веса, сумма весов равна 1."""
    points: np.ndarray
    weights: np.ndarray


def _symmetric(groups) -> TriangleRule:
    points, weights = [], []
    for w, a, b in groups:
        if b is None:
            points.append([a, a, a])
            weights.append(w)
        else:
            for p in ([a, a, b], [a, b, a], [b, a, a]):
                points.append(p)
                weights.append(w)
    return np.array(points), np.array(weights)


@lru_cache(maxsize=None)
def triangle_rule(order: int = 4) -> TriangleRule:
    """Симметричные правила до порядка 4, выше - схлопнутое правило Гаусса."""
    if order < 1:
        raise InvalidInputError(f"quadrature order must be >= 1, got {order}")
    if order == 1:
        points, weights = _symmetric([(1.0, 1.0 / 3.0, None)])
    elif order == 2:
        points, weights = _symmetric([(1.0 / 3.0, 0.5, 0.0)])
    elif order <= 4:
        points, weights = _symmetric([
            (0.223381589678011, 0.445948490915965, 0.108103018168070),
            (0.109951743655322, 0.091576213509771, 0.816847572980459),
        ])
    else:
        # отображение Даффи квадрата на треугольник
        n = order // 2 + 1
        s, ws = np.polynomial.legendre.leggauss(n)
        s = 0.5 * (s + 1.0)
        ws = 0.5 * ws
        u, v = np.meshgrid(s, s, indexing="ij")
        wu, wv = np.meshgrid(ws, ws, indexing="ij")
        x = u.ravel()
        y = (v * (1.0 - u)).ravel()
        weights = 2.0 * (wu * wv * (1.0 - u)).ravel()
        points = np.column_stack([1.0 - x - y, x, y])
    weights = weights / weights.sum()
    points.setflags(write=False)
    weights.setflags(write=False)
    return TriangleRule(points, weights, order)


@lru_cache(maxsize=None)
def line_rule(n_points: int = 3) -> LineRule:
    """Правило Гаусса-Лежандра на [0, 1]."""
    s, w = np.polynomial.legendre.leggauss(n_points)
    points = 0.5 * (s + 1.0)
    weights = 0.5 * w
    points.setflags(write=False)
    weights.setflags(write=False)
    return LineRule(points, weights)


def physical_points(mesh, rule: TriangleRule) -> np.ndarray:
    """Узлы квадратуры во всех треугольниках, (nt, q, 2)."""
    corners = mesh.vertices[mesh.triangles]
    return np.einsum("qk,tkd->tqd", rule.points, corners)


def integrate(mesh, values: np.ndarray, rule: TriangleRule) -> np.ndarray:
    """Интегралы по треугольникам от значений в узлах, values (nt, q, ...)."""
    return np.einsum("tq...,q,t->t...", values, rule.weights, mesh.areas)


def element_means(mesh, f, order: int = 4, t: float = 0.0) -> np.ndarray:
    """Средние f по треугольникам; f(x, y, t) скалярная или векторная."""
    rule = triangle_rule(order)
    pts = physical_points(mesh, rule)
    values = evaluate_field(f, pts, t)
    return np.einsum("tq...,q->t...", values, rule.weights)


def edge_means(mesh, f, n_points: int = 3, t: float = 0.0) -> np.ndarray:
    """Средние f по ребрам."""
    rule = line_rule(n_points)
    a = mesh.vertices[mesh.edges[:, 0]]
    b = mesh.vertices[mesh.edges[:, 1]]
    pts = a[:, None, :] + rule.points[None, :, None] * (b - a)[:, None, :]
    values = evaluate_field(f, pts, t)
    return np.einsum("eq...,q->e...", values, rule.weights)


def evaluate_field(f, points: np.ndarray, t: float = 0.0) -> np.ndarray:
    """Значения f в точках points (..., 2); скалярная константа растягивается."""
    values = np.asarray(f(points[..., 0], points[..., 1], t), dtype=float)
    if values.ndim == 0:
        values = np.full(points.shape[:-1], float(values))
    return values

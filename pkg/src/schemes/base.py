"""Базовый класс для схем уравнения импульса."""
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from .transport import EdgeFluxField
from ..fem.operators import force_load
from ..fem.spaces import DofMap, FeFunction
from ..linalg.sparse import LinearSolveReport
from ..mesh.triangulation import Mesh


@dataclass
class MomentumSolution:
    """Решение шага по импульсу: скорость, вихрь (для смешанной схемы), отчеты."""
    u: FeFunction
    w: Optional[FeFunction] = None
    report: Optional[LinearSolveReport] = None
    checks: Dict[str, float] = field(default_factory=dict)


class BaseMomentumScheme(ABC):
    """Общий интерфейс схем CR и смешанной схемы вихрь-скорость."""

    name = "base"

    def __init__(self, mesh: Mesh, linear_method: str = "direct", linear_tol: float = 1e-10):
        self.mesh = mesh
        self.linear_method = linear_method
        self.linear_tol = linear_tol

    @property
    @abstractmethod
    def velocity_space(self) -> DofMap:
        """Пространство скорости с граничными условиями."""

    @abstractmethod
    def solve(
        self,
        p: np.ndarray,
        f: np.ndarray,
        u_prev: Optional[FeFunction] = None,
    ) -> MomentumSolution:
        """Решает дискретное уравнение импульса при давлении p и силе f (по элементам)."""

    @abstractmethod
    def dissipation(self, solution: MomentumSolution) -> Dict[str, float]:
        """Вязкая диссипация: ключи curl, div, penalty."""

    @abstractmethod
    def residual(
        self,
        solution: MomentumSolution,
        p: np.ndarray,
        f: np.ndarray,
        u_prev: Optional[FeFunction] = None,
    ) -> float:
        """Невязка ||A x - b||_inf / (1 + ||b||_inf) при подстановке решения."""

    def kinetic_energy(self, u: FeFunction) -> float:
        return 0.0

    def zero_velocity(self) -> FeFunction:
        return FeFunction(self.velocity_space)

    def zero_solution(self) -> MomentumSolution:
        return MomentumSolution(self.zero_velocity())

    def forcing_work(self, u: FeFunction, f: np.ndarray) -> float:
        """(f, u) для кусочно-постоянной силы."""
        return float(force_load(u.dofmap, f) @ u.coefficients)

    def edge_fluxes(self, u: FeFunction) -> EdgeFluxField:
        return EdgeFluxField.from_velocity(u)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.mesh})"


def scaled_residual(A, x: np.ndarray, b: np.ndarray) -> float:
    return float(np.abs(A @ x - b).max(initial=0.0) / (1.0 + np.abs(b).max(initial=0.0)))

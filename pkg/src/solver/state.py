"""Состояние на временном слое и траектория."""
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from ..fem.spaces import FeFunction
from ..mesh.triangulation import Mesh
from ..utils.errors import InvalidInputError


@dataclass
class State:
    """Плотность (P0), скорость (CR или RT0), вихрь (P1, для смешанных схем)."""
    rho: FeFunction
    u: FeFunction
    w: Optional[FeFunction] = None
    time: float = 0.0
    step: int = 0


@dataclass
class PicardReport:
    """Итоги итераций Пикара на одном шаге."""
    iterations: int
    increment: float
    transport_residual: float
    momentum_residual: float
    history: List[float] = field(default_factory=list)
    checks: Dict[str, float] = field(default_factory=dict)

    @property
    def residual(self) -> float:
        return max(self.transport_residual, self.momentum_residual)


@dataclass
class StepLog:
    """Величины шага, взвешенные по dt; подшаги при дроблении складываются."""
    dt: float
    curl: float
    div: float
    penalty: float
    work: float
    picard_iterations: int
    residual: float
    substeps: int = 1
    checks: Dict[str, float] = field(default_factory=dict)

    @property
    def dissipation(self) -> float:
        return self.curl + self.div + self.penalty

    def merge(self, other: "StepLog") -> "StepLog":
        checks = dict(self.checks)
        for key, value in other.checks.items():
            checks[key] = max(checks.get(key, value), value)
        return StepLog(
            dt=self.dt + other.dt,
            curl=self.curl + other.curl,
            div=self.div + other.div,
            penalty=self.penalty + other.penalty,
            work=self.work + other.work,
            picard_iterations=self.picard_iterations + other.picard_iterations,
            residual=max(self.residual, other.residual),
            substeps=self.substeps + other.substeps,
            checks=checks,
        )


class Trajectory:
    """Слои t_m = m dt, m = 0..M; между слоями решение кусочно-постоянно."""

    def __init__(self, mesh: Mesh, dt: float, initial: State):
        self.mesh = mesh
        self.dt = dt
        self.states: List[State] = [initial]

    def append(self, state: State) -> None:
        self.states.append(state)

    def __len__(self) -> int:
        return len(self.states)

    def __getitem__(self, m: int) -> State:
        return self.states[m]

    @property
    def final(self) -> State:
        return self.states[-1]

    @property
    def times(self) -> np.ndarray:
        return np.array([s.time for s in self.states])

    @property
    def n_steps(self) -> int:
        return len(self.states) - 1

    def at(self, t: float) -> State:
        """Состояние m при t из (t_{m-1}, t_m]; при t = 0 - начальное."""
        if t < 0 or t > self.states[-1].time + 1e-12 * max(1.0, self.states[-1].time):
            raise InvalidInputError(f"time {t} outside the trajectory [0, {self.states[-1].time}]")
        if t <= 0:
            return self.states[0]
        m = int(np.ceil(t / self.dt - 1e-9))
        return self.states[min(max(m, 1), len(self.states) - 1)]

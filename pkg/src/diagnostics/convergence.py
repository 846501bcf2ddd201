"""Ошибки на последовательности сеток и наблюдаемые порядки сходимости."""
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from ..fem.operators import evaluate, l2_error, l2_norm
from ..fem.quadrature import triangle_rule
from ..fem.spaces import DofMap, FeFunction, interpolate
from ..utils.config import Config
from ..utils.errors import InvalidInputError
from ..utils.expressions import ScalarField, VectorField
from ..utils.logger import setup_logger

logger = setup_logger(__name__)

NOT_AVAILABLE = "n/a"

Rate = Union[float, str]


@dataclass
class LevelResult:
    """Итог расчета на одном уровне сетки."""
    nx: int
    h: float
    rho: FeFunction
    u: FeFunction
    time: float
    scheme: str


def observed_rates(errors: Sequence[float], h: Optional[Sequence[float]] = None) -> List[Rate]:
    """log(e_{k-1}/e_k) / log(h_{k-1}/h_k); без h считается, что шаг сетки делится пополам."""
    rates: List[Rate] = []
    for k in range(1, len(errors)):
        coarse, fine = errors[k - 1], errors[k]
        if coarse <= 0 or fine <= 0:
            rates.append(NOT_AVAILABLE)
            continue
        ratio = math.log(h[k - 1] / h[k]) if h is not None else math.log(2.0)
        rates.append(math.log(coarse / fine) / ratio)
    return rates


def is_monotone_decreasing(values: Sequence[float]) -> bool:
    return all(b < a for a, b in zip(values[:-1], values[1:]))


def _p0_difference(a: FeFunction, b: FeFunction) -> float:
    areas = a.mesh.areas
    return float(np.sqrt(areas @ (a.coefficients - b.coefficients) ** 2))


def _velocity_difference(a: FeFunction, b: FeFunction, order: int = 4) -> float:
    """||a - b||_L2 для скоростей из разных пространств на одной сетке."""
    rule = triangle_rule(order)
    gap = evaluate(a, rule.points) - evaluate(b, rule.points)
    weights = rule.weights[None, :] * a.mesh.areas[:, None]
    return float(np.sqrt(np.sum(weights * np.sum(gap ** 2, axis=-1))))


def error_norms_and_rates(
    levels: Sequence[LevelResult],
    rho_exact: ScalarField,
    u_exact: VectorField,
) -> pd.DataFrame:
    """Таблица L2-ошибок плотности и скорости по уровням и порядков между соседними уровнями."""
    if len(levels) < 2:
        raise InvalidInputError(f"a rate table needs at least 2 refinement levels, got {len(levels)}")
    schemes = {level.scheme for level in levels}
    times = {round(level.time, 12) for level in levels}
    if len(schemes) != 1 or len(times) != 1:
        raise InvalidInputError(f"levels come from mismatched runs: schemes={schemes}, final times={times}")

    rho_errors = [l2_error(level.rho, rho_exact, level.time) for level in levels]
    u_errors = [l2_error(level.u, u_exact, level.time) for level in levels]
    h = [level.h for level in levels]
    return pd.DataFrame({
        "nx": [level.nx for level in levels],
        "h": h,
        "rho_error": rho_errors,
        "u_error": u_errors,
        "rho_rate": [NOT_AVAILABLE] + observed_rates(rho_errors, h),
        "u_rate": [NOT_AVAILABLE] + observed_rates(u_errors, h),
    })


def refinement_ladder(base_nx: int, n_levels: int) -> List[int]:
    """nx, 2 nx, 4 nx, ..."""
    if n_levels < 1:
        raise InvalidInputError(f"number of levels must be >= 1, got {n_levels}")
    return [base_nx * 2 ** k for k in range(n_levels)]


def run_level(config: Config, nx: int) -> LevelResult:
    """Расчет конфигурации на сетке nx x nx (ny масштабируется так же)."""
    from ..solver.simulation import Simulation

    ny = None if config.mesh.ny is None else config.mesh.ny * nx // config.mesh.nx
    level_config = config.with_overrides(mesh={"nx": nx, "ny": ny, "file": None})
    simulation = Simulation(level_config)
    trajectory, _ = simulation.run()
    final = trajectory.final
    logger.info(f"Level nx={nx}: h={simulation.mesh.h_max:.4g}, steps={trajectory.n_steps}")
    return LevelResult(nx, simulation.mesh.h_max, final.rho, final.u, final.time, config.scheme.name)


def convergence_table(config: Config, levels: Sequence[int]) -> pd.DataFrame:
    """Лестница сеток против точного решения из секции reference."""
    if config.reference is None:
        raise InvalidInputError("convergence study needs a [reference] section with the exact solution")
    results = [run_level(config, nx) for nx in levels]
    return error_norms_and_rates(results, config.reference.density(), config.reference.velocity())


def stationary_study(config: Config, levels: Sequence[int] = (8, 16, 32)) -> pd.DataFrame:
    """Тест стационарности: f = D(a rho*^gamma), rho0 = rho*, точное решение (rho*, 0).

    Возвращает ||u_h|| и ||rho_h - I_h rho*|| на каждом уровне и их порядки.
    """
    if len(levels) < 2:
        raise InvalidInputError("stationary study needs at least 2 levels")
    study = config.with_overrides(physics={"force": "balance"})
    rho_star = study.physics.density()
    u_norms, rho_errors, h = [], [], []
    for nx in levels:
        level = run_level(study, nx)
        rho_h = interpolate(DofMap(level.rho.mesh, "P0"), rho_star)
        u_norms.append(l2_norm(level.u))
        rho_errors.append(_p0_difference(level.rho, rho_h))
        h.append(level.h)
    table = pd.DataFrame({
        "nx": list(levels),
        "h": h,
        "u_l2": u_norms,
        "rho_error": rho_errors,
        "u_rate": [NOT_AVAILABLE] + observed_rates(u_norms, h),
        "rho_rate": [NOT_AVAILABLE] + observed_rates(rho_errors, h),
    })
    table.attrs["monotone"] = is_monotone_decreasing(u_norms) and is_monotone_decreasing(rho_errors)
    return table


def cross_scheme_study(config: Config, levels: Sequence[int] = (8, 16, 32)) -> pd.DataFrame:
    """||rho_cr - rho_mixed||_L2 и ||u_cr - u_mixed||_L2 в финальный момент на каждом уровне (условие Навье)."""
    if len(levels) < 2:
        raise InvalidInputError("cross-scheme study needs at least 2 levels")
    base = config.with_overrides(scheme={"bc": "navier", "u0": None})
    cr = base.with_overrides(scheme={"name": "cr"})
    mixed = base.with_overrides(scheme={"name": "mixed"})
    differences, u_differences, h = [], [], []
    for nx in levels:
        level_cr = run_level(cr, nx)
        level_mixed = run_level(mixed, nx)
        differences.append(_p0_difference(level_cr.rho, level_mixed.rho))
        u_differences.append(_velocity_difference(level_cr.u, level_mixed.u))
        h.append(level_cr.h)
    table = pd.DataFrame({
        "nx": list(levels),
        "h": h,
        "rho_difference": differences,
        "u_difference": u_differences,
        "rate": [NOT_AVAILABLE] + observed_rates(differences, h),
        "u_rate": [NOT_AVAILABLE] + observed_rates(u_differences, h),
    })
    table.attrs["monotone"] = is_monotone_decreasing(differences)
    return table

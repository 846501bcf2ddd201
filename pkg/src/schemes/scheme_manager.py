"""Выбор схемы по конфигурации."""
import math
from typing import Dict, Type

from .base import BaseMomentumScheme
from .momentum_cr import CrMomentumScheme, CrParams
from .momentum_mixed import MixedMomentumScheme, MixedParams
from ..mesh.triangulation import Mesh
from ..utils.config import Config
from ..utils.errors import InvalidInputError
from ..utils.logger import setup_logger

logger = setup_logger(__name__)

SCHEMES: Dict[str, Type[BaseMomentumScheme]] = {
    "cr": CrMomentumScheme,
    "mixed": MixedMomentumScheme,
    "stokes_approx": MixedMomentumScheme,
}

SPATIAL_DIMENSION = 2


def check_stokes_exponent(gamma: float) -> bool:
    """Предупреждает, если gamma <= N/2: теория сходимости этот случай не покрывает."""
    if gamma <= SPATIAL_DIMENSION / 2:
        logger.warning(
            f"gamma = {gamma} <= N/2 = {SPATIAL_DIMENSION / 2}: convergence of the Stokes "
            f"approximation scheme is only established for gamma > N/2; running anyway"
        )
        return False
    return True


def create_scheme(config: Config, mesh: Mesh, dt: float = math.inf, rho_bar: float = 1.0) -> BaseMomentumScheme:
    """Создает схему импульса для конфигурации."""
    name = config.scheme.name
    if name not in SCHEMES:
        raise InvalidInputError(f"unknown scheme {name!r}")
    physics = config.physics
    solver = config.solver

    if name == "cr":
        params = CrParams(mu=physics.mu, lam=physics.lam, eps=physics.eps, bc=config.scheme.bc)
        scheme = CrMomentumScheme(mesh, params, solver.linear_method, solver.linear_tol)
    else:
        if config.scheme.bc != "navier":
            raise InvalidInputError("the mixed method is restricted to the Navier-slip boundary condition")
        variant = "stokes_approximation" if name == "stokes_approx" else "stationary"
        if variant == "stokes_approximation":
            check_stokes_exponent(physics.gamma)
        params = MixedParams(mu=physics.mu, lam=physics.lam, variant=variant, rho_bar=rho_bar, dt=dt)
        scheme = MixedMomentumScheme(mesh, params, solver.linear_method, solver.linear_tol)

    logger.info(f"Initialized {name} scheme on {mesh}")
    return scheme

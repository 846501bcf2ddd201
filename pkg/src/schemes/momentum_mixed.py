"""Смешанная схема вихрь-скорость (w в P1, u в RT0) и ее нестационарный вариант."""
import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
import scipy.sparse as sparse

from .base import BaseMomentumScheme, MomentumSolution, scaled_residual
from ..fem.operators import curl_pairing_matrix, divdiv_matrix, force_load, mass_matrix, pressure_load
from ..fem.spaces import DofMap, FeFunction
from ..linalg.sparse import SparseMatrix, restrict, solve
from ..mesh.triangulation import Mesh
from ..utils.errors import InvalidInputError
from ..utils.logger import setup_logger

logger = setup_logger(__name__)

VARIANTS = ("stationary", "stokes_approximation")


@dataclass(frozen=True)
class MixedParams:
    """Вязкости, вариант схемы, средняя начальная плотность rho_bar и шаг dt."""
    mu: float = 1.0
    lam: float = 0.0
    variant: str = "stationary"
    rho_bar: float = 1.0
    dt: float = math.inf

    def __post_init__(self):
        if not self.mu > 0:
            raise InvalidInputError(f"shear viscosity must be positive, got mu={self.mu}")
        if 2 * self.lam + 2 * self.mu < 0:
            raise InvalidInputError(f"viscosities violate 2*lam + 2*mu >= 0: mu={self.mu}, lam={self.lam}")
        if self.variant not in VARIANTS:
            raise InvalidInputError(f"unknown mixed variant {self.variant!r}")
        if self.variant == "stokes_approximation":
            if not self.rho_bar > 0:
                raise InvalidInputError(f"rho_bar must be positive, got {self.rho_bar}")
            if not self.dt > 0:
                raise InvalidInputError(f"time step must be positive, got dt={self.dt}")

    @property
    def inertia(self) -> float:
        """Коэффициент rho_bar/dt при матрице масс скорости."""
        if self.variant != "stokes_approximation":
            return 0.0
        return self.rho_bar / self.dt


def mixed_spaces(mesh: Mesh) -> Tuple[DofMap, DofMap]:
    """P1 с нулевым следом для вихря и RT0 с u.nu = 0 для скорости."""
    return DofMap(mesh, "P1", "zero-trace"), DofMap(mesh, "RT0", "navier")


class _MixedBlocks:
    def __init__(self, vorticity: DofMap, velocity: DofMap):
        wf, uf = vorticity.free_dofs, velocity.free_dofs
        self.M_w = restrict(mass_matrix(vorticity), wf)
        self.R = restrict(curl_pairing_matrix(DofMap(velocity.mesh, "RT0"), vorticity), uf, wf)
        self.D = restrict(divdiv_matrix(velocity), uf)
        self.M_u = restrict(mass_matrix(velocity), uf)


def _block_matrix(blocks: _MixedBlocks, params: MixedParams) -> SparseMatrix:
    velocity_block = (params.mu + params.lam) * blocks.D
    if params.inertia:
        velocity_block = velocity_block + params.inertia * blocks.M_u
    if blocks.M_w.shape[0] == 0:
        return sparse.csr_matrix(velocity_block)
    return sparse.bmat([
        [blocks.M_w, -blocks.R.T],
        [params.mu * blocks.R, velocity_block],
    ], format="csr")


def assemble_mixed_system(mesh: Mesh, dofmaps: Tuple[DofMap, DofMap], params: MixedParams) -> SparseMatrix:
    """Блочная матрица [[M_w, -R^T], [mu R, (mu + lam) D (+ rho_bar/dt M_u)]] на свободных (w, u)."""
    vorticity, velocity = dofmaps
    if vorticity.space != "P1" or velocity.space != "RT0":
        raise InvalidInputError("mixed system needs (P1, RT0) dofmaps")
    return _block_matrix(_MixedBlocks(vorticity, velocity), params)


class MixedMomentumScheme(BaseMomentumScheme):
    """Схема вихрь-скорость с условием Навье; stokes_approximation добавляет rho_bar d_t u."""

    name = "mixed"

    def __init__(self, mesh: Mesh, params: MixedParams, linear_method: str = "direct", linear_tol: float = 1e-10):
        super().__init__(mesh, "direct", linear_tol)
        if linear_method != "direct":
            logger.info("Mixed saddle system is nonsymmetric; using the direct solver")
        self.params = params
        self.vorticity, self.velocity = mixed_spaces(mesh)
        self.blocks = _MixedBlocks(self.vorticity, self.velocity)
        self.system = _block_matrix(self.blocks, params)
        self.n_w = self.vorticity.nfree
        logger.debug(f"Assembled mixed system ({params.variant}): {self.system.shape}, nnz={self.system.nnz}")

    @property
    def velocity_space(self) -> DofMap:
        return self.velocity

    def _rhs(self, p: np.ndarray, f: np.ndarray, u_prev: Optional[FeFunction]) -> np.ndarray:
        uf = self.velocity.free_dofs
        load = (pressure_load(self.velocity, p) + force_load(self.velocity, f))[uf]
        if self.params.inertia:
            if u_prev is None:
                raise InvalidInputError("stokes_approximation needs the previous velocity")
            load = load + self.params.inertia * (self.blocks.M_u @ u_prev.coefficients[uf])
        return np.concatenate([np.zeros(self.n_w), load])

    def _split(self, x: np.ndarray) -> Tuple[FeFunction, FeFunction]:
        w = FeFunction(self.vorticity)
        u = FeFunction(self.velocity)
        w.coefficients[self.vorticity.free_dofs] = x[:self.n_w]
        u.coefficients[self.velocity.free_dofs] = x[self.n_w:]
        return w, u

    def _stack(self, solution: MomentumSolution) -> np.ndarray:
        parts = [solution.u.coefficients[self.velocity.free_dofs]]
        if solution.w is not None:
            parts.insert(0, solution.w.coefficients[self.vorticity.free_dofs])
        return np.concatenate(parts)

    def solve(self, p: np.ndarray, f: np.ndarray, u_prev: Optional[FeFunction] = None) -> MomentumSolution:
        x, report = solve(self.system, self._rhs(p, f, u_prev), method="direct", tol=self.linear_tol)
        w, u = self._split(x)
        solution = MomentumSolution(u, w, report)
        solution.checks["curl_consistency"] = self.curl_consistency(solution)
        return solution

    def curl_consistency(self, solution: MomentumSolution) -> float:
        """||M_w w - R^T u|| / ||u|| (ноль, если u = 0 и w = 0)."""
        uf, wf = self.velocity.free_dofs, self.vorticity.free_dofs
        defect = self.blocks.M_w @ solution.w.coefficients[wf] - self.blocks.R.T @ solution.u.coefficients[uf]
        norm_u = float(np.linalg.norm(solution.u.coefficients))
        defect_norm = float(np.linalg.norm(defect))
        if norm_u == 0.0:
            return defect_norm
        return defect_norm / norm_u

    def dissipation(self, solution: MomentumSolution) -> Dict[str, float]:
        w = solution.w.coefficients[self.vorticity.free_dofs]
        u = solution.u.coefficients[self.velocity.free_dofs]
        return {
            "curl": self.params.mu * float(w @ (self.blocks.M_w @ w)),
            "div": (self.params.mu + self.params.lam) * float(u @ (self.blocks.D @ u)),
            "penalty": 0.0,
        }

    def kinetic_energy(self, u: FeFunction) -> float:
        if self.params.variant != "stokes_approximation":
            return 0.0
        c = u.coefficients[self.velocity.free_dofs]
        return 0.5 * self.params.rho_bar * float(c @ (self.blocks.M_u @ c))

    def residual(self, solution: MomentumSolution, p: np.ndarray, f: np.ndarray,
                 u_prev: Optional[FeFunction] = None) -> float:
        return scaled_residual(self.system, self._stack(solution), self._rhs(p, f, u_prev))

    def zero_solution(self) -> MomentumSolution:
        return MomentumSolution(FeFunction(self.velocity), FeFunction(self.vorticity))


def solve_mixed_momentum(
    mesh: Mesh,
    params: MixedParams,
    p_field: np.ndarray,
    f_field: np.ndarray,
    u_prev: Optional[FeFunction] = None,
) -> Tuple[FeFunction, FeFunction]:
    """(w, u) из смешанной схемы."""
    if params.variant == "stokes_approximation" and u_prev is None:
        raise InvalidInputError("u_prev is required for the stokes_approximation variant")
    solution = MixedMomentumScheme(mesh, params).solve(p_field, f_field, u_prev)
    return solution.w, solution.u

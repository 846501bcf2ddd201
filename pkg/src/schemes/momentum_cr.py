"""Схема Крузе-Равьяра для уравнения импульса со штрафом скачков h^eps."""
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from .base import BaseMomentumScheme, MomentumSolution, scaled_residual
from ..fem.operators import basis_values, curlcurl_matrix, divdiv_matrix, force_load, pressure_load
from ..fem.quadrature import line_rule
from ..fem.spaces import DofMap, FeFunction, tangents
from ..linalg.sparse import SparseMatrix, assemble_local, restrict, solve
from ..mesh.triangulation import Mesh
from ..utils.errors import InvalidInputError
from ..utils.logger import setup_logger

logger = setup_logger(__name__)


@dataclass(frozen=True)
class CrParams:
    """Вязкости mu, lam, показатель штрафа eps и граничное условие."""
    mu: float = 1.0
    lam: float = 0.0
    eps: float = 0.05
    bc: str = "navier"

    def __post_init__(self):
        if not self.mu > 0:
            raise InvalidInputError(f"shear viscosity must be positive, got mu={self.mu}")
        if 2 * self.lam + 2 * self.mu < 0:
            raise InvalidInputError(f"viscosities violate N*lam + 2*mu >= 0: mu={self.mu}, lam={self.lam}")
        if not self.eps > 0:
            raise InvalidInputError(f"penalty exponent must be positive, got eps={self.eps}")
        if self.bc not in ("navier", "dirichlet"):
            raise InvalidInputError(f"unknown boundary condition {self.bc!r}")


def jump_penalty_matrix(dofmap: DofMap, eps: float, h: Optional[float] = None) -> SparseMatrix:
    """sum_G h^eps/|G| int_G [u.nu][v.nu] + [u x nu][v x nu] по внутренним ребрам."""
    mesh = dofmap.mesh
    h = mesh.h_max if h is None else h
    interior = mesh.interior_edges
    minus = mesh.edge_elements[interior, 0]
    plus = mesh.edge_elements[interior, 1]
    rule = line_rule(2)
    a = mesh.vertices[mesh.edges[interior, 0]]
    b = mesh.vertices[mesh.edges[interior, 1]]
    pts = a[:, None, :] + rule.points[None, :, None] * (b - a)[:, None, :]

    phi_minus = basis_values(dofmap, mesh.barycentric(minus[:, None], pts), minus)
    phi_plus = basis_values(dofmap, mesh.barycentric(plus[:, None], pts), plus)
    local = np.zeros((len(interior), 12, 12))
    for frame in (mesh.normals[interior], tangents(mesh)[interior]):
        jump = np.concatenate([
            -np.einsum("mlqc,mc->mlq", phi_minus, frame),
            np.einsum("mlqc,mc->mlq", phi_plus, frame),
        ], axis=1)
        # h^eps/|G| * |G| * sum_q w_q
        local += h ** eps * np.einsum("miq,mjq,q->mij", jump, jump, rule.weights)
    rows = np.concatenate([dofmap.cell_dofs[minus], dofmap.cell_dofs[plus]], axis=1)
    return assemble_local(rows, rows, local, (dofmap.ndofs, dofmap.ndofs))


def assemble_cr_operator(mesh: Mesh, dofmap: DofMap, params: CrParams) -> SparseMatrix:
    """mu (curl_h, curl_h) + (mu + lam)(div_h, div_h) + штраф скачков, на всем пространстве CR."""
    if dofmap.space != "CR":
        raise InvalidInputError(f"CR operator needs a CR dofmap, got {dofmap.space}")
    return (
        params.mu * curlcurl_matrix(dofmap)
        + (params.mu + params.lam) * divdiv_matrix(dofmap)
        + jump_penalty_matrix(dofmap, params.eps)
    ).tocsr()


def assemble_pressure_load(mesh: Mesh, dofmap: DofMap, p_field: np.ndarray) -> np.ndarray:
    """int p div_h v для базисных функций CR (знак правой части)."""
    return pressure_load(dofmap, p_field)


class CrMomentumScheme(BaseMomentumScheme):
    """Неконформная схема: скорость в CR, давление и сила кусочно-постоянные."""

    name = "cr"

    def __init__(self, mesh: Mesh, params: CrParams, linear_method: str = "direct", linear_tol: float = 1e-10):
        super().__init__(mesh, linear_method, linear_tol)
        self.params = params
        self.dofmap = DofMap(mesh, "CR", params.bc)
        self.curlcurl = curlcurl_matrix(self.dofmap)
        self.divdiv = divdiv_matrix(self.dofmap)
        self.penalty = jump_penalty_matrix(self.dofmap, params.eps)
        self.operator = (params.mu * self.curlcurl + (params.mu + params.lam) * self.divdiv + self.penalty).tocsr()
        self._free_operator = restrict(self.operator, self.dofmap.free_dofs)
        logger.debug(f"Assembled CR operator: {self.dofmap}, nnz={self.operator.nnz}")

    @property
    def velocity_space(self) -> DofMap:
        return self.dofmap

    def load(self, p: np.ndarray, f: np.ndarray) -> np.ndarray:
        return pressure_load(self.dofmap, p) + force_load(self.dofmap, f)

    def solve(self, p: np.ndarray, f: np.ndarray, u_prev: Optional[FeFunction] = None) -> MomentumSolution:
        b = self.load(p, f)
        free = self.dofmap.free_dofs
        values, report = solve(self._free_operator, b[free], method=self.linear_method, tol=self.linear_tol)
        u = FeFunction(self.dofmap)
        u.coefficients[free] = values
        return MomentumSolution(u, None, report)

    def dissipation(self, solution: MomentumSolution) -> Dict[str, float]:
        c = solution.u.coefficients
        return {
            "curl": self.params.mu * float(c @ (self.curlcurl @ c)),
            "div": (self.params.mu + self.params.lam) * float(c @ (self.divdiv @ c)),
            "penalty": float(c @ (self.penalty @ c)),
        }

    def residual(self, solution: MomentumSolution, p: np.ndarray, f: np.ndarray,
                 u_prev: Optional[FeFunction] = None) -> float:
        free = self.dofmap.free_dofs
        return scaled_residual(self._free_operator, solution.u.coefficients[free], self.load(p, f)[free])

    def seminorm(self, u: FeFunction) -> float:
        """|v|_{V_h}: ||curl_h v||^2 + ||div_h v||^2 + штраф скачков."""
        c = u.coefficients
        return float(np.sqrt(c @ (self.curlcurl @ c) + c @ (self.divdiv @ c) + c @ (self.penalty @ c)))


def solve_cr_momentum(
    mesh: Mesh,
    params: CrParams,
    p_field: np.ndarray,
    f_field: np.ndarray,
    linear_method: str = "direct",
    tol: float = 1e-10,
) -> FeFunction:
    """Скорость CR из дискретного уравнения импульса."""
    return CrMomentumScheme(mesh, params, linear_method, tol).solve(p_field, f_field).u

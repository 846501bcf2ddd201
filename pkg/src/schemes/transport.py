"""Неявная противопотоковая схема для уравнения неразрывности."""
from typing import Optional, Tuple

import numpy as np

from ..fem.spaces import FeFunction
from ..linalg.sparse import LinearSolveReport, SparseMatrix, assemble, solve
from ..mesh.triangulation import Mesh
from ..utils.errors import InternalBugError, InvalidInputError
from ..utils.logger import setup_logger

logger = setup_logger(__name__)


class EdgeFluxField:
    """Нормальные скорости U на ребрах (среднее u.nu по ребру)."""

    def __init__(self, mesh: Mesh, normal_velocity: np.ndarray, source: str = "given"):
        normal_velocity = np.asarray(normal_velocity, dtype=float).reshape(-1)
        if len(normal_velocity) != mesh.n_edges:
            raise InvalidInputError(f"need {mesh.n_edges} edge velocities, got {len(normal_velocity)}")
        self.mesh = mesh
        self.normal_velocity = normal_velocity
        self.source = source

    @classmethod
    def from_velocity(cls, u: FeFunction) -> "EdgeFluxField":
        """Потоки из функции CR (среднее нормальной компоненты) или RT0 (DOF / |G|)."""
        mesh = u.mesh
        if u.space == "CR":
            return cls(mesh, u.coefficients[0::2], "CR")
        if u.space == "RT0":
            return cls(mesh, u.coefficients / mesh.edge_lengths, "RT0")
        raise InvalidInputError(f"edge fluxes need a CR or RT0 velocity, got {u.space}")

    @classmethod
    def zero(cls, mesh: Mesh) -> "EdgeFluxField":
        return cls(mesh, np.zeros(mesh.n_edges), "zero")

    def net_outflow(self) -> np.ndarray:
        """sum_{G in dE} sigma |G| U_G для каждого треугольника."""
        mesh = self.mesh
        flux = (mesh.edge_lengths * self.normal_velocity)[mesh.triangle_edges]
        return np.sum(mesh.edge_signs * flux, axis=1)


def upwind_flux(rho_minus, rho_plus, U):
    """F = rho_- max(U, 0) + rho_+ min(U, 0)."""
    U = np.asarray(U, dtype=float)
    return np.asarray(rho_minus) * np.maximum(U, 0.0) + np.asarray(rho_plus) * np.minimum(U, 0.0)


def assemble_transport_system(mesh: Mesh, fluxes: EdgeFluxField, dt: float) -> Tuple[SparseMatrix, np.ndarray]:
    """Матрица неявного шага |E|/dt rho_E + sum sigma |G| F(rho; U) и масштаб |E|/dt.

    Матрица является M-матрицей, суммы по столбцам равны |E|/dt.
    """
    if not dt > 0:
        raise InvalidInputError(f"time step must be positive, got {dt}")
    U = fluxes.normal_velocity
    boundary_flux = np.abs(U[mesh.boundary_edges])
    if boundary_flux.size and boundary_flux.max() > 1e-12 * max(1.0, np.abs(U).max()):
        raise InvalidInputError("boundary edges must carry zero normal velocity (u.nu = 0 on the boundary)")

    scaling = mesh.areas / dt
    interior = mesh.interior_edges
    minus = mesh.edge_elements[interior, 0]
    plus = mesh.edge_elements[interior, 1]
    up = mesh.edge_lengths[interior] * np.maximum(U[interior], 0.0)
    down = mesh.edge_lengths[interior] * np.minimum(U[interior], 0.0)

    cells = np.arange(mesh.n_triangles)
    rows = np.concatenate([cells, minus, minus, plus, plus])
    cols = np.concatenate([cells, minus, plus, minus, plus])
    vals = np.concatenate([scaling, up, down, -up, -down])
    return assemble((rows, cols, vals), (mesh.n_triangles, mesh.n_triangles)), scaling


def transport_step(
    rho_prev: FeFunction,
    fluxes: EdgeFluxField,
    dt: float,
    source: Optional[np.ndarray] = None,
    tol: float = 1e-12,
) -> Tuple[FeFunction, LinearSolveReport]:
    """Один шаг неявной противопотоковой схемы.

    Решает A rho = |E|/dt rho_prev + |E| source; при rho_prev > 0 и
    source >= 0 плотность остается положительной.
    """
    if rho_prev.space != "P0":
        raise InvalidInputError(f"density must be a P0 function, got {rho_prev.space}")
    mesh = rho_prev.mesh
    A, scaling = assemble_transport_system(mesh, fluxes, dt)
    rhs = scaling * rho_prev.coefficients
    if source is not None:
        source = np.asarray(source, dtype=float).reshape(-1)
        rhs = rhs + mesh.areas * source
    values, report = solve(A, rhs, method="direct", tol=tol)

    positive_data = rho_prev.coefficients.min() > 0 and (source is None or source.min() >= 0)
    if positive_data and values.min() <= 0:
        raise InternalBugError(
            f"implicit upwind step produced nonpositive density {values.min():.3e} from positive data"
        )
    return FeFunction(rho_prev.dofmap, values), report


def transport_residual(rho: FeFunction, rho_prev: FeFunction, fluxes: EdgeFluxField, dt: float) -> float:
    """Относительная невязка дискретного уравнения неразрывности."""
    A, scaling = assemble_transport_system(rho.mesh, fluxes, dt)
    rhs = scaling * rho_prev.coefficients
    return float(np.abs(A @ rho.coefficients - rhs).max() / max(np.abs(rhs).max(), 1e-300))


def total_mass(rho: FeFunction) -> float:
    return float(rho.mesh.areas @ rho.coefficients)


def renormalization_defect(
    rho_prev: FeFunction,
    rho: FeFunction,
    fluxes: EdgeFluxField,
    dt: float,
    energy_density,
    pressure,
) -> float:
    """E(rho) - E(rho_prev) + dt sum_E p(rho_E) sum_G sigma |G| U_G; неположительно для выпуклой P."""
    areas = rho.mesh.areas
    energy_now = float(areas @ energy_density(rho.coefficients))
    energy_prev = float(areas @ energy_density(rho_prev.coefficients))
    work = float(pressure(rho.coefficients) @ fluxes.net_outflow())
    return energy_now - energy_prev + dt * work

"""Эффективный вязкий поток (mu + lam) div u - p(rho)."""
import numpy as np

from ..fem.operators import elementwise_div
from ..fem.spaces import DofMap, FeFunction


def effective_viscous_flux(state, params) -> FeFunction:
    """F_E = (mu + lam) div u|_E - p(rho_E); params несет mu, lam, a, gamma."""
    rho = state.rho
    div_u = elementwise_div(state.u).coefficients
    values = (params.mu + params.lam) * div_u - params.a * rho.coefficients ** params.gamma
    return FeFunction(DofMap(rho.mesh, "P0"), values)


def flux_norms(flux: FeFunction):
    """(L1, L2) нормы кусочно-постоянного поля."""
    areas = flux.mesh.areas
    values = flux.coefficients
    return float(areas @ np.abs(values)), float(np.sqrt(areas @ values ** 2))


def flux_density_pairing(flux: FeFunction, rho: FeFunction) -> float:
    """int F rho dx."""
    return float(rho.mesh.areas @ (flux.coefficients * rho.coefficients))

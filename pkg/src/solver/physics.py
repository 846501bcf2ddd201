"""Закон давления p = a rho^gamma и упругая энергия P."""
import numpy as np
from scipy.special import xlogy

from ..utils.errors import InvalidInputError


def _check_density(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise InvalidInputError(f"density must be nonnegative, got min {rho.min()}")
    return rho


def pressure(rho, a: float, gamma: float):
    """p(rho) = a rho^gamma."""
    rho = _check_density(rho)
    return a * rho ** gamma


def elastic_energy(rho, a: float, gamma: float):
    """P(rho) = a rho^gamma / (gamma - 1) при gamma > 1 и a rho log rho при gamma = 1."""
    rho = _check_density(rho)
    if gamma == 1.0:
        return a * xlogy(rho, rho)
    return a * rho ** gamma / (gamma - 1.0)


class PressureLaw:
    """Пара (p, P) с фиксированными a и gamma."""

    def __init__(self, a: float, gamma: float):
        if a <= 0:
            raise InvalidInputError(f"pressure constant must be positive, got a={a}")
        if gamma < 1:
            raise InvalidInputError(f"gamma must be >= 1, got {gamma}")
        self.a = a
        self.gamma = gamma

    def pressure(self, rho):
        return pressure(rho, self.a, self.gamma)

    def energy(self, rho):
        return elastic_energy(rho, self.a, self.gamma)

    def total_energy(self, rho_function) -> float:
        """sum_E |E| P(rho_E)."""
        return float(rho_function.mesh.areas @ self.energy(rho_function.coefficients))

    def __repr__(self) -> str:
        return f"PressureLaw(a={self.a}, gamma={self.gamma})"

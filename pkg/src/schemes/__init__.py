"""Дискретные схемы: перенос плотности и уравнение импульса."""
from .transport import (
    EdgeFluxField,
    upwind_flux,
    assemble_transport_system,
    transport_step,
    transport_residual,
    total_mass,
    renormalization_defect,
)
from .base import BaseMomentumScheme, MomentumSolution
from .momentum_cr import CrParams, CrMomentumScheme, assemble_cr_operator, assemble_pressure_load, solve_cr_momentum
from .momentum_mixed import MixedParams, MixedMomentumScheme, assemble_mixed_system, mixed_spaces, solve_mixed_momentum
from .scheme_manager import create_scheme, check_stokes_exponent

__all__ = [
    "EdgeFluxField",
    "upwind_flux",
    "assemble_transport_system",
    "transport_step",
    "transport_residual",
    "total_mass",
    "renormalization_defect",
    "BaseMomentumScheme",
    "MomentumSolution",
    "CrParams",
    "CrMomentumScheme",
    "assemble_cr_operator",
    "assemble_pressure_load",
    "solve_cr_momentum",
    "MixedParams",
    "MixedMomentumScheme",
    "assemble_mixed_system",
    "mixed_spaces",
    "solve_mixed_momentum",
    "create_scheme",
    "check_stokes_exponent",
]

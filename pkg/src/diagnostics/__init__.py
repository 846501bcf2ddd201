"""Диагностика расчетов: записи по шагам, слабые невязки, порядки сходимости."""
from .flux import effective_viscous_flux, flux_density_pairing, flux_norms
from .records import CSV_COLUMNS, DiagnosticsRecord, EnergyLedger, InvariantStatus, make_record
from .weak_form import weak_residual
from .convergence import (
    LevelResult,
    convergence_table,
    cross_scheme_study,
    error_norms_and_rates,
    is_monotone_decreasing,
    observed_rates,
    refinement_ladder,
    stationary_study,
)
from .translation import TranslationReport, translation_estimate_check
from .verification import PropertyResult, run_property_suite

__all__ = [
    "effective_viscous_flux",
    "flux_density_pairing",
    "flux_norms",
    "CSV_COLUMNS",
    "DiagnosticsRecord",
    "EnergyLedger",
    "InvariantStatus",
    "make_record",
    "weak_residual",
    "LevelResult",
    "convergence_table",
    "cross_scheme_study",
    "error_norms_and_rates",
    "is_monotone_decreasing",
    "observed_rates",
    "refinement_ladder",
    "stationary_study",
    "TranslationReport",
    "translation_estimate_check",
    "PropertyResult",
    "run_property_suite",
]

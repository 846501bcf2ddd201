"""Запись и чтение результатов расчета."""
from .results import (
    RunSummary,
    diagnostics_frame,
    read_diagnostics,
    read_fields,
    write_diagnostics,
    write_fields,
    write_summary,
    write_table,
)

__all__ = [
    "RunSummary",
    "diagnostics_frame",
    "read_diagnostics",
    "read_fields",
    "write_diagnostics",
    "write_fields",
    "write_summary",
    "write_table",
]

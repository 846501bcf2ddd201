"""Вспомогательные утилиты."""
from .config import Config, Settings, load_config, parse_config
from .errors import (
    ConfigError,
    InternalBugError,
    InvalidInputError,
    NonConvergenceError,
    RunAbortedError,
    SolverFailureError,
    StokesSolverError,
)
from .logger import set_level, setup_logger
from .retry import retry_with_halving
from .timing import PhaseTimer

__all__ = [
    "Config",
    "Settings",
    "load_config",
    "parse_config",
    "ConfigError",
    "InternalBugError",
    "InvalidInputError",
    "NonConvergenceError",
    "RunAbortedError",
    "SolverFailureError",
    "StokesSolverError",
    "set_level",
    "setup_logger",
    "retry_with_halving",
    "PhaseTimer",
]

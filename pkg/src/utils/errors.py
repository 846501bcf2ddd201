"""Исключения решателя."""
from typing import Any, Optional


class StokesSolverError(Exception):
    """Базовое исключение пакета."""


class InvalidInputError(StokesSolverError, ValueError):
    """Некорректные входные данные."""


class ConfigError(InvalidInputError):
    """Ошибка разбора или валидации конфигурации."""

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        self.key = key
        self.line = line
        location = ""
        if key:
            location = f"{key}: "
        if line is not None:
            location = f"line {line}, {location}"
        super().__init__(f"{location}{message}")


class SolverFailureError(StokesSolverError, RuntimeError):
    """Линейный решатель не справился."""

    def __init__(self, message: str, report: Any = None):
        self.report = report
        super().__init__(message)


class NonConvergenceError(SolverFailureError):
    """Итерации Пикара не сошлись."""

    def __init__(
        self,
        message: str,
        iterations: int,
        increment: float,
        last_rho: Any = None,
        last_u: Any = None,
    ):
        self.iterations = iterations
        self.increment = increment
        self.last_rho = last_rho
        self.last_u = last_u
        super().__init__(
            f"{message} (iterations={iterations}, increment={increment:.3e}); "
            f"try reducing the time step"
        )


class InternalBugError(StokesSolverError, RuntimeError):
    """Нарушен инвариант, который схема гарантирует."""


class RunAbortedError(StokesSolverError):
    """Расчет прерван; хранит частичную траекторию."""

    def __init__(self, message: str, trajectory: Any, records: Any, cause: BaseException):
        self.trajectory = trajectory
        self.records = records
        self.cause = cause
        super().__init__(f"{message}: {cause}")

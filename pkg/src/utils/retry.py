"""Повтор шага по времени с дроблением."""
import logging
from functools import wraps
from typing import Callable, Any

from .errors import NonConvergenceError


def retry_with_halving(
    max_halvings: int = 3,
    exceptions: tuple = (NonConvergenceError,)
):
    """Декоратор: при неудаче шаг dt повторяется как два шага dt/2.

    Оборачиваемая функция имеет сигнатуру ``step(state, dt, *args)`` и
    возвращает ``(state, log)``; логи подшагов объединяются через
    ``log.merge``.
    """
    def decorator(func: Callable) -> Callable:
        @wraps(func)
        def wrapper(state: Any, dt: float, *args, **kwargs) -> Any:
            def attempt(current: Any, step_dt: float, level: int) -> Any:
                try:
                    return func(current, step_dt, *args, **kwargs)
                except exceptions as e:
                    if level >= max_halvings:
                        logging.getLogger(__name__).error(
                            f"Step failed after {level} halvings of dt for {func.__name__}"
                        )
                        raise
                    half = 0.5 * step_dt
                    logging.getLogger(__name__).warning(
                        f"{func.__name__} failed with dt={step_dt:.3e}: {e}. "
                        f"Retrying as two steps of {half:.3e}"
                    )
                    mid, first = attempt(current, half, level + 1)
                    end, second = attempt(mid, half, level + 1)
                    return end, first.merge(second)

            return attempt(state, dt, 0)

        return wrapper
    return decorator

"""Учет времени по фазам расчета."""
import time
from collections import defaultdict
from contextlib import contextmanager
from typing import Dict, Iterator


class PhaseTimer:
    """Накопитель времени (секунды) по именованным фазам."""

    def __init__(self):
        self.totals: Dict[str, float] = defaultdict(float)

    @contextmanager
    def phase(self, name: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            self.totals[name] += time.perf_counter() - start

    def as_dict(self) -> Dict[str, float]:
        return dict(self.totals)

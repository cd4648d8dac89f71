from __future__ import annotations

from typing import Iterable

import numpy as np

from hjbandit.metrics.stat import AbstractMeasurableStat, AbstractStat


class Total(AbstractMeasurableStat):
    """An un-windowed cumulative total."""

    def __init__(self, value: float = 0.0) -> None:
        self._initial = value
        self._total = value

    def record(self, value: float) -> None:
        self._total += value

    def record_many(self, values: Iterable[float]) -> None:
        self._total += float(np.asarray(values, dtype=float).sum())

    def merge(self, other: AbstractStat) -> None:
        self._check_kind(other)
        assert isinstance(other, Total)
        self._total += other._total - other._initial

    def clone(self) -> Total:
        return Total(self._initial)

    def measure(self) -> float:
        return float(self._total)

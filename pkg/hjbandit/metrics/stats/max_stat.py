from __future__ import annotations

from typing import Iterable

import numpy as np

from hjbandit.metrics.stat import AbstractMeasurableStat, AbstractStat


class Max(AbstractMeasurableStat):
    """Largest value seen."""

    def __init__(self) -> None:
        self._value = float("-inf")

    def record(self, value: float) -> None:
        self._value = max(self._value, value)

    def record_many(self, values: Iterable[float]) -> None:
        arr = np.asarray(values, dtype=float)
        if arr.size:
            self._value = max(self._value, float(arr.max()))

    def merge(self, other: AbstractStat) -> None:
        self._check_kind(other)
        assert isinstance(other, Max)
        self._value = max(self._value, other._value)

    def clone(self) -> Max:
        return Max()

    def measure(self) -> float:
        return self._value

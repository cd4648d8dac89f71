from __future__ import annotations

from typing import Iterable

import numpy as np

from hjbandit.metrics.stat import AbstractMeasurableStat, AbstractStat


class Avg(AbstractMeasurableStat):
    """Running mean of everything recorded."""

    def __init__(self) -> None:
        self._sum = 0.0
        self._count = 0

    def record(self, value: float) -> None:
        self._sum += value
        self._count += 1

    def record_many(self, values: Iterable[float]) -> None:
        arr = np.asarray(values, dtype=float)
        self._sum += float(arr.sum())
        self._count += arr.size

    def merge(self, other: AbstractStat) -> None:
        self._check_kind(other)
        assert isinstance(other, Avg)
        self._sum += other._sum
        self._count += other._count

    def clone(self) -> Avg:
        return Avg()

    def measure(self) -> float:
        if not self._count:
            return 0.0
        return self._sum / self._count

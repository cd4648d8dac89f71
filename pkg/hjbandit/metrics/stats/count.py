from __future__ import annotations

from typing import Iterable

import numpy as np

from hjbandit.metrics.stat import AbstractMeasurableStat, AbstractStat


class Count(AbstractMeasurableStat):
    """Number of values seen."""

    def __init__(self) -> None:
        self._count = 0

    def record(self, value: float) -> None:
        self._count += 1

    def record_many(self, values: Iterable[float]) -> None:
        self._count += np.asarray(values).size

    def merge(self, other: AbstractStat) -> None:
        self._check_kind(other)
        assert isinstance(other, Count)
        self._count += other._count

    def clone(self) -> Count:
        return Count()

    def measure(self) -> float:
        return float(self._count)

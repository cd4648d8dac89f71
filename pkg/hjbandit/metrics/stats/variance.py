from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from hjbandit.metrics.stat import AbstractMeasurableStat, AbstractStat


class Variance(AbstractMeasurableStat):
    """Sample variance kept as (count, mean, M2).

    Chunks are combined with the pairwise update of Chan et al., so the
    result does not depend on how replications were split across workers.
    """

    def __init__(self) -> None:
        self._count = 0
        self._mean = 0.0
        self._m2 = 0.0

    def record(self, value: float) -> None:
        self._count += 1
        delta = value - self._mean
        self._mean += delta / self._count
        self._m2 += delta * (value - self._mean)

    def record_many(self, values: Iterable[float]) -> None:
        arr = np.asarray(values, dtype=float).ravel()
        if not arr.size:
            return
        chunk = Variance()
        chunk._count = arr.size
        chunk._mean = float(arr.mean())
        chunk._m2 = float(((arr - chunk._mean) ** 2).sum())
        self.merge(chunk)

    def merge(self, other: AbstractStat) -> None:
        self._check_kind(other)
        assert isinstance(other, Variance)
        if not other._count:
            return
        if not self._count:
            self._count, self._mean, self._m2 = other._count, other._mean, other._m2
            return
        count = self._count + other._count
        delta = other._mean - self._mean
        self._m2 += other._m2 + delta * delta * self._count * other._count / count
        self._mean += delta * other._count / count
        self._count = count

    def clone(self) -> Variance:
        return Variance()

    def measure(self) -> float:
        if self._count < 2:
            return 0.0
        return self._m2 / (self._count - 1)

    def stderr(self) -> float:
        """Standard error of the mean of the recorded values"""
        if self._count < 2:
            return 0.0
        return math.sqrt(self.measure() / self._count)

from __future__ import annotations

import abc
from typing import Iterable, List, NamedTuple

import numpy as np


class AbstractStat(metaclass=abc.ABCMeta):
    """
    An AbstractStat is a quantity such as average, max, etc that is computed
    off the stream of values recorded by a sensor.

    Unlike a time-windowed stat, every stat here is mergeable: two stats of
    the same kind fed disjoint streams can be combined into the stat of the
    concatenated stream. Replication chunks are reduced that way.
    """

    @abc.abstractmethod
    def record(self, value: float) -> None:
        """
        Record the given value

        Arguments:
            value (float): The value to record
        """

    def record_many(self, values: Iterable[float]) -> None:
        for value in np.asarray(values, dtype=float).ravel():
            self.record(float(value))

    @abc.abstractmethod
    def merge(self, other: AbstractStat) -> None:
        """Fold the state of ``other`` (same kind, same setup) into this one"""

    @abc.abstractmethod
    def clone(self) -> AbstractStat:
        """Return an empty stat with the same setup"""

    def _check_kind(self, other: AbstractStat) -> None:
        if type(other) is not type(self):
            raise TypeError(
                f"cannot merge {type(other).__name__} into {type(self).__name__}"
            )


class AbstractMeasurableStat(AbstractStat, metaclass=abc.ABCMeta):
    """A stat that produces a single floating point value (Avg, Max, ...)"""

    @abc.abstractmethod
    def measure(self) -> float: ...


class NamedMeasurable(NamedTuple):
    name: str
    value: float


class AbstractCompoundStat(AbstractStat, metaclass=abc.ABCMeta):
    """
    A compound stat is a stat where a single measurement and associated
    data structure feeds many metrics. This is the example for a
    histogram which has many associated percentiles.
    """

    @abc.abstractmethod
    def stats(self) -> List[NamedMeasurable]: ...


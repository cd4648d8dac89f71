from __future__ import annotations

import threading
from typing import TYPE_CHECKING, Callable, Iterable, List, Optional, Tuple

from hjbandit.metrics.metric_name import MetricName
from hjbandit.metrics.stat import (
    AbstractCompoundStat,
    AbstractMeasurableStat,
    AbstractStat,
)

if TYPE_CHECKING:
    from hjbandit.metrics.metrics import Metrics


class Sensor:
    """
    A sensor applies a continuous sequence of numerical values
    to a set of associated stats. For example a sensor on episode regret
    records one value per replication and maintains the mean, variance and
    interquartile range of the regret distribution.

    Sensors with identical stat layouts can be merged, which is how the
    per-worker sensors of a Monte-Carlo run are reduced.
    """

    def __init__(self, registry: Optional[Metrics], name: str) -> None:
        if not name:
            raise ValueError("name must be non-empty")
        self._lock = threading.RLock()
        self._registry = registry
        self._name = name
        self._stats: List[Tuple[Optional[MetricName], AbstractStat]] = []

    @property
    def name(self) -> str:
        return self._name

    @property
    def stats(self) -> Tuple[AbstractStat, ...]:
        return tuple(stat for _, stat in self._stats)

    def record(self, value: float = 1.0) -> None:
        with self._lock:
            for _, stat in self._stats:
                stat.record(value)

    def record_many(self, values: Iterable[float]) -> None:
        values = list(values) if not hasattr(values, "__len__") else values
        with self._lock:
            for _, stat in self._stats:
                stat.record_many(values)

    def add(self, metric_name: MetricName, stat: AbstractMeasurableStat) -> None:
        """
        Register a metric with this sensor

        Arguments:
            metric_name (MetricName): The name of the metric
            stat (AbstractMeasurableStat): The statistic to keep
        """
        with self._lock:
            self._stats.append((metric_name, stat))
            if self._registry is not None:
                self._registry.register_metric(metric_name, stat.measure)

    def add_compound(self, compound_stat: AbstractCompoundStat) -> None:
        """
        Register a compound statistic with this sensor which
        yields multiple measurable quantities (like a histogram)
        """
        with self._lock:
            self._stats.append((None, compound_stat))
            if self._registry is None:
                return
            for named in compound_stat.stats():
                metric_name = self._registry.metric_name(named.name, self._name)
                self._registry.register_metric(
                    metric_name, _percentile_reader(compound_stat, named.name)
                )

    def merge(self, other: Sensor) -> None:
        if len(other._stats) != len(self._stats):
            raise ValueError(f"sensor {other.name} has a different stat layout")
        with self._lock:
            for (_, mine), (_, theirs) in zip(self._stats, other._stats):
                mine.merge(theirs)

    def detached_copy(self) -> Sensor:
        """Empty sensor with the same stat layout, not bound to any registry"""
        copy = Sensor(None, self._name)
        copy._stats = [(name, stat.clone()) for name, stat in self._stats]
        return copy


def _percentile_reader(stat: AbstractCompoundStat, name: str) -> Callable[[], float]:
    def read() -> float:
        for named in stat.stats():
            if named.name == name:
                return named.value
        return float("nan")

    return read

from __future__ import annotations

from typing import Iterable, List, NamedTuple, Optional, Sequence

from hjbandit.metrics.stat import AbstractCompoundStat, AbstractStat, NamedMeasurable

from .histogram import Histogram


class Percentile(NamedTuple):
    name: str
    percentile: float


class Percentiles(AbstractCompoundStat):
    """A compound stat that reports one or more percentiles.

    Backed by a constant-width histogram, so its memory does not grow with
    the number of replications and two chunks merge exactly.
    """

    def __init__(
        self,
        buckets: int,
        max_val: float,
        min_val: float = 0.0,
        percentiles: Optional[Sequence[Percentile]] = None,
    ) -> None:
        self._percentiles = list(percentiles or [])
        self._setup = (buckets, max_val, min_val)
        self._bin_scheme = Histogram.ConstantBinScheme(buckets, min_val, max_val)
        self._histogram = Histogram(self._bin_scheme)

    def stats(self) -> List[NamedMeasurable]:
        return [
            NamedMeasurable(pct.name, self.value(pct.percentile / 100.0))
            for pct in self._percentiles
        ]

    def value(self, quantile: float) -> float:
        return self._histogram.value(quantile)

    def record(self, value: float) -> None:
        self._histogram.record(value)

    def record_many(self, values: Iterable[float]) -> None:
        self._histogram.record_many(values)

    def merge(self, other: AbstractStat) -> None:
        self._check_kind(other)
        assert isinstance(other, Percentiles)
        self._histogram.merge(other._histogram)

    def clone(self) -> Percentiles:
        buckets, max_val, min_val = self._setup
        return Percentiles(buckets, max_val, min_val, self._percentiles)

from __future__ import annotations

import threading
from typing import TYPE_CHECKING, Dict, Iterable

if TYPE_CHECKING:
    from .metrics import Metric


class DictReporter:
    """A basic dictionary based metrics reporter.

    Store all metrics in a two level dictionary of category > name > metric.
    """

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._store: Dict[str, Dict[str, Metric]] = {}

    def snapshot(self) -> Dict[str, Dict[str, float]]:
        """
        Return a nested dictionary snapshot of all metrics and their
        values at this time. Example:
        {
            'hjb.scheme=implicit': {
                'iterations-avg': 2.4,
                'iterations-max': 5.0
            }
        }
        """
        return {
            category: {name: metric.value() for name, metric in list(metrics.items())}
            for category, metrics in list(self._store.items())
        }

    def init(self, metrics: Iterable[Metric]) -> None:
        for metric in metrics:
            self.metric_change(metric)

    def metric_change(self, metric: Metric) -> None:
        with self._lock:
            category = self.get_category(metric)
            self._store.setdefault(category, {})[metric.metric_name.name] = metric

    def get_category(self, metric: Metric) -> str:
        """
        Return a string category for the metric, made up of the metric's
        group and tags.

        Examples:
            group = 'mc', tags = {'mu': 1.7}
            returns: 'mc.mu=1.7'

            group = 'hjb', tags = None
            returns: 'hjb'
        """
        tags = ",".join(f"{k}={v}" for k, v in sorted(metric.metric_name.tags.items()))
        return ".".join(x for x in [metric.metric_name.group, tags] if x)

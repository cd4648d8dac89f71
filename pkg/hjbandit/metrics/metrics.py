from __future__ import annotations

import logging
import threading
from typing import Any, Callable, Dict, Mapping, Optional

from .dict_reporter import DictReporter
from .metric_name import MetricName
from .stats.sensor import Sensor

logger = logging.getLogger(__name__)

Measurable = Callable[[], float]


class Metric:
    """A named measurable, read lazily whenever a reporter asks for it"""

    __slots__ = ("_measurable", "_metric_name")

    def __init__(self, metric_name: MetricName, measurable: Measurable) -> None:
        self._metric_name = metric_name
        self._measurable = measurable

    @property
    def metric_name(self) -> MetricName:
        return self._metric_name

    def value(self) -> float:
        return float(self._measurable())


class Metrics:
    """
    A registry of sensors and metrics.

    A metric is a named, numerical measurement. A sensor is a handle to
    record numerical measurements as they occur. Each Sensor has zero or
    more associated metrics. For example a Sensor might represent the
    Howard iteration count of a solve, and the metrics could be the
    average, maximum and total of that count.

    Usage looks something like this:

        # set up metrics:
        metrics = Metrics()  # the global repository of metrics and sensors
        sensor = metrics.sensor("howard-iterations")
        metric_name = metrics.metric_name("iterations-avg", "hjb")
        sensor.add(metric_name, Avg())
        metric_name = metrics.metric_name("iterations-max", "hjb")
        sensor.add(metric_name, Max())

        # as values occur:
        sensor.record(iterations)

    Per-worker copies of a sensor come from :meth:`Sensor.detached_copy`
    and are folded back with :meth:`Sensor.merge`.
    """

    def __init__(self, tags: Optional[Mapping[str, Any]] = None) -> None:
        self._lock = threading.RLock()
        self._tags = dict(tags or {})
        self._metrics: Dict[MetricName, Metric] = {}
        self._sensors: Dict[str, Sensor] = {}

    @property
    def metrics(self) -> Dict[MetricName, Metric]:
        return self._metrics

    def metric_name(
        self,
        name: str,
        group: str,
        description: str = "",
        tags: Optional[Mapping[str, Any]] = None,
    ) -> MetricName:
        """
        Create a MetricName with the given name, group, description and tags,
        plus the registry's default tags. Tag in tags takes precedence if the
        same tag key is among the defaults.
        """
        combined_tags = dict(self._tags)
        combined_tags.update(tags or {})
        return MetricName(name, group, description, combined_tags)

    def get_sensor(self, name: str) -> Optional[Sensor]:
        if not name:
            raise ValueError("name must be non-empty")
        return self._sensors.get(name)

    def sensor(self, name: str) -> Sensor:
        """Get or create the sensor with the given unique name"""
        sensor = self.get_sensor(name)
        if sensor is not None:
            return sensor
        with self._lock:
            sensor = self._sensors.get(name)
            if sensor is None:
                sensor = Sensor(self, name)
                self._sensors[name] = sensor
                logger.debug("Added sensor with name %s", name)
            return sensor

    def register_metric(self, metric_name: MetricName, measurable: Measurable) -> None:
        with self._lock:
            if metric_name in self._metrics:
                raise ValueError(
                    f'A metric named "{metric_name}" already exists, cannot'
                    " register another one."
                )
            metric = Metric(metric_name, measurable)
            self._metrics[metric_name] = metric

    def snapshot(self) -> Dict[str, Dict[str, float]]:
        """Nested ``{category: {metric: value}}`` view of every metric"""
        reporter = DictReporter()
        reporter.init(list(self._metrics.values()))
        return reporter.snapshot()

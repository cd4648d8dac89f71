from .dict_reporter import DictReporter
from .metric_name import MetricName
from .metrics import Metric, Metrics
from .stats.sensor import Sensor

__all__ = [
    "DictReporter",
    "Metric",
    "MetricName",
    "Metrics",
    "Sensor",
]

from .avg import Avg
from .count import Count
from .histogram import Histogram
from .max_stat import Max
from .percentiles import Percentile, Percentiles
from .sensor import Sensor
from .total import Total
from .variance import Variance

__all__ = [
    "Avg",
    "Count",
    "Histogram",
    "Max",
    "Percentile",
    "Percentiles",
    "Sensor",
    "Total",
    "Variance",
]

from __future__ import annotations

from typing import Iterable

import numpy as np


class Histogram:
    def __init__(self, bin_scheme: Histogram.ConstantBinScheme) -> None:
        self._hist = np.zeros(bin_scheme.bins, dtype=np.int64)
        self._bin_scheme = bin_scheme

    def record(self, value: float) -> None:
        self._hist[self._bin_scheme.to_bin(value)] += 1

    def record_many(self, values: Iterable[float]) -> None:
        bins = self._bin_scheme.to_bins(np.asarray(values, dtype=float))
        self._hist += np.bincount(bins, minlength=self._bin_scheme.bins)

    @property
    def count(self) -> int:
        return int(self._hist.sum())

    def value(self, quantile: float) -> float:
        """Approximate quantile, interpolated linearly inside the bin.

        Values that fell into the overflow bins report as -inf / +inf.
        """
        count = self.count
        if count == 0:
            return float("nan")
        target = float(quantile) * count
        cumulative = np.cumsum(self._hist)
        b = int(np.searchsorted(cumulative, target, side="left"))
        b = min(b, self._bin_scheme.bins - 1)
        if b == 0 or b == self._bin_scheme.bins - 1:
            return self._bin_scheme.from_bin(b)
        below = cumulative[b - 1]
        inside = self._hist[b]
        frac = (target - below) / inside if inside else 0.0
        lo = self._bin_scheme.from_bin(b)
        return lo + frac * self._bin_scheme.bucket_width

    @property
    def counts(self) -> np.ndarray:
        return self._hist

    def merge(self, other: Histogram) -> None:
        if other._bin_scheme != self._bin_scheme:
            raise ValueError("histograms use different bin schemes")
        self._hist += other._hist

    class ConstantBinScheme:
        def __init__(self, bins: int, min_val: float, max_val: float) -> None:
            if bins < 3:
                raise ValueError("Must have at least 3 bins.")
            if not max_val > min_val:
                raise ValueError("max_val must exceed min_val")
            self._min = float(min_val)
            self._max = float(max_val)
            self._bins = int(bins)
            self._bucket_width = (self._max - self._min) / (self._bins - 2)

        @property
        def bins(self) -> int:
            return self._bins

        @property
        def bucket_width(self) -> float:
            return self._bucket_width

        def __eq__(self, other: object) -> bool:
            return (
                isinstance(other, Histogram.ConstantBinScheme)
                and (self._bins, self._min, self._max)
                == (other._bins, other._min, other._max)
            )

        def __hash__(self) -> int:
            return hash((self._bins, self._min, self._max))

        def from_bin(self, b: int) -> float:
            if b == 0:
                return float("-inf")
            elif b == self._bins - 1:
                return float("inf")
            else:
                return self._min + (b - 1) * self._bucket_width

        def to_bin(self, x: float) -> int:
            return int(self.to_bins(np.asarray([x], dtype=float))[0])

        def to_bins(self, x: np.ndarray) -> np.ndarray:
            inner = np.floor((x - self._min) / self._bucket_width).astype(np.int64) + 1
            inner = np.clip(inner, 1, self._bins - 2)
            out = np.where(x < self._min, 0, inner)
            return np.where(x > self._max, self._bins - 1, out).astype(np.int64)

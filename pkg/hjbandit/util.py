from __future__ import annotations

import hashlib
import math
import os
from typing import Awaitable, Optional, TypeVar, Union

import async_timeout
from packaging.version import Version

__all__ = [
    "wait_for",
    "parse_config_version",
    "round_to",
    "config_digest",
    "worker_count",
    "output_dir_override",
    "SUPPORTED_CONFIG_MAJOR",
]


T = TypeVar("T")

SUPPORTED_CONFIG_MAJOR = 1


async def wait_for(fut: Awaitable[T], timeout: Union[None, int, float] = None) -> T:
    # `asyncio.wait_for()` swallows cancellation on some interpreter versions
    async with async_timeout.timeout(timeout):
        return await fut


def parse_config_version(version: str) -> Version:
    parsed = Version(str(version))
    if parsed.major != SUPPORTED_CONFIG_MAJOR:
        raise ValueError(version)
    return parsed


def round_to(value: float, unit: float) -> float:
    """Round ``value`` to the nearest multiple of ``unit``.

    Halves round away from zero, and the result is snapped to the decimal
    precision of ``unit`` so that e.g. ``round_to(0.415, 0.005)`` is exactly
    ``0.415`` rather than ``0.41500000000000004``.
    """
    if unit <= 0:
        raise ValueError("unit must be positive")
    steps = value / unit
    rounded = math.copysign(math.floor(abs(steps) + 0.5 + 1e-9), steps)
    decimals = max(0, -math.floor(math.log10(unit)) + 1)
    return round(rounded * unit, decimals) + 0.0


def config_digest(text: Union[str, bytes]) -> str:
    if isinstance(text, str):
        text = text.encode("utf-8")
    return hashlib.sha256(text).hexdigest()


def worker_count(default: Optional[int] = None) -> int:
    value = os.environ.get("HJBANDIT_THREADS")
    if value:
        count = int(value)
        if count < 1:
            raise ValueError(f"HJBANDIT_THREADS must be positive: {value}")
        return count
    if default is not None:
        return default
    return min(8, os.cpu_count() or 1)


def output_dir_override() -> Optional[str]:
    return os.environ.get("HJBANDIT_OUTPUT_DIR") or None

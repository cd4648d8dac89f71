import logging
import math
from typing import Callable

import numpy as np

from hjbandit.lattice import GridSpec, ValueField

log = logging.getLogger(__name__)


__all__ = ["field_from", "small_grid", "stationary_grid"]


def small_grid(
    sigma: float = 1.0,
    *,
    nx: int = 41,
    nq: int = 21,
    nt: int = 40,
    K: int = 1,  # noqa: N803
    width: float = 2.5,
) -> GridSpec:
    half = width * sigma
    return GridSpec(-half, half, nx, 1.0, nq, nt, 1.0 / nt, K)


def stationary_grid(
    sigma: float = 1.0, *, nx: int = 41, nq: int = 41, q_max: float = 4.0
) -> GridSpec:
    half = 2.5 * sigma
    return GridSpec(-half, half, nx, q_max, nq, 0, 1.0)


def field_from(
    grid: GridSpec, fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
) -> ValueField:
    """One-arm value slice ``fn(x, q)`` at t = 0"""
    x, q = grid.flat_mesh()
    return ValueField(grid, 0, np.asarray(fn(x[:, 0], q[:, 0]), dtype=float))


def close(a: float, b: float, rel: float = 1e-9, abs_tol: float = 1e-12) -> bool:
    return math.isclose(a, b, rel_tol=rel, abs_tol=abs_tol)

from __future__ import annotations

import itertools
from typing import TYPE_CHECKING, List, Tuple

import numpy as np

if TYPE_CHECKING:
    from .grid import GridSpec

__all__ = ["multilinear", "clamp_states"]


def clamp_states(
    grid: GridSpec, x: np.ndarray, q: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, bool]:
    """Clip states into the grid box; the flag tells whether any moved"""
    x = np.asarray(x, dtype=float)
    q = np.asarray(q, dtype=float)
    cx = np.clip(x, grid.x_min, grid.x_max)
    cq = np.clip(q, grid.q_min, grid.q_max)
    moved = bool(np.any(cx != x) or np.any(cq != q))
    return cx, cq, moved


def _axis_weights(
    coord: np.ndarray, lo: float, step: float, n: int
) -> Tuple[np.ndarray, np.ndarray]:
    pos = np.clip((coord - lo) / step, 0.0, n - 1)
    i0 = np.minimum(np.floor(pos).astype(np.intp), n - 2)
    return i0, pos - i0


def multilinear(
    grid: GridSpec, array: np.ndarray, x: np.ndarray, q: np.ndarray
) -> np.ndarray:
    """Interpolate a C-shaped grid array at states (arm index on last axis).

    States outside the box are clamped onto it.
    """
    x = np.asarray(x, dtype=float)
    q = np.asarray(q, dtype=float)
    x, q = np.broadcast_arrays(x, q)
    batch = x.shape[:-1]
    ndim = 2 * grid.K
    lows: List[np.ndarray] = [np.empty(0)] * ndim
    fracs: List[np.ndarray] = [np.empty(0)] * ndim
    for arm in range(grid.K):
        lows[grid.x_axis(arm)], fracs[grid.x_axis(arm)] = _axis_weights(
            x[..., arm], grid.x_min, grid.dx, grid.nx
        )
        lows[grid.q_axis(arm)], fracs[grid.q_axis(arm)] = _axis_weights(
            q[..., arm], grid.q_min, grid.dq, grid.nq
        )
    out = np.zeros(batch)
    for corner in itertools.product((0, 1), repeat=ndim):
        weight = np.ones(batch)
        index = []
        for axis, bit in enumerate(corner):
            weight = weight * (fracs[axis] if bit else 1.0 - fracs[axis])
            index.append(lows[axis] + bit)
        out = out + weight * array[tuple(index)]
    return out

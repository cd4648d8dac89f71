from __future__ import annotations

import abc
import logging
from typing import Sequence, Tuple

import numpy as np

from hjbandit.errors import IllegalArgumentError, OutOfGrid
from hjbandit.lattice import GridSpec, clamp_states, multilinear

from .abstract import AbstractPolicy, ArrayLike

log = logging.getLogger(__name__)

__all__ = ["GridControlPolicy", "OptimalFromValue", "PiecewiseConstantTable"]


class GridControlPolicy(AbstractPolicy):
    """Policy read from control arrays recorded on a grid at a set of times.

    One-armed controls are interpolated bilinearly in (x, q) and thresholded
    at 0.5. Arm-index controls of several arms use the nearest node. States
    outside the grid are clamped onto it unless ``clamp`` is false.
    """

    continuous = False
    time_dependent = True

    def __init__(
        self,
        grid: GridSpec,
        times: Sequence[float],
        controls: np.ndarray,
        *,
        clamp: bool = True,
    ) -> None:
        controls = np.asarray(controls)
        times_arr = np.asarray(times, dtype=float)
        if controls.shape != (times_arr.size, grid.size):
            raise IllegalArgumentError(
                f"controls of shape {controls.shape} do not match"
                f" {times_arr.size} slices of {grid.size} nodes"
            )
        if times_arr.size == 0:
            raise IllegalArgumentError("at least one control slice is required")
        if np.any(np.diff(times_arr) <= 0):
            raise IllegalArgumentError("control times must be strictly increasing")
        upper = 1 if grid.K == 1 else grid.K - 1
        if np.any(controls < 0) or np.any(controls > upper):
            raise IllegalArgumentError(f"controls must lie in 0..{upper}")
        self.grid = grid
        self.arms = grid.K
        self.times = times_arr
        if controls.dtype.kind not in "iu":
            controls = controls.astype(np.float64 if grid.K == 1 else np.intp)
        self._controls = controls
        self._clamp = clamp
        self._warned = False

    @property
    def name(self) -> str:
        return "grid-control"

    @property
    def controls(self) -> np.ndarray:
        return self._controls

    @abc.abstractmethod
    def slice_index(self, t: ArrayLike) -> np.ndarray:
        """Index of the control slice in force at each time"""

    def _states(self, x: np.ndarray, q: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        cx, cq, moved = clamp_states(self.grid, x, q)
        if moved:
            if not self._clamp:
                raise OutOfGrid("state lies outside the policy grid")
            if not self._warned:
                log.warning("Clamping states that left the grid of %s", self.name)
                self._warned = True
        return cx, cq

    def pull_probability(self, x: ArrayLike, q: ArrayLike, t: ArrayLike) -> ArrayLike:
        if self.arms != 1:
            return super().pull_probability(x, q, t)
        x_arr, q_arr, t_arr = np.broadcast_arrays(
            np.asarray(x, dtype=float), np.asarray(q, dtype=float), np.asarray(t)
        )
        cx, cq = self._states(x_arr, q_arr)
        slices = self.slice_index(t_arr)
        out = np.empty(x_arr.shape)
        for index in np.unique(slices):
            mask = slices == index
            array = self._controls[index].reshape(self.grid.shape)
            share = multilinear(
                self.grid, array, cx[mask][..., None], cq[mask][..., None]
            )
            out[mask] = (share >= 0.5).astype(np.float64)
        return float(out) if out.ndim == 0 else out

    def arm_probabilities(
        self, x: np.ndarray, q: np.ndarray, t: ArrayLike
    ) -> np.ndarray:
        if self.arms == 1:
            pull = np.asarray(self.pull_probability(x[..., 0], q[..., 0], t))
            return np.stack([pull], axis=-1)
        x_arr, q_arr = np.broadcast_arrays(np.asarray(x, float), np.asarray(q, float))
        cx, cq = self._states(x_arr, q_arr)
        batch = x_arr.shape[:-1]
        slices = np.broadcast_to(self.slice_index(np.asarray(t)), batch)
        flat = np.zeros(batch, dtype=np.intp)
        for arm in range(self.arms):
            i_x = np.rint((cx[..., arm] - self.grid.x_min) / self.grid.dx)
            i_q = np.rint((cq[..., arm] - self.grid.q_min) / self.grid.dq)
            flat += (
                i_x.astype(np.intp) * self.grid.x_stride(arm)
                + i_q.astype(np.intp) * self.grid.q_stride(arm)
            )
        chosen = self._controls[slices, flat]
        return np.eye(self.arms)[chosen]


class OptimalFromValue(GridControlPolicy):
    """Optimal policy recovered from the controls of a solved HJB problem.

    The control in force at ``t`` is the one of the nearest stored slice.
    """

    @property
    def name(self) -> str:
        return "optimal"

    def slice_index(self, t: ArrayLike) -> np.ndarray:
        t_arr = np.asarray(t, dtype=float)
        right = np.clip(np.searchsorted(self.times, t_arr), 1, self.times.size - 1)
        if self.times.size == 1:
            return np.zeros(t_arr.shape, dtype=np.intp)
        left = right - 1
        nearer_left = (t_arr - self.times[left]) <= (self.times[right] - t_arr)
        return np.where(nearer_left, left, right).astype(np.intp)


class PiecewiseConstantTable(GridControlPolicy):
    """Decisions frozen between batch times (a batched experiment design).

    ``decisions[b]`` applies on ``[batch_times[b], batch_times[b + 1])``.
    """

    def __init__(
        self,
        grid: GridSpec,
        batch_times: Sequence[float],
        decisions: np.ndarray,
        *,
        clamp: bool = True,
    ) -> None:
        if len(batch_times) and batch_times[-1] >= 1.0:
            raise IllegalArgumentError("the last batch must start before t = 1")
        super().__init__(grid, batch_times, decisions, clamp=clamp)

    @property
    def name(self) -> str:
        return "piecewise-table"

    @property
    def batch_times(self) -> np.ndarray:
        return self.times

    @property
    def decisions(self) -> np.ndarray:
        return self.controls

    def slice_index(self, t: ArrayLike) -> np.ndarray:
        index = np.searchsorted(self.times, np.asarray(t, dtype=float), side="right")
        return np.clip(index - 1, 0, self.times.size - 1).astype(np.intp)

"""Finite-difference stencils applied directly to a value slice.

These are the pointwise counterparts of the assembled operators in
:mod:`hjbandit.lattice.operator`. Results are flat arrays in storage order.
"""

from __future__ import annotations

from typing import Union

import numpy as np

from .grid import ValueField

__all__ = ["upwind_first_x", "second_x", "forward_q"]


def _arm_view(field: ValueField, axis: int) -> np.ndarray:
    return np.moveaxis(field.as_array(), axis, -1)


def _flat(field: ValueField, view: np.ndarray, axis: int) -> np.ndarray:
    return np.moveaxis(view, -1, axis).reshape(field.grid.size)


def upwind_first_x(
    field: ValueField, drift: Union[float, np.ndarray], arm: int = 0
) -> np.ndarray:
    """First x-derivative, forward where ``drift >= 0`` and backward otherwise.

    At the edges only one neighbour exists and that one-sided difference is
    used whatever the drift sign. The assembled generator drops the drift
    instead where the upwind neighbour is missing, so the two agree on
    interior nodes only.
    """
    grid = field.grid
    axis = grid.x_axis(arm)
    v = _arm_view(field, axis)
    drift = np.broadcast_to(np.asarray(drift, dtype=float), (grid.size,))
    b = np.moveaxis(drift.reshape(grid.shape), axis, -1)

    diff = np.diff(v, axis=-1) / grid.dx
    forward = np.empty_like(v)
    backward = np.empty_like(v)
    forward[..., :-1] = diff
    forward[..., -1] = diff[..., -1]
    backward[..., 1:] = diff
    backward[..., 0] = diff[..., 0]
    return _flat(field, np.where(b >= 0, forward, backward), axis)


def second_x(field: ValueField, arm: int = 0) -> np.ndarray:
    """Central second x-difference; zero on the two x-boundary columns"""
    grid = field.grid
    axis = grid.x_axis(arm)
    v = _arm_view(field, axis)
    out = np.zeros_like(v)
    out[..., 1:-1] = (v[..., 2:] - 2.0 * v[..., 1:-1] + v[..., :-2]) / grid.dx**2
    return _flat(field, out, axis)


def forward_q(field: ValueField, arm: int = 0) -> np.ndarray:
    """Forward q-difference; zero at q_max where the process is absorbed"""
    grid = field.grid
    axis = grid.q_axis(arm)
    v = _arm_view(field, axis)
    out = np.zeros_like(v)
    out[..., :-1] = np.diff(v, axis=-1) / grid.dq
    return _flat(field, out, axis)

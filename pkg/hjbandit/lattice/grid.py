from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, NamedTuple, Tuple

import numpy as np

from hjbandit.errors import IllegalArgumentError, UnsupportedK

from .interp import multilinear

__all__ = [
    "GridSpec",
    "GridPreset",
    "PRESETS",
    "ValueField",
    "MAX_ARMS",
]

MAX_ARMS = 3
# nt * dt must equal the unit horizon this closely
HORIZON_TOLERANCE = 1e-12


class GridPreset(NamedTuple):
    x_cells: int
    "Number of cells across the x range"

    q_step: float
    "Pull-fraction increment"

    t_step: float
    "Time increment"


PRESETS: Dict[str, GridPreset] = {
    "paper": GridPreset(1000, 1 / 500, 1 / 1000),
    "desk": GridPreset(200, 1 / 100, 1 / 200),
}


@dataclass(frozen=True)
class GridSpec:
    """Rectangular lattice over (x, q) for each arm, plus a time step.

    The same x and q axes are used for every arm. Nodes are stored with x
    fastest, then q, then the next arm's x, and so on, so arm ``k``'s x axis
    has stride ``(nx * nq) ** k``. Time runs over ``t_m = m * dt`` for
    ``m = 0..nt``; ``nt == 0`` marks a stationary (discounted) grid.

    Arguments:
        x_min (float): lower x bound
        x_max (float): upper x bound
        nx (int): x node count, at least 3
        q_max (float): upper q bound
        nq (int): q node count, at least 2
        nt (int): number of time steps. Default: 0
        dt (float): time increment. Default: 1.0
        K (int): number of arms. Default: 1
    """

    x_min: float
    x_max: float
    nx: int
    q_max: float
    nq: int
    nt: int = 0
    dt: float = 1.0
    K: int = 1
    q_min: float = field(default=0.0, repr=False)

    def __post_init__(self) -> None:
        if not self.x_max > self.x_min:
            raise IllegalArgumentError("x_max must exceed x_min")
        if self.nx < 3:
            raise IllegalArgumentError(f"need at least 3 x nodes, got {self.nx}")
        if self.nq < 2:
            raise IllegalArgumentError(f"need at least 2 q nodes, got {self.nq}")
        if self.q_min != 0.0:
            raise IllegalArgumentError("q axis starts at 0")
        if not self.q_max > 0:
            raise IllegalArgumentError("q_max must be positive")
        if not self.dt > 0:
            raise IllegalArgumentError("dt must be positive")
        if self.nt < 0:
            raise IllegalArgumentError("nt must be nonnegative")
        if self.nt and abs(self.nt * self.dt - 1.0) > HORIZON_TOLERANCE:
            raise IllegalArgumentError(
                f"nt * dt = {self.nt * self.dt!r} does not cover the unit horizon"
            )
        if not 1 <= self.K <= MAX_ARMS:
            raise UnsupportedK(f"grids are materialised for 1..{MAX_ARMS} arms")

    @classmethod
    def from_preset(
        cls,
        preset: str,
        sigma: float,
        *,
        K: int = 1,  # noqa: N803
        x_width: float = 2.5,
        q_max: float = 1.0,
        stationary: bool = False,
    ) -> GridSpec:
        """Grid with x in ``+-x_width*sigma`` and the preset's resolution"""
        try:
            setup = PRESETS[preset]
        except KeyError:
            raise IllegalArgumentError(
                f"unknown grid preset {preset!r}, expected one of {sorted(PRESETS)}"
            ) from None
        half = x_width * sigma
        nq = int(round(q_max / setup.q_step)) + 1
        nt = 0 if stationary else int(round(1.0 / setup.t_step))
        return cls(
            x_min=-half,
            x_max=half,
            nx=setup.x_cells + 1,
            q_max=q_max,
            nq=nq,
            nt=nt,
            dt=1.0 / nt if nt else setup.t_step,
            K=K,
        )

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def dq(self) -> float:
        return (self.q_max - self.q_min) / (self.nq - 1)

    @property
    def stationary(self) -> bool:
        return self.nt == 0

    @property
    def x_nodes(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def q_nodes(self) -> np.ndarray:
        return np.linspace(self.q_min, self.q_max, self.nq)

    @property
    def t_nodes(self) -> np.ndarray:
        return np.arange(self.nt + 1) * self.dt

    @property
    def arm_size(self) -> int:
        return self.nx * self.nq

    @property
    def size(self) -> int:
        return self.arm_size**self.K

    @property
    def shape(self) -> Tuple[int, ...]:
        """Numpy (C-order) shape of a value slice: ``(..., nq, nx)`` per arm"""
        return (self.nq, self.nx) * self.K

    def x_axis(self, arm: int = 0) -> int:
        return 2 * self.K - 1 - 2 * arm

    def q_axis(self, arm: int = 0) -> int:
        return 2 * self.K - 2 - 2 * arm

    def x_stride(self, arm: int = 0) -> int:
        return self.arm_size**arm

    def q_stride(self, arm: int = 0) -> int:
        return self.nx * self.arm_size**arm

    def arm_grid(self) -> GridSpec:
        """The one-arm (x, q) grid with the same axes and time step"""
        return GridSpec(
            self.x_min, self.x_max, self.nx, self.q_max, self.nq, self.nt, self.dt
        )

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        """State coordinates of every node, shaped ``(*shape, K)``"""
        x_nodes = self.x_nodes
        q_nodes = self.q_nodes
        xs = []
        qs = []
        for arm in range(self.K):
            index = [1] * (2 * self.K)
            index[self.x_axis(arm)] = self.nx
            xs.append(np.broadcast_to(x_nodes.reshape(index), self.shape))
            index = [1] * (2 * self.K)
            index[self.q_axis(arm)] = self.nq
            qs.append(np.broadcast_to(q_nodes.reshape(index), self.shape))
        return np.stack(xs, axis=-1), np.stack(qs, axis=-1)

    def flat_mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        """:meth:`mesh` flattened to ``(size, K)`` in storage order"""
        x, q = self.mesh()
        return x.reshape(-1, self.K), q.reshape(-1, self.K)

    def node_index(self, x: float, q: float, arm: int = 0) -> Tuple[int, int]:
        """Nearest node indices of a one-arm state"""
        i_x = int(round((x - self.x_min) / self.dx))
        i_q = int(round((q - self.q_min) / self.dq))
        return min(max(i_x, 0), self.nx - 1), min(max(i_q, 0), self.nq - 1)

    def time_index(self, t: float) -> int:
        """Nearest time slice of ``t``"""
        if self.stationary:
            return 0
        return min(max(int(math.floor(t / self.dt + 0.5)), 0), self.nt)


@dataclass(frozen=True)
class ValueField:
    """A value function sampled at one time slice of a grid.

    ``values`` is flat in the grid's storage order and read-only.
    """

    grid: GridSpec
    time_index: int
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64).ravel()
        if values.size != self.grid.size:
            raise IllegalArgumentError(
                f"value slice has {values.size} entries, grid has {self.grid.size}"
            )
        if not np.all(np.isfinite(values)):
            raise IllegalArgumentError("value slice is not finite everywhere")
        if not 0 <= self.time_index <= max(self.grid.nt, 0):
            raise IllegalArgumentError(f"time index {self.time_index} out of range")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def t(self) -> float:
        return self.time_index * self.grid.dt if self.grid.nt else 0.0

    def as_array(self) -> np.ndarray:
        return self.values.reshape(self.grid.shape)

    def at_origin(self) -> float:
        """Value at x = 0, q = 0 for every arm (bilinear in x)"""
        return float(self.interpolate(np.zeros(self.grid.K), np.zeros(self.grid.K)))

    def interpolate(self, x: np.ndarray, q: np.ndarray) -> np.ndarray:
        """Multilinear interpolation at states clamped into the grid.

        ``x`` and ``q`` carry the arm index on their last axis.
        """
        return multilinear(self.grid, self.as_array(), x, q)

    def with_values(self, values: np.ndarray, time_index: int) -> ValueField:
        return ValueField(self.grid, time_index, values)

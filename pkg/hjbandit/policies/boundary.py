"""Diagnostics of policies on a grid: the stopping boundary of a solved
one-armed problem and finite-difference Lipschitz estimates."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Iterator, NamedTuple, Tuple

import numpy as np

from hjbandit.beliefs import PriorSpec
from hjbandit.errors import NoSwitchInRange, UnsupportedK
from hjbandit.lattice import GridSpec

from .abstract import AbstractPolicy
from .rules import Thompson

if TYPE_CHECKING:
    from hjbandit.hjb.solver import Solution

log = logging.getLogger(__name__)

__all__ = [
    "StoppingBoundary",
    "extract_stopping_boundary",
    "lipschitz_estimate",
    "thompson_continuity_check",
]


class StoppingBoundary(NamedTuple):
    """Switching surface ``f(q, t)`` of a policy ``1{x > f(q, t)}``.

    ``-inf`` marks a (q, t) where the policy pulls over the whole x range,
    ``+inf`` one where it never pulls.
    """

    q: np.ndarray
    "q nodes, shape ``(nq,)``"

    t: np.ndarray
    "Times of the stored slices, shape ``(nt,)``"

    x: np.ndarray
    "Smallest pulling x node, shape ``(nt, nq)``"

    def rows(self) -> Iterator[Tuple[float, float, float]]:
        """``(q, t, x_boundary)`` triples, q fastest"""
        for i_t, t in enumerate(self.t):
            for i_q, q in enumerate(self.q):
                yield float(q), float(t), float(self.x[i_t, i_q])


def extract_stopping_boundary(
    solution: Solution, *, strict: bool = False
) -> StoppingBoundary:
    """Smallest grid x at which the recorded control pulls, per (q, t).

    Raises:
        UnsupportedK: the solution has more than one arm
        NoSwitchInRange: ``strict`` is set and the control does not switch
            within the x range at some (q, t)
    """
    grid = solution.grid
    if grid.K != 1:
        raise UnsupportedK("stopping boundaries are defined for one arm")
    x_nodes = grid.x_nodes
    times = np.array([field.t for field in solution.fields])
    boundary = np.empty((times.size, grid.nq))
    constant = 0
    for i_t, control in enumerate(solution.controls):
        pulls = np.asarray(control).reshape(grid.nq, grid.nx) >= 0.5
        first = np.argmax(pulls, axis=1)
        any_pull = pulls.any(axis=1)
        row = np.where(any_pull, x_nodes[first], np.inf)
        row = np.where(pulls[:, 0], -np.inf, row)
        boundary[i_t] = row
        constant += int(np.count_nonzero(~np.isfinite(row)))
    if constant:
        if strict:
            raise NoSwitchInRange(
                f"control is constant in x at {constant} (q, t) node(s)"
            )
        log.debug("Control does not switch at %d (q, t) node(s)", constant)
    return StoppingBoundary(grid.q_nodes, times, boundary)


def lipschitz_estimate(policy: AbstractPolicy, grid: GridSpec, t: float = 0.0) -> float:
    """Largest finite-difference slope of the pull probability between
    neighbouring nodes of a one-armed grid"""
    if grid.K != 1:
        raise UnsupportedK("Lipschitz estimates are computed for one arm")
    x, q = grid.mesh()
    share = np.asarray(policy.pull_probability(x[..., 0], q[..., 0], t), dtype=float)
    share = np.broadcast_to(share, grid.shape)
    slope_x = np.abs(np.diff(share, axis=grid.x_axis())) / grid.dx
    slope_q = np.abs(np.diff(share, axis=grid.q_axis())) / grid.dq
    return float(max(slope_x.max(initial=0.0), slope_q.max(initial=0.0)))


def thompson_continuity_check(prior: PriorSpec, sigma: float, grid: GridSpec) -> float:
    """Lipschitz estimate of Thompson sampling on ``grid``; a finite value
    documents that the risk PDE applies to it"""
    value = lipschitz_estimate(Thompson(prior, sigma), grid)
    log.info("Thompson sampling Lipschitz estimate on the grid: %.4g", value)
    return value

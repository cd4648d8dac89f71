"""Single backward time steps of the one-armed regret HJB equation.

Time runs backwards: a step maps the slice at ``t + dt`` to the slice at
``t``. Each function takes the earlier-computed slice and returns a
:class:`StepResult` for the next one.
"""

from __future__ import annotations

import logging
from typing import Callable, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from hjbandit.lattice import (
    ArmBlockSolver,
    GridSpec,
    ValueField,
    apply_block,
    check_cfl,
    factorize,
)

from .howard import (
    DEFAULT_MAX_ITER,
    DEFAULT_TOLERANCE,
    StepResult,
    howard_implicit,
)

log = logging.getLogger(__name__)

__all__ = [
    "HjbCoefficients",
    "HybridPullSolver",
    "ArmwiseSolver",
    "step_explicit",
    "step_implicit_howard",
    "step_hybrid",
]


class HjbCoefficients(NamedTuple):
    generator: sp.csr_matrix
    "Upwind generator L of the pulled arm on the slice's grid"

    mean: np.ndarray
    "Posterior mean mu(s) per node"

    mu_plus: np.ndarray
    "Posterior E[max(mu, 0)] per node"


def step_explicit(field: ValueField, coeffs: HjbCoefficients, dt: float) -> StepResult:
    """``V + dt * (mu_plus + min(-mu + L V, 0))`` evaluated at the old slice

    Raises:
        CFLViolation: ``dt`` too large for a monotone explicit step
    """
    check_cfl(field.grid, coeffs.generator, dt)
    old = field.values
    advantage = coeffs.generator @ old - coeffs.mean
    new = old + dt * (coeffs.mu_plus + np.minimum(advantage, 0.0))
    control = (advantage <= 0).astype(np.float64)
    return StepResult(new, control, 1, 0.0)


def step_implicit_howard(
    field: ValueField,
    coeffs: HjbCoefficients,
    dt: float,
    *,
    control: Optional[np.ndarray] = None,
    tol: float = DEFAULT_TOLERANCE,
    max_iter: int = DEFAULT_MAX_ITER,
) -> StepResult:
    """Fully implicit upwind step solved by policy iteration"""
    return howard_implicit(
        coeffs.generator,
        field.values,
        dt,
        coeffs.mean,
        coeffs.mu_plus,
        control,
        tol=tol,
        max_iter=max_iter,
    )


class HybridPullSolver:
    """Factorised pull branch ``(I - dt L) V = old + dt (mu_plus - mu)``.

    The matrix does not depend on time, so one factorisation serves every
    step of a solve.
    """

    def __init__(self, coeffs: HjbCoefficients, dt: float) -> None:
        n = coeffs.mean.shape[0]
        self._coeffs = coeffs
        self._dt = dt
        self._matrix = sp.identity(n, format="csr") - dt * coeffs.generator
        self._solve: Callable[[np.ndarray], np.ndarray] = factorize(self._matrix)

    def pull_branch(self, old: np.ndarray) -> Tuple[np.ndarray, float]:
        """Always-pull step and the residual of its linear solve"""
        c = self._coeffs
        rhs = old + self._dt * (c.mu_plus - c.mean)
        pull = self._solve(rhs)
        residual = float(np.max(np.abs(self._matrix @ pull - rhs), initial=0.0))
        return pull, residual

    def step(self, old: np.ndarray) -> StepResult:
        pull, residual = self.pull_branch(old)
        stay = old + self._dt * self._coeffs.mu_plus
        control = (pull <= stay).astype(np.float64)
        return StepResult(np.minimum(pull, stay), control, 1, residual)


def step_hybrid(
    field: ValueField,
    coeffs: HjbCoefficients,
    dt: float,
    *,
    solver: Optional[HybridPullSolver] = None,
) -> StepResult:
    """Implicit pull branch and explicit no-pull branch, elementwise minimum"""
    if solver is None:
        solver = HybridPullSolver(coeffs, dt)
    return solver.step(field.values)


class ArmwiseSolver:
    """One implicit solve per arm, then the elementwise minimum over arms.

    Arm ``k``'s branch solves ``(I - dt L_k) V = old + dt * gap_k`` where the
    generator acts on arm ``k``'s coordinates only. This is the hybrid scheme
    for several arms and, with zero gaps, the best-arm identification step.
    """

    def __init__(
        self, grid: GridSpec, arm_generators: Sequence[sp.spmatrix], dt: float
    ) -> None:
        self._grid = grid
        self._dt = dt
        identity = sp.identity(grid.arm_size, format="csr")
        self._blocks = [identity - dt * gen for gen in arm_generators]
        self._solvers = [
            ArmBlockSolver(grid, block, arm) for arm, block in enumerate(self._blocks)
        ]

    @property
    def arms(self) -> int:
        return len(self._solvers)

    def branch(
        self, arm: int, old: np.ndarray, gap: Optional[np.ndarray]
    ) -> np.ndarray:
        rhs = old if gap is None else old + self._dt * gap
        return self._solvers[arm].solve(rhs)

    def branch_residual(
        self, arm: int, value: np.ndarray, old: np.ndarray, gap: Optional[np.ndarray]
    ) -> float:
        rhs = old if gap is None else old + self._dt * gap
        applied = apply_block(self._blocks[arm], value, self._grid, arm)
        return float(np.max(np.abs(applied - rhs), initial=0.0))

    def step(self, old: np.ndarray, gaps: Optional[np.ndarray] = None) -> StepResult:
        """``gaps`` has shape ``(size, K)``: instantaneous regret of each arm"""
        columns = []
        residual = 0.0
        for arm in range(self.arms):
            gap = None if gaps is None else gaps[:, arm]
            value = self.branch(arm, old, gap)
            residual = max(residual, self.branch_residual(arm, value, old, gap))
            columns.append(value)
        branches = np.stack(columns, axis=-1)
        # argmin keeps the lowest arm index on ties
        control = np.argmin(branches, axis=-1)
        new = np.take_along_axis(branches, control[:, None], axis=-1)[:, 0]
        return StepResult(new, control.astype(np.float64), 1, residual)

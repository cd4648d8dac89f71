"""Policy iteration (Howard's algorithm) for the binary pull/no-pull control."""

from __future__ import annotations

import logging
from typing import NamedTuple, Optional

import numpy as np
import scipy.sparse as sp

from hjbandit.errors import HowardNonconvergence
from hjbandit.lattice import factorize

log = logging.getLogger(__name__)

__all__ = [
    "StepResult",
    "DEFAULT_TOLERANCE",
    "DEFAULT_MAX_ITER",
    "pull_control",
    "hjb_step_residual",
    "howard_implicit",
    "howard_stationary",
]

DEFAULT_TOLERANCE = 1e-9
DEFAULT_MAX_ITER = 100
# iteration count above which a step is reported as slow
_SLOW_ITERATIONS = 20


class StepResult(NamedTuple):
    values: np.ndarray
    "New value slice (flat)"

    control: np.ndarray
    "Control at every node: 1/0 pull decision, or the chosen arm index"

    iterations: int
    "Policy iterations used (1 for non-iterative schemes)"

    residual: float
    "Sup-norm residual of the discrete equations, in value units"


def pull_control(advantage: np.ndarray) -> np.ndarray:
    """Pull where ``-mu + L V <= 0``; ties pull"""
    return (advantage <= 0).astype(np.float64)


def hjb_step_residual(
    new: np.ndarray,
    old: np.ndarray,
    dt: float,
    generator: sp.spmatrix,
    mean: np.ndarray,
    mu_plus: np.ndarray,
) -> float:
    """``|new - old - dt * (mu_plus + min(-mu + L new, 0))|`` in sup norm"""
    advantage = generator @ new - mean
    defect = new - old - dt * (mu_plus + np.minimum(advantage, 0.0))
    return float(np.max(np.abs(defect), initial=0.0))


def howard_implicit(
    generator: sp.spmatrix,
    old: np.ndarray,
    dt: float,
    mean: np.ndarray,
    mu_plus: np.ndarray,
    control: Optional[np.ndarray] = None,
    *,
    tol: float = DEFAULT_TOLERANCE,
    max_iter: int = DEFAULT_MAX_ITER,
) -> StepResult:
    """Solve ``min_a {(I - dt a L) V - old - dt (mu_plus - a mu)} = 0``.

    Alternates a sparse solve at fixed control with the pointwise control
    update, starting from ``control`` (or always-pull). Stops when the
    control set repeats or the value moves less than ``tol`` in sup norm.

    Raises:
        HowardNonconvergence: neither criterion met in ``max_iter`` iterations
        SingularSystem: a controlled system could not be factorised
    """
    n = old.shape[0]
    identity = sp.identity(n, format="csr")
    a = np.ones(n) if control is None else np.asarray(control, dtype=np.float64)
    values: Optional[np.ndarray] = None
    change = np.inf
    for iteration in range(1, max_iter + 1):
        matrix = identity - dt * (sp.diags(a) @ generator)
        new = factorize(matrix)(old + dt * (mu_plus - a * mean))
        if values is not None:
            change = float(np.max(np.abs(new - values)))
        values = new
        new_a = pull_control(generator @ new - mean)
        if np.array_equal(new_a, a) or change < tol:
            if iteration > _SLOW_ITERATIONS:
                log.warning("Howard step needed %d iterations", iteration)
            residual = hjb_step_residual(new, old, dt, generator, mean, mu_plus)
            log.debug(
                "Howard step settled after %d iteration(s), residual %.3e",
                iteration,
                residual,
            )
            return StepResult(new, new_a, iteration, residual)
        a = new_a
    raise HowardNonconvergence(max_iter, change)


def howard_stationary(
    generator: sp.spmatrix,
    beta: float,
    mean: np.ndarray,
    mu_plus: np.ndarray,
    control: Optional[np.ndarray] = None,
    *,
    tol: float = DEFAULT_TOLERANCE,
    max_iter: int = DEFAULT_MAX_ITER,
) -> StepResult:
    """Solve ``beta V = mu_plus + min(-mu + L V, 0)`` by policy iteration.

    Every iterate after the first is the value of an improved policy, so the
    sequence is nonincreasing; this is asserted on each iteration.
    """
    n = mean.shape[0]
    identity = sp.identity(n, format="csr")
    a = (mean >= 0).astype(np.float64) if control is None else control
    values: Optional[np.ndarray] = None
    change = np.inf
    for iteration in range(1, max_iter + 1):
        matrix = beta * identity - sp.diags(a) @ generator
        new = factorize(matrix)(mu_plus - a * mean)
        if values is not None:
            slack = tol * (1.0 + np.abs(values))
            assert np.all(new <= values + slack), "policy iteration increased V"
            change = float(np.max(np.abs(new - values)))
        values = new
        advantage = generator @ new - mean
        new_a = pull_control(advantage)
        log.debug("Stationary Howard iteration %d, change %.3e", iteration, change)
        if np.array_equal(new_a, a) or change < tol:
            defect = beta * new - mu_plus - np.minimum(advantage, 0.0)
            residual = float(np.max(np.abs(defect), initial=0.0))
            return StepResult(new, new_a, iteration, residual)
        a = new_a
    raise HowardNonconvergence(max_iter, change)

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse import linalg as splinalg

from hjbandit.errors import CFLViolation, IllegalArgumentError, SingularSystem

from .grid import GridSpec

log = logging.getLogger(__name__)

__all__ = [
    "Coefficients",
    "SparseStep",
    "ArmBlockSolver",
    "generator_matrix",
    "assemble_generator",
    "apply_block",
    "factorize",
    "is_m_matrix",
    "explicit_dt_bound",
    "check_cfl",
]

Numeric = Union[float, np.ndarray]


class Coefficients(NamedTuple):
    """Per-node coefficients of one arm's generator.

    ``L V = drift_q * V_q + drift_x * V_x + diffusion_x / 2 * V_xx``
    """

    drift_x: Numeric
    "Posterior mean of the arm, the drift of x"

    diffusion_x: Numeric
    "Reward variance of the arm"

    drift_q: Numeric = 1.0
    "Rate at which q grows while the arm is pulled"


def _node_array(value: Numeric, size: int, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.ndim and arr.size != size:
        raise IllegalArgumentError(f"{name} has {arr.size} entries, grid has {size}")
    return np.broadcast_to(arr.reshape(-1) if arr.ndim else arr, (size,))


def generator_matrix(
    grid: GridSpec, coeffs: Coefficients, arm: int = 0
) -> sp.csr_matrix:
    """Monotone (upwind) discretisation of arm ``arm``'s generator.

    Off-diagonals are nonnegative and every row sums to zero. The x-drift
    uses the upwind neighbour; at an x-edge where that neighbour is off the
    grid the drift term is dropped. This differs from
    :func:`~hjbandit.lattice.stencils.upwind_first_x`, which takes the
    one-sided difference there: coupling to the downwind neighbour would
    give a negative off-diagonal and the step would stop being monotone.
    The second difference vanishes on the x-edges and the q-difference
    vanishes at q_max.
    """
    n = grid.size
    drift_x = _node_array(coeffs.drift_x, n, "drift_x")
    diffusion = _node_array(coeffs.diffusion_x, n, "diffusion_x")
    drift_q = _node_array(coeffs.drift_q, n, "drift_q")
    if np.any(diffusion < 0):
        raise IllegalArgumentError("diffusion coefficient must be nonnegative")
    if np.any(drift_q < 0):
        raise IllegalArgumentError("q drift must be nonnegative")

    sx = grid.x_stride(arm)
    sq = grid.q_stride(arm)
    flat = np.arange(n)
    i_x = (flat // sx) % grid.nx
    i_q = (flat // sq) % grid.nq
    has_left = i_x > 0
    has_right = i_x < grid.nx - 1
    interior = has_left & has_right

    half_diff = 0.5 * diffusion / grid.dx**2
    up = np.where(has_right, np.maximum(drift_x, 0.0) / grid.dx, 0.0)
    up = up + np.where(interior, half_diff, 0.0)
    down = np.where(has_left, np.maximum(-drift_x, 0.0) / grid.dx, 0.0)
    down = down + np.where(interior, half_diff, 0.0)
    ahead = np.where(i_q < grid.nq - 1, drift_q / grid.dq, 0.0)

    diagonal = -(up + down + ahead)
    matrix = sp.diags(
        [diagonal, up[: n - sx], down[sx:], ahead[: n - sq]],
        [0, sx, -sx, sq],
        shape=(n, n),
        format="csr",
    )
    return matrix


def explicit_dt_bound(matrix: sp.spmatrix) -> float:
    """Largest dt keeping ``I + dt * matrix`` nonnegative"""
    rate = float(np.max(-matrix.diagonal(), initial=0.0))
    return np.inf if rate <= 0 else 1.0 / rate


def check_cfl(grid: GridSpec, matrix: sp.spmatrix, dt: float) -> None:
    """Raise CFLViolation unless an explicit step of ``matrix`` is monotone.

    Both the grid rule ``dt <= 0.5 * min(dx**2, dq**2)`` and the bound from
    the assembled coefficients must hold.
    """
    bound = 0.5 * min(grid.dx**2, grid.dq**2)
    if dt > bound:
        raise CFLViolation(dt, bound)
    coefficient_bound = explicit_dt_bound(matrix)
    if dt > coefficient_bound:
        raise CFLViolation(dt, coefficient_bound)


def is_m_matrix(matrix: sp.spmatrix, tol: float = 1e-12) -> bool:
    """Positive diagonal, nonpositive off-diagonals, weak row dominance"""
    csr = sp.csr_matrix(matrix)
    diagonal = csr.diagonal()
    off = csr - sp.diags(diagonal)
    if np.any(diagonal <= 0) or (off.nnz and off.data.max() > tol):
        return False
    off_sum = np.asarray(abs(off).sum(axis=1)).ravel()
    return bool(np.all(diagonal + tol >= off_sum))


@functools.lru_cache(maxsize=None)
def _identity(n: int) -> sp.csr_matrix:
    return sp.identity(n, format="csr")


@dataclass(frozen=True)
class SparseStep:
    """One time step of a linear scheme.

    Explicit (``theta == 0``): ``V_next = matrix @ V + rhs_offset``.
    Implicit (``theta == 1``): ``matrix @ V_next = V + rhs_offset``.
    """

    matrix: sp.csr_matrix
    rhs_offset: np.ndarray
    theta: int

    def __post_init__(self) -> None:
        self.rhs_offset.setflags(write=False)

    @functools.cached_property
    def _solve(self) -> Callable[[np.ndarray], np.ndarray]:
        return factorize(self.matrix)

    def apply(self, values: np.ndarray) -> np.ndarray:
        if self.theta == 0:
            return self.matrix @ values + self.rhs_offset
        return self._solve(values + self.rhs_offset)


def factorize(matrix: sp.spmatrix) -> Callable[[np.ndarray], np.ndarray]:
    """Sparse LU of ``matrix``; raises SingularSystem instead of RuntimeError"""
    try:
        lu = splinalg.splu(sp.csc_matrix(matrix))
    except RuntimeError as err:
        raise SingularSystem(str(err)) from err
    return lu.solve


def assemble_generator(
    grid: GridSpec,
    coeffs: Coefficients,
    theta: int,
    dt: float,
    *,
    control: Optional[np.ndarray] = None,
    source: Optional[np.ndarray] = None,
    arm: int = 0,
) -> SparseStep:
    """Build one backward step of ``V_t + source + control * L V = 0``.

    Time is reversed, so a step maps the slice at ``t + dt`` to the slice at
    ``t``. ``control`` multiplies the generator row-wise (the pull
    probability); omitted means one everywhere.

    Raises:
        CFLViolation: explicit step with ``dt > 0.5 * min(dx**2, dq**2)`` or
            with a step too large for the assembled coefficients
    """
    if theta not in (0, 1):
        raise IllegalArgumentError("theta must be 0 (explicit) or 1 (implicit)")
    if not dt > 0:
        raise IllegalArgumentError("dt must be positive")
    L = generator_matrix(grid, coeffs, arm)  # noqa: N806
    if control is not None:
        control = np.asarray(control, dtype=float)
        L = sp.diags(control) @ L  # noqa: N806
    identity = _identity(grid.size)
    offset = np.zeros(grid.size) if source is None else dt * np.asarray(source, float)

    if theta == 1:
        return SparseStep(sp.csr_matrix(identity - dt * L), offset, 1)

    check_cfl(grid, L, dt)
    return SparseStep(sp.csr_matrix(identity + dt * L), offset, 0)


def _to_blocks(values: np.ndarray, grid: GridSpec, arm: int) -> np.ndarray:
    arr = np.moveaxis(
        values.reshape(grid.shape), (grid.q_axis(arm), grid.x_axis(arm)), (-2, -1)
    )
    return arr


def _from_blocks(arr: np.ndarray, grid: GridSpec, arm: int) -> np.ndarray:
    return np.moveaxis(
        arr, (-2, -1), (grid.q_axis(arm), grid.x_axis(arm))
    ).reshape(grid.size)


def apply_block(
    block: sp.spmatrix, values: np.ndarray, grid: GridSpec, arm: int
) -> np.ndarray:
    """Multiply by ``block`` acting on arm ``arm``'s (x, q) coordinates only"""
    if grid.K == 1:
        return block @ values
    arr = _to_blocks(values, grid, arm)
    shape = arr.shape
    columns = arr.reshape(-1, grid.arm_size).T
    out = (block @ columns).T.reshape(shape)
    return _from_blocks(out, grid, arm)


class ArmBlockSolver:
    """Solves with a matrix that acts on one arm's (x, q) block.

    With independent priors each arm's generator only involves that arm's
    coordinates, so the full operator is a Kronecker product with identities
    and a single factorisation of the one-arm block serves every right-hand
    side.
    """

    def __init__(self, grid: GridSpec, block: sp.spmatrix, arm: int = 0) -> None:
        if block.shape != (grid.arm_size, grid.arm_size):
            raise IllegalArgumentError("block must act on one arm's (x, q) grid")
        self._grid = grid
        self._arm = arm
        self._solve = factorize(block)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        grid = self._grid
        if grid.K == 1:
            return self._solve(rhs)
        arr = _to_blocks(rhs, grid, self._arm)
        shape = arr.shape
        columns = np.ascontiguousarray(arr.reshape(-1, grid.arm_size).T)
        out = self._solve(columns).T.reshape(shape)
        return _from_blocks(out, grid, self._arm)

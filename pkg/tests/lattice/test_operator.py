import numpy as np
import pytest
import scipy.sparse as sp

from hjbandit.errors import CFLViolation, IllegalArgumentError
from hjbandit.lattice import (
    ArmBlockSolver,
    Coefficients,
    GridSpec,
    apply_block,
    assemble_generator,
    check_cfl,
    explicit_dt_bound,
    forward_q,
    generator_matrix,
    is_m_matrix,
    second_x,
    upwind_first_x,
)

from .._testutil import field_from


@pytest.fixture
def grid() -> GridSpec:
    # dx = 0.1, dq = 0.1
    return GridSpec(-2.0, 2.0, 41, 1.0, 11)


def test_upwind_linear_field(grid: GridSpec) -> None:
    field = field_from(grid, lambda x, q: x)
    for drift in (1.0, -1.0):
        np.testing.assert_allclose(upwind_first_x(field, drift), 1.0)


def test_upwind_constant_field(grid: GridSpec) -> None:
    field = field_from(grid, lambda x, q: np.full_like(x, 7.0))
    np.testing.assert_array_equal(upwind_first_x(field, 0.3), 0.0)


def test_upwind_forward_difference(grid: GridSpec) -> None:
    field = field_from(grid, lambda x, q: x**2)
    i_x, _ = grid.node_index(1.0, 0.0)
    forward = upwind_first_x(field, 1.0)
    backward = upwind_first_x(field, -1.0)
    assert forward[i_x] == pytest.approx(2.1)
    assert backward[i_x] == pytest.approx(1.9)


def test_second_difference(grid: GridSpec) -> None:
    field = field_from(grid, lambda x, q: x**2)
    out = second_x(field).reshape(grid.shape)
    np.testing.assert_allclose(out[:, 1:-1], 2.0)
    np.testing.assert_array_equal(out[:, [0, -1]], 0.0)
    linear = field_from(grid, lambda x, q: 3.0 * x)
    np.testing.assert_allclose(second_x(linear), 0.0, atol=1e-9)


def test_second_difference_at_kink(grid: GridSpec) -> None:
    field = field_from(grid, lambda x, q: np.abs(x))
    i_x, _ = grid.node_index(0.0, 0.0)
    assert second_x(field)[i_x] == pytest.approx(2.0 / grid.dx)


def test_forward_q(grid: GridSpec) -> None:
    field = field_from(grid, lambda x, q: q**2)
    out = forward_q(field).reshape(grid.shape)
    assert out[5, 0] == pytest.approx(1.1)
    np.testing.assert_array_equal(out[-1], 0.0)
    linear = field_from(grid, lambda x, q: q)
    np.testing.assert_allclose(forward_q(linear).reshape(grid.shape)[:-1], 1.0)


def test_generator_rows_sum_to_zero(grid: GridSpec) -> None:
    x, _ = grid.flat_mesh()
    matrix = generator_matrix(grid, Coefficients(x[:, 0], 1.0))
    np.testing.assert_allclose(np.asarray(matrix.sum(axis=1)).ravel(), 0.0, atol=1e-9)
    off = matrix - sp.diags(matrix.diagonal())
    assert off.data.min() >= 0


def test_generator_matches_stencils_inside(grid: GridSpec) -> None:
    x, _ = grid.flat_mesh()
    drift = x[:, 0]
    field = field_from(grid, lambda x, q: np.sin(x) + x * q**2)
    matrix = generator_matrix(grid, Coefficients(drift, 2.0))
    applied = (matrix @ field.values).reshape(grid.shape)
    along_q = forward_q(field).reshape(grid.shape)
    stencils = (
        drift * upwind_first_x(field, drift) + second_x(field)
    ).reshape(grid.shape) + along_q
    np.testing.assert_allclose(applied[:, 1:-1], stencils[:, 1:-1], atol=1e-9)
    # the drift points off the grid at both x-edges: the matrix drops it
    np.testing.assert_allclose(applied[:, [0, -1]], along_q[:, [0, -1]], atol=1e-9)
    assert not np.allclose(applied[:, [0, -1]], stencils[:, [0, -1]])


def test_generator_rejects_negative_diffusion(grid: GridSpec) -> None:
    with pytest.raises(IllegalArgumentError):
        generator_matrix(grid, Coefficients(0.0, -1.0))


def test_zero_coefficients_give_identity(grid: GridSpec) -> None:
    for theta in (0, 1):
        step = assemble_generator(
            grid, Coefficients(0.0, 0.0, drift_q=0.0), theta, 1e-3
        )
        values = np.arange(grid.size, dtype=float)
        np.testing.assert_allclose(step.apply(values), values)


def test_implicit_diffusion_is_m_matrix() -> None:
    small = GridSpec(-1.0, 1.0, 5, 1.0, 2)
    step = assemble_generator(small, Coefficients(0.0, 1.0), 1, 0.1)
    assert is_m_matrix(step.matrix)
    diagonal = step.matrix.diagonal()
    assert np.all(diagonal >= 1.0)


def test_m_matrix_check_rejects_positive_off_diagonal() -> None:
    matrix = sp.csr_matrix(np.array([[1.0, 0.5], [0.0, 1.0]]))
    assert not is_m_matrix(matrix)


def test_explicit_step_cfl_guard() -> None:
    small = GridSpec(-1.0, 1.0, 11, 1.0, 11)
    bound = 0.5 * min(small.dx, small.dq) ** 2
    assemble_generator(small, Coefficients(0.0, 1.0), 0, bound)
    with pytest.raises(CFLViolation) as exc_info:
        assemble_generator(small, Coefficients(0.0, 1.0), 0, bound * 1.01)
    assert exc_info.value.dt > exc_info.value.bound


def test_coefficient_bound_guards_large_drift() -> None:
    small = GridSpec(-1.0, 1.0, 11, 1.0, 11)
    matrix = generator_matrix(small, Coefficients(1e4, 1.0))
    dt = 0.5 * min(small.dx, small.dq) ** 2
    assert explicit_dt_bound(matrix) < dt
    with pytest.raises(CFLViolation):
        check_cfl(small, matrix, dt)


def test_source_enters_right_hand_side(grid: GridSpec) -> None:
    source = np.ones(grid.size)
    step = assemble_generator(
        grid, Coefficients(0.0, 0.0, drift_q=0.0), 1, 0.5, source=source
    )
    np.testing.assert_allclose(step.apply(np.zeros(grid.size)), 0.5)


def test_arm_block_matches_kronecker() -> None:
    grid = GridSpec(-1.0, 1.0, 4, 1.0, 3, K=2)
    arm_grid = grid.arm_grid()
    ax, _ = arm_grid.flat_mesh()
    block = sp.identity(arm_grid.size) - 0.1 * generator_matrix(
        arm_grid, Coefficients(ax[:, 0], 1.0)
    )
    identity = sp.identity(arm_grid.size)
    full = [sp.kron(identity, block), sp.kron(block, identity)]
    values = np.random.default_rng(0).normal(size=grid.size)
    for arm in range(2):
        np.testing.assert_allclose(
            apply_block(block, values, grid, arm), full[arm] @ values
        )
        solved = ArmBlockSolver(grid, block, arm).solve(values)
        np.testing.assert_allclose(full[arm] @ solved, values, atol=1e-10)


def test_arm_block_shape_checked() -> None:
    grid = GridSpec(-1.0, 1.0, 4, 1.0, 3, K=2)
    with pytest.raises(IllegalArgumentError):
        ArmBlockSolver(grid, sp.identity(5), 0)

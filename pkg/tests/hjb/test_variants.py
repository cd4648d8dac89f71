import math

import numpy as np
import pytest

from hjbandit.beliefs import ArmModel, GaussianPrior, degenerate, mu_plus, two_point
from hjbandit.errors import IllegalArgumentError, UnsupportedK, UnsupportedPdeEval
from hjbandit.hjb import (
    BestArm,
    Discounted,
    FiniteHorizonOptimal,
    PolicyRisk,
    SolverOptions,
    payoffs,
    solve_best_arm,
    solve_discounted,
    solve_discounted_policy_risk,
    solve_fixed_n,
    solve_optimal,
    solve_policy_risk,
)
from hjbandit.lattice import GridSpec
from hjbandit.policies import UCB, ConstantProb, MultiArmThompson

from .._testutil import small_grid, stationary_grid

UNIT = ArmModel.single(1.0)
PRIOR = GaussianPrior(0.0, 1.0)
# posterior sd falls below 5% of the prior sd by q = 3.99
WIDE = GaussianPrior(0.0, 10.0)


@pytest.fixture
def pair_grid() -> GridSpec:
    return small_grid(nx=11, nq=6, nt=10, K=2)


def test_degenerate_second_arm_reduces_to_one_arm() -> None:
    one = small_grid(nx=21, nq=11, nt=20)
    two = small_grid(nx=21, nq=11, nt=20, K=2)
    single = solve_optimal(FiniteHorizonOptimal(PRIOR, UNIT), one).value_at_origin
    paired = solve_optimal(
        FiniteHorizonOptimal((PRIOR, degenerate(0.0)), ArmModel.homogeneous(1.0, 2)),
        two,
    ).value_at_origin
    assert paired == pytest.approx(single, abs=1e-8)


def test_two_arm_optimum_below_thompson(pair_grid: GridSpec) -> None:
    arms = ArmModel.homogeneous(1.0, 2)
    priors = (PRIOR, PRIOR)
    best = solve_optimal(FiniteHorizonOptimal(priors, arms), pair_grid)
    thompson = solve_policy_risk(
        PolicyRisk(priors, arms, policy=MultiArmThompson(priors, arms)), pair_grid
    )
    assert 0.0 < best.value_at_origin <= thompson.value_at_origin + 1e-9
    # controls are arm indices
    assert set(np.unique(best.controls[0])) <= {0.0, 1.0}


def test_best_arm_is_symmetric(pair_grid: GridSpec) -> None:
    problem = BestArm((PRIOR, PRIOR), ArmModel.homogeneous(1.0, 2))
    solution = solve_best_arm(problem, pair_grid)
    values = solution.fields[0].values.reshape(pair_grid.shape)
    np.testing.assert_allclose(values, values.transpose(2, 3, 0, 1), atol=1e-8)
    assert 0.0 < solution.value_at_origin <= 1.0 / math.sqrt(math.pi) + 1e-9


def test_best_arm_without_uncertainty(pair_grid: GridSpec) -> None:
    problem = BestArm(
        (degenerate(1.0), degenerate(0.0)), ArmModel.homogeneous(1.0, 2)
    )
    solution = solve_best_arm(problem, pair_grid)
    np.testing.assert_allclose(solution.fields[0].values, 0.0, atol=1e-12)


def test_best_arm_needs_two_arms() -> None:
    with pytest.raises(IllegalArgumentError):
        BestArm(PRIOR, UNIT)


def test_discounted_never_pull() -> None:
    grid = stationary_grid()
    problem = Discounted(WIDE, UNIT, beta=2.0)
    solution = solve_discounted_policy_risk(problem, ConstantProb(0.0), grid)
    best = payoffs(problem, grid).best
    np.testing.assert_allclose(solution.fields[0].values, best / 2.0, atol=1e-12)
    assert solution.report.scheme == "stationary"


def test_discounted_always_pull_without_uncertainty() -> None:
    grid = stationary_grid()
    problem = Discounted(degenerate(3.0), UNIT, beta=1.0)
    solution = solve_discounted_policy_risk(problem, ConstantProb(1.0), grid)
    np.testing.assert_allclose(solution.fields[0].values, 0.0, atol=1e-10)


def test_discounted_optimum() -> None:
    grid = stationary_grid()
    problem = Discounted(WIDE, UNIT, beta=1.0)
    solution = solve_discounted(problem, grid)
    best = payoffs(problem, grid).best
    values = solution.fields[0].values
    assert np.all(values >= -1e-10)
    assert np.all(values <= best + 1e-10)
    never = mu_plus(0.0, 10.0)
    assert 0.0 < solution.value_at_origin < never
    assert solution.report.max_residual <= 1e-6


@pytest.mark.parametrize("beta", [0.5, 2.0])
def test_discounted_value_below_never_pull(beta: float) -> None:
    grid = stationary_grid()
    problem = Discounted(WIDE, UNIT, beta=beta)
    solution = solve_discounted(problem, grid)
    best = payoffs(problem, grid).best
    assert np.all(solution.fields[0].values <= best / beta + 1e-9)
    assert solution.value_at_origin <= mu_plus(0.0, 10.0) / beta + 1e-9


def test_discounted_needs_collapsed_posterior() -> None:
    # a unit prior needs q_max near 400
    grid = stationary_grid(q_max=4.0)
    problem = Discounted(PRIOR, UNIT, beta=1.0)
    with pytest.raises(IllegalArgumentError, match="q_max"):
        solve_discounted(problem, grid)
    with pytest.raises(IllegalArgumentError, match="q_max"):
        solve_discounted_policy_risk(problem, ConstantProb(0.0), grid)


def test_collapse_q() -> None:
    default = Discounted(GaussianPrior(0.0, 50.0), ArmModel.single(5.0), beta=1.0)
    assert default.collapse_q() == pytest.approx(3.99)
    assert default.collapse_q(0.5) == pytest.approx(0.03)
    assert Discounted(degenerate(1.0), UNIT, beta=1.0).collapse_q() == 0.0
    with pytest.raises(IllegalArgumentError):
        default.collapse_q(1.0)


def test_discounted_rejects_several_arms() -> None:
    problem = Discounted((PRIOR, PRIOR), ArmModel.homogeneous(1.0, 2), beta=1.0)
    with pytest.raises(UnsupportedK):
        solve_discounted(problem, small_grid(K=2, nx=5, nq=3))


def test_discount_rate_positive() -> None:
    with pytest.raises(IllegalArgumentError):
        Discounted(PRIOR, UNIT, beta=0.0)


def test_discontinuous_policy_refused(grid: GridSpec) -> None:
    problem = PolicyRisk(PRIOR, UNIT, policy=UCB(100))
    with pytest.raises(UnsupportedPdeEval):
        solve_policy_risk(problem, grid)
    forced = solve_policy_risk(
        problem, grid, SolverOptions(allow_discontinuous=True)
    )
    assert forced.value_at_origin > 0.0


def test_discrete_prior_solve(grid: GridSpec) -> None:
    prior = two_point(-1.0, 1.0, 0.5)
    value = solve_optimal(FiniteHorizonOptimal(prior, UNIT), grid).value_at_origin
    # between perfect information and never learning
    assert 0.0 < value < 0.5


def test_fixed_n_one_period(grid: GridSpec) -> None:
    prior = GaussianPrior(1.0, 1.0)
    plus = mu_plus(1.0, 1.0)
    value = solve_fixed_n(prior, 1.0, 1, grid)
    assert value == pytest.approx(min(plus - 1.0, plus))


def test_fixed_n_without_uncertainty(grid: GridSpec) -> None:
    assert solve_fixed_n(degenerate(3.0), 1.0, 5, grid) == pytest.approx(0.0)
    assert solve_fixed_n(degenerate(-3.0), 1.0, 5, grid) == pytest.approx(0.0)


def test_fixed_n_validation(grid: GridSpec) -> None:
    with pytest.raises(IllegalArgumentError):
        solve_fixed_n(PRIOR, 1.0, 0, grid)
    with pytest.raises(UnsupportedK):
        solve_fixed_n(PRIOR, 1.0, 3, small_grid(K=2, nx=5, nq=3))


def test_fixed_n_below_never_pull(grid: GridSpec) -> None:
    value = solve_fixed_n(PRIOR, 1.0, 10, grid)
    assert 0.0 < value < mu_plus(0.0, 1.0)


@pytest.mark.slow
def test_fixed_n_approaches_diffusion_limit() -> None:
    sigma = 1.0
    grid = GridSpec.from_preset("desk", sigma)
    limit = solve_optimal(FiniteHorizonOptimal(PRIOR, UNIT), grid).value_at_origin
    value = solve_fixed_n(PRIOR, sigma, 40, grid)
    assert value == pytest.approx(limit, rel=0.07)


@pytest.mark.slow
def test_fixed_n_two_point_prior_near_diffusion_limit() -> None:
    sigma = 1.0
    prior = two_point(-2.5, 1.7, 0.415)
    grid = GridSpec.from_preset("desk", sigma)
    limit = solve_optimal(FiniteHorizonOptimal(prior, UNIT), grid).value_at_origin
    value = solve_fixed_n(prior, sigma, 40, grid)
    assert value == pytest.approx(limit, rel=0.07)

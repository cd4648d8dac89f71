import math

import numpy as np
import pytest

from hjbandit.beliefs import ArmModel, GaussianPrior, degenerate, mu_plus
from hjbandit.errors import HowardNonconvergence, IllegalArgumentError
from hjbandit.hjb import (
    Batched,
    FiniteHorizonOptimal,
    PolicyRisk,
    SolverOptions,
    payoffs,
    policy_map,
    solve_batched,
    solve_optimal,
    solve_policy_risk,
)
from hjbandit.lattice import GridSpec
from hjbandit.policies import ConstantProb, Thompson
from hjbandit.sim import GaussianShift, bayes_risk_mc

from .._testutil import small_grid

UNIT = ArmModel.single(1.0)
PRIOR = GaussianPrior(0.0, 1.0)


def optimal(grid: GridSpec, prior=PRIOR, **options) -> float:
    problem = FiniteHorizonOptimal(prior, UNIT)
    return solve_optimal(problem, grid, SolverOptions(**options)).value_at_origin


@pytest.mark.parametrize("mu", [-3.0, 3.0])
@pytest.mark.parametrize("scheme", ["hybrid", "implicit"])
def test_degenerate_prior_has_no_regret(grid: GridSpec, mu: float, scheme: str) -> None:
    problem = FiniteHorizonOptimal(degenerate(mu), UNIT)
    solution = solve_optimal(problem, grid, SolverOptions(scheme=scheme))
    for field in solution.fields:
        np.testing.assert_allclose(field.values, 0.0, atol=1e-12)


def test_degenerate_positive_prior_always_pulls(grid: GridSpec) -> None:
    problem = FiniteHorizonOptimal(degenerate(3.0), UNIT)
    solution = solve_optimal(problem, grid)
    assert np.all(np.stack(solution.controls) == 1.0)


def test_value_between_zero_and_never_pull(grid: GridSpec) -> None:
    solution = solve_optimal(FiniteHorizonOptimal(PRIOR, UNIT), grid)
    pay = payoffs(FiniteHorizonOptimal(PRIOR, UNIT), grid)
    for field in solution.fields:
        assert np.all(field.values >= -1e-12)
        assert np.all(field.values <= (1.0 - field.t) * pay.best + 1e-12)
    assert 0.0 < solution.value_at_origin < mu_plus(0.0, 1.0)


def test_schemes_agree() -> None:
    # explicit needs dt <= dq**2 / 2
    grid = small_grid(nx=11, nq=11, nt=250)
    values = {s: optimal(grid, scheme=s) for s in ("explicit", "implicit", "hybrid")}
    reference = values["implicit"]
    for scheme, value in values.items():
        assert value == pytest.approx(reference, rel=0.05), scheme


def test_implicit_runs_out_of_iterations(grid: GridSpec) -> None:
    problem = FiniteHorizonOptimal(PRIOR, UNIT)
    with pytest.raises(HowardNonconvergence):
        solve_optimal(problem, grid, SolverOptions(scheme="implicit", max_iter=1))


def test_report(grid: GridSpec) -> None:
    solution = solve_optimal(FiniteHorizonOptimal(PRIOR, UNIT), grid)
    report = solution.report
    assert report.scheme == "hybrid"
    assert report.iterations == grid.nt
    assert report.value_at_origin == solution.value_at_origin
    assert report.max_residual <= 1e-6
    stats = report.stats["hjb.scheme=hybrid"]
    assert stats["steps"] == grid.nt
    assert stats["iterations-max"] == 1


def test_slice_stride(grid: GridSpec) -> None:
    problem = FiniteHorizonOptimal(PRIOR, UNIT)
    solution = solve_optimal(problem, grid, SolverOptions(slice_stride=10))
    assert [f.time_index for f in solution.fields] == [0, 10, 20, 30, 40]
    maps = policy_map(solution)
    assert len(maps) == 5
    assert maps[0].shape == grid.shape


def test_optimal_policy_pulls_at_large_x(grid: GridSpec) -> None:
    solution = solve_optimal(FiniteHorizonOptimal(PRIOR, UNIT), grid)
    policy = solution.optimal_policy()
    assert policy.pull_probability(1.0, 0.5, 0.0) == 1.0
    assert policy.pull_probability(-1.0, 0.5, 0.9) == 0.0


def test_stationary_grid_rejected() -> None:
    grid = GridSpec(-1.0, 1.0, 5, 1.0, 3)
    with pytest.raises(IllegalArgumentError):
        solve_optimal(FiniteHorizonOptimal(PRIOR, UNIT), grid)


def test_never_pull_risk_is_closed_form(grid: GridSpec) -> None:
    problem = PolicyRisk(PRIOR, UNIT, policy=ConstantProb(0.0))
    solution = solve_policy_risk(problem, grid)
    best = payoffs(problem, grid).best
    for field in solution.fields:
        np.testing.assert_allclose(field.values, (1.0 - field.t) * best, atol=1e-12)
    assert solution.value_at_origin == pytest.approx(1.0 / math.sqrt(2.0 * math.pi))


def test_always_pull_without_uncertainty(grid: GridSpec) -> None:
    problem = PolicyRisk(degenerate(3.0), UNIT, policy=ConstantProb(1.0))
    assert solve_policy_risk(problem, grid).value_at_origin == pytest.approx(
        0.0, abs=1e-12
    )


def test_optimum_below_thompson(grid: GridSpec) -> None:
    best = optimal(grid)
    thompson = solve_policy_risk(
        PolicyRisk(PRIOR, UNIT, policy=Thompson(PRIOR, 1.0)), grid
    ).value_at_origin
    never = solve_policy_risk(
        PolicyRisk(PRIOR, UNIT, policy=ConstantProb(0.0)), grid
    ).value_at_origin
    always = solve_policy_risk(
        PolicyRisk(PRIOR, UNIT, policy=ConstantProb(1.0)), grid
    ).value_at_origin
    assert 0.0 < best < thompson
    assert best <= min(never, always) + 1e-12


def test_batched_with_step_length_batches(grid: GridSpec) -> None:
    solution = solve_optimal(FiniteHorizonOptimal(PRIOR, UNIT), grid)
    batched = solve_batched(Batched(PRIOR, UNIT, batch_dt=grid.dt), grid)
    assert batched.value_at_origin == pytest.approx(solution.value_at_origin, abs=1e-6)
    np.testing.assert_allclose(
        batched.fields[0].values, solution.fields[0].values, atol=1e-6
    )


def test_single_batch_picks_better_constant_policy(grid: GridSpec) -> None:
    batched = solve_batched(Batched(PRIOR, UNIT, batch_dt=1.0), grid)
    always = solve_policy_risk(
        PolicyRisk(PRIOR, UNIT, policy=ConstantProb(1.0)), grid
    )
    never = payoffs(FiniteHorizonOptimal(PRIOR, UNIT), grid).best
    expected = np.minimum(always.fields[0].values, never)
    np.testing.assert_allclose(batched.fields[0].values, expected, atol=1e-9)
    assert batched.table.decisions.shape == (1, grid.size)


def test_batched_value_between_optimal_and_single_batch(grid: GridSpec) -> None:
    best = optimal(grid)
    quarter = solve_batched(Batched(PRIOR, UNIT, batch_dt=0.25), grid)
    single = solve_batched(Batched(PRIOR, UNIT, batch_dt=1.0), grid)
    assert best - 1e-9 <= quarter.value_at_origin <= single.value_at_origin + 1e-9
    assert quarter.table.batch_times.tolist() == [0.0, 0.25, 0.5, 0.75]
    assert len(quarter.fields) == 5


def test_batch_length_must_divide_horizon() -> None:
    with pytest.raises(IllegalArgumentError):
        Batched(PRIOR, UNIT, batch_dt=0.3)


def test_batch_length_must_be_step_multiple(grid: GridSpec) -> None:
    with pytest.raises(IllegalArgumentError):
        solve_batched(Batched(PRIOR, UNIT, batch_dt=0.0125), grid)


@pytest.mark.slow
def test_default_prior_paper_grid() -> None:
    arms = ArmModel.single(5.0)
    prior = GaussianPrior(0.0, 50.0)
    grid = GridSpec.from_preset("paper", 5.0)
    value = solve_optimal(FiniteHorizonOptimal(prior, arms), grid).value_at_origin
    thompson = solve_policy_risk(
        PolicyRisk(prior, arms, policy=Thompson(prior, 5.0)), grid
    ).value_at_origin
    assert value > 0
    # Thompson sampling is roughly twice as costly
    assert 1.7 <= thompson / value <= 2.3


def test_value_below_always_and_never_pull(grid: GridSpec) -> None:
    solution = solve_optimal(FiniteHorizonOptimal(PRIOR, UNIT), grid)
    always = solve_policy_risk(
        PolicyRisk(PRIOR, UNIT, policy=ConstantProb(1.0)), grid
    )
    best = payoffs(FiniteHorizonOptimal(PRIOR, UNIT), grid).best
    # always pulling costs (1 - t) * (mu_plus - mu), discretised
    assert always.value_at_origin == pytest.approx(mu_plus(0.0, 1.0), rel=0.1)
    for field, pull in zip(solution.fields, always.fields):
        assert field.time_index == pull.time_index
        ceiling = np.minimum(pull.values, (1.0 - field.t) * best)
        assert np.all(field.values <= ceiling + 1e-10)
        assert np.all(field.values >= -1e-12)


def test_value_grows_backwards_in_time(grid: GridSpec) -> None:
    solution = solve_optimal(FiniteHorizonOptimal(PRIOR, UNIT), grid)
    for earlier, later in zip(solution.fields, solution.fields[1:]):
        assert np.all(earlier.values >= later.values - 1e-12)


def test_decisions_ignore_slice_stride(grid: GridSpec) -> None:
    problem = FiniteHorizonOptimal(PRIOR, UNIT)
    every = solve_optimal(problem, grid, SolverOptions(slice_stride=1))
    sparse = solve_optimal(problem, grid, SolverOptions(slice_stride=20))
    assert len(sparse.fields) == 3
    assert sparse.decisions.shape == (grid.nt + 1, grid.size)
    np.testing.assert_array_equal(every.decisions, np.stack(every.controls))
    np.testing.assert_array_equal(
        sparse.optimal_policy().controls, every.optimal_policy().controls
    )


def test_optimal_policy_attains_its_value() -> None:
    grid = small_grid(nx=65, nq=21, nt=50, width=4.0)
    solution = solve_optimal(
        FiniteHorizonOptimal(PRIOR, UNIT), grid, SolverOptions(slice_stride=25)
    )
    policy = solution.optimal_policy()
    assert policy.controls.shape == (grid.nt + 1, grid.size)
    estimate = bayes_risk_mc(policy, PRIOR, GaussianShift(1.0), 200, 4000, 3, workers=2)
    value = solution.value_at_origin
    assert estimate.mean == pytest.approx(value, abs=4 * estimate.stderr + 0.1 * value)


def test_batched_gap_shrinks_with_batch_length() -> None:
    grid = small_grid(nt=128)
    best = optimal(grid)
    lengths = [0.25, 0.0625, 0.015625]
    gaps = [
        solve_batched(Batched(PRIOR, UNIT, batch_dt=h), grid).value_at_origin - best
        for h in lengths
    ]
    assert all(gap >= -1e-9 for gap in gaps)
    # finer batches nest the coarser ones
    assert gaps[1] <= gaps[0] + 1e-12
    assert gaps[2] <= gaps[1] + 1e-12
    constant = gaps[0] / lengths[0] ** 0.25
    for h, gap in zip(lengths, gaps):
        assert gap <= constant * h**0.25 + 1e-9

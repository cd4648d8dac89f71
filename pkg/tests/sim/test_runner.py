import asyncio
import math

import pytest

from hjbandit.beliefs import ArmModel, GaussianPrior
from hjbandit.errors import IllegalArgumentError
from hjbandit.hjb import FiniteHorizonOptimal, solve_optimal
from hjbandit.policies import ConstantProb, Thompson
from hjbandit.sim import (
    CenteredBernoulli,
    EpisodeSettings,
    GaussianShift,
    MonteCarloRunner,
    bayes_risk_mc,
    frequentist_profile,
    tune_ucb,
)

from .._testutil import small_grid

NEVER = ConstantProb(0.0)
PRIOR = GaussianPrior(0.0, 1.0)


@pytest.fixture(autouse=True)
def no_thread_override(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv("HJBANDIT_THREADS", raising=False)


async def test_risk_at_fixed_mu() -> None:
    settings = EpisodeSettings(20)
    async with MonteCarloRunner(workers=2, chunk_size=16) as runner:
        estimate = await runner.at_mu(NEVER, 1.0, GaussianShift(1.0), settings, 50, 0)
    assert estimate.mean == pytest.approx(1.0)
    assert estimate.stderr == pytest.approx(0.0, abs=1e-12)
    assert estimate.reps == 50
    low, high = estimate.iqr
    assert low == pytest.approx(1.0, abs=1e-3)
    assert high == pytest.approx(1.0, abs=1e-3)
    stats = estimate.stats["mc.mu=1.0,policy=constant(p=0)"]
    assert stats["replications"] == 50


async def test_worker_count_does_not_change_estimate() -> None:
    policy = Thompson(PRIOR, 1.0)
    family = GaussianShift(1.0)
    settings = EpisodeSettings(25)
    estimates = []
    for workers in (1, 4):
        async with MonteCarloRunner(workers=workers, chunk_size=10) as runner:
            estimates.append(
                await runner.bayes_risk(policy, PRIOR, family, settings, 95, 11)
            )
    assert estimates[0].mean == estimates[1].mean
    assert estimates[0].stderr == estimates[1].stderr
    assert estimates[0].iqr == estimates[1].iqr


async def test_chunking_does_not_change_estimate() -> None:
    policy = Thompson(PRIOR, 1.0)
    family = GaussianShift(1.0)
    settings = EpisodeSettings(25)
    means = []
    for chunk_size in (7, 64):
        async with MonteCarloRunner(workers=2, chunk_size=chunk_size) as runner:
            estimate = await runner.bayes_risk(policy, PRIOR, family, settings, 64, 3)
            means.append(estimate.mean)
    assert means[0] == pytest.approx(means[1], rel=1e-12)


async def test_never_pull_bayes_risk() -> None:
    settings = EpisodeSettings(10)
    async with MonteCarloRunner(chunk_size=500) as runner:
        estimate = await runner.bayes_risk(
            NEVER, PRIOR, GaussianShift(1.0), settings, 4000, 5
        )
    # E[max(mu, 0)] under N(0, 1)
    expected = 1.0 / math.sqrt(2.0 * math.pi)
    assert estimate.mean == pytest.approx(expected, abs=4 * estimate.stderr + 1e-3)


async def test_profile_shares_random_numbers() -> None:
    policy = Thompson(PRIOR, 1.0)
    settings = EpisodeSettings(30)
    async with MonteCarloRunner(workers=2) as runner:
        profile = await runner.frequentist_profile(
            policy, [-1.0, 0.0, 1.0], GaussianShift(1.0), settings, 40, 2
        )
        again = await runner.at_mu(policy, 1.0, GaussianShift(1.0), settings, 40, 2)
    assert profile.mu_grid == [-1.0, 0.0, 1.0]
    assert profile.mean_regret[1] == 0.0
    assert profile.mean_regret[2] == again.mean
    assert profile.reps == 40
    assert len(profile.iqr) == len(profile.stderr) == 3


async def test_runner_validation() -> None:
    with pytest.raises(IllegalArgumentError):
        MonteCarloRunner(chunk_size=0)
    settings = EpisodeSettings(5)
    async with MonteCarloRunner() as runner:
        with pytest.raises(IllegalArgumentError):
            await runner.at_mu(NEVER, 1.0, GaussianShift(), settings, 0, 0)
        with pytest.raises(IllegalArgumentError):
            await runner.frequentist_profile(NEVER, [], GaussianShift(), settings, 5, 0)


async def test_timeout() -> None:
    settings = EpisodeSettings(2000)
    async with MonteCarloRunner(workers=1, chunk_size=1, timeout=1e-6) as runner:
        with pytest.raises(asyncio.TimeoutError):
            await runner.bayes_risk(
                Thompson(PRIOR, 1.0), PRIOR, GaussianShift(1.0), settings, 500, 0
            )


def test_thread_override(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("HJBANDIT_THREADS", "3")
    runner = MonteCarloRunner(workers=1)
    assert runner._workers == 3


def test_blocking_front_ends() -> None:
    family = GaussianShift(1.0)
    estimate = bayes_risk_mc(NEVER, PRIOR, family, 10, 200, 0, workers=1)
    assert estimate.reps == 200
    assert estimate.mean > 0
    profile = frequentist_profile(NEVER, [0.0, 2.0], family, 10, 20, 0, workers=1)
    assert profile.mean_regret == pytest.approx([0.0, 2.0])


def test_tune_ucb_picks_smallest_risk() -> None:
    tuning = tune_ucb([0.1, 2.0, 7.8], PRIOR, GaussianShift(1.0), 50, 100, 4)
    assert tuning.deltas == [0.1, 2.0, 7.8]
    assert len(tuning.risks) == 3
    risks = [r.mean for r in tuning.risks]
    assert tuning.best_delta == tuning.deltas[risks.index(min(risks))]
    with pytest.raises(IllegalArgumentError):
        tune_ucb([], PRIOR, GaussianShift(1.0), 50, 100, 4)


@pytest.fixture(scope="module")
def optimal_policy():
    grid = small_grid(nx=65, nq=21, nt=50, width=4.0)
    solution = solve_optimal(FiniteHorizonOptimal(PRIOR, ArmModel.single(1.0)), grid)
    return solution.optimal_policy()


def _families_agree(policy, n: int, reps: int, width: float) -> None:
    gaussian = bayes_risk_mc(policy, PRIOR, GaussianShift(1.0), n, reps, 8)
    bernoulli = bayes_risk_mc(policy, PRIOR, CenteredBernoulli(), n, reps, 8)
    stderr = math.hypot(gaussian.stderr, bernoulli.stderr)
    assert bernoulli.mean == pytest.approx(gaussian.mean, abs=width * stderr)


def test_bernoulli_rewards_match_gaussian(optimal_policy) -> None:
    _families_agree(optimal_policy, 400, 1000, 4.0)


@pytest.mark.slow
def test_bernoulli_rewards_match_gaussian_large_n(optimal_policy) -> None:
    _families_agree(optimal_policy, 10_000, 2000, 3.0)

import numpy as np
import pytest

from hjbandit.beliefs import ArmModel, GaussianPrior
from hjbandit.errors import IllegalArgumentError, InvalidMu
from hjbandit.policies import ConstantProb, MultiArmThompson, Thompson
from hjbandit.sim import (
    CenteredBernoulli,
    EpisodeSettings,
    GaussianArms,
    GaussianShift,
    replication_stream,
    run_episode,
    simulate_batch,
)

NEVER = ConstantProb(0.0)
ALWAYS = ConstantProb(1.0)


def test_no_regret_at_zero() -> None:
    family = GaussianShift(1.0)
    for policy in (NEVER, ALWAYS, Thompson(GaussianPrior(0.0, 1.0), 1.0)):
        result = run_episode(policy, 0.0, family, 50, seed=3)
        assert result.cumulative_regret == 0.0


@pytest.mark.parametrize("mu", [0.5, 2.0, 7.0])
def test_never_pull_regret(mu: float) -> None:
    result = run_episode(NEVER, mu, GaussianShift(5.0), 40, seed=1)
    assert result.cumulative_regret == pytest.approx(mu)
    assert result.pulls == 0


@pytest.mark.parametrize("mu", [-0.5, -2.0])
def test_always_pull_regret(mu: float) -> None:
    result = run_episode(ALWAYS, mu, GaussianShift(5.0), 40, seed=1)
    assert result.cumulative_regret == pytest.approx(abs(mu))
    assert result.pulls == 40


def test_same_seed_same_episode() -> None:
    policy = Thompson(GaussianPrior(0.0, 5.0), 1.0)
    family = GaussianShift(1.0)
    first = run_episode(policy, 0.7, family, 100, seed=42, replication=5)
    again = run_episode(policy, 0.7, family, 100, seed=42, replication=5)
    assert first == again
    assert first.seed == 5


def test_batch_matches_single_episodes() -> None:
    policy = Thompson(GaussianPrior(0.0, 2.0), 1.0)
    family = GaussianShift(1.0)
    settings = EpisodeSettings(30)
    batch = simulate_batch(
        policy, family, settings, 9, [0, 1, 2], mu=np.array([0.5, 0.5, 0.5])
    )
    for replication in range(3):
        single = run_episode(policy, 0.5, family, 30, 9, replication=replication)
        assert batch.regret[replication] == pytest.approx(single.cumulative_regret)
        assert batch.pulls[replication] == single.pulls


def test_streams_are_keyed() -> None:
    a = replication_stream(1, 0).random(4)
    b = replication_stream(1, 0).random(4)
    c = replication_stream(1, 1).random(4)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)
    with pytest.raises(IllegalArgumentError):
        replication_stream(-1, 0)


def test_realized_regret_has_same_mean() -> None:
    family = GaussianShift(1.0)
    settings = EpisodeSettings(100, realized=True)
    reps = np.arange(2000)
    batch = simulate_batch(
        ALWAYS, family, settings, 7, reps, mu=np.full(reps.size, -1.0)
    )
    assert batch.regret.std() > 0.5
    assert batch.regret.mean() == pytest.approx(1.0, abs=0.1)


def test_discounted_never_pull() -> None:
    n = 100
    result = run_episode(NEVER, 1.0, GaussianShift(1.0), n, seed=0, beta=1.0)
    # (1/n) * sum_j exp(-j/n) over ten horizons
    expected = (1.0 - np.exp(-10.0)) / n / (1.0 - np.exp(-1.0 / n))
    assert result.cumulative_regret == pytest.approx(expected)


def test_settings_validation() -> None:
    with pytest.raises(IllegalArgumentError):
        EpisodeSettings(0)
    with pytest.raises(IllegalArgumentError):
        EpisodeSettings(10, beta=0.0)
    assert EpisodeSettings(10, beta=1.0, horizon_multiple=3).periods == 30


def test_exactly_one_of_mu_and_prior() -> None:
    settings = EpisodeSettings(10)
    with pytest.raises(IllegalArgumentError):
        simulate_batch(NEVER, GaussianShift(), settings, 0, [0])
    with pytest.raises(IllegalArgumentError):
        simulate_batch(
            NEVER,
            GaussianShift(),
            settings,
            0,
            [0],
            mu=np.zeros(1),
            prior=GaussianPrior(),
        )


def test_bernoulli_range() -> None:
    family = CenteredBernoulli()
    with pytest.raises(InvalidMu):
        run_episode(NEVER, 11.0, family, 100, seed=0)
    result = run_episode(NEVER, 10.0, family, 100, seed=0)
    assert result.cumulative_regret == pytest.approx(10.0)


def test_bernoulli_rewards_are_signs() -> None:
    rng = np.random.default_rng(0)
    draws = CenteredBernoulli().draw(rng, np.array([0.0, 3.0]), 5000)
    assert set(np.unique(draws)) == {-1.0, 1.0}
    # mean 3 / sqrt(n) on the second row
    assert draws[1].mean() == pytest.approx(3.0 / np.sqrt(5000), abs=0.05)


def test_prior_draws_differ_by_replication() -> None:
    settings = EpisodeSettings(20)
    batch = simulate_batch(
        NEVER, GaussianShift(1.0), settings, 5, range(50), prior=GaussianPrior(0, 1)
    )
    # never pulling costs mu_plus of each drawn parameter
    assert np.all(batch.regret >= 0)
    assert np.count_nonzero(batch.regret) > 10


def test_two_arms() -> None:
    arms = ArmModel.homogeneous(1.0, 2)
    family = GaussianArms(arms)
    prior = GaussianPrior(0.0, 1.0)
    policy = MultiArmThompson([prior, prior], arms)
    settings = EpisodeSettings(40)
    tied = simulate_batch(
        policy, family, settings, 1, [0, 1], mu=np.full((2, 2), 0.5)
    )
    np.testing.assert_array_equal(tied.regret, 0.0)
    apart = simulate_batch(
        policy, family, settings, 1, range(20), mu=np.tile([3.0, -3.0], (20, 1))
    )
    assert np.all(apart.regret >= 0)
    assert np.all(apart.regret <= 6.0 + 1e-9)
    assert apart.pulls.mean() > 20


def test_arm_counts_must_match() -> None:
    family = GaussianArms(ArmModel.homogeneous(1.0, 2))
    with pytest.raises(IllegalArgumentError):
        simulate_batch(NEVER, family, EpisodeSettings(5), 0, [0], mu=np.zeros((1, 2)))

import math

import numpy as np
import pytest

from hjbandit.beliefs import (
    DiscretePrior,
    GaussianPrior,
    approximate_posterior,
    degenerate,
    discrete_posterior,
    discretize_gaussian,
    gaussian_posterior,
    mu_plus,
    parametric_sufficient_update,
    posterior_moments,
    prob_nonnegative,
    two_point,
)
from hjbandit.errors import IllegalArgumentError
from hjbandit.structs import ScoreSufficientStat, State


def test_gaussian_posterior_without_data_is_prior() -> None:
    moments = gaussian_posterior(GaussianPrior(0.0, 50.0), 5.0, State(0.0, 0.0))
    assert moments.mean == 0.0
    assert moments.sd == pytest.approx(50.0)


def test_gaussian_posterior_substitution() -> None:
    moments = gaussian_posterior(GaussianPrior(0.0, 1.0), 1.0, State(1.0, 1.0))
    assert moments.mean == pytest.approx(0.5)
    assert moments.sd == pytest.approx(1.0 / math.sqrt(2.0))


def test_gaussian_posterior_broadcasts() -> None:
    x = np.array([[-1.0, 0.0, 1.0]])
    q = np.array([[0.0], [1.0]])
    moments = posterior_moments(GaussianPrior(0.0, 1.0), 1.0, x, q)
    assert np.shape(moments.mean) == (2, 3)
    np.testing.assert_allclose(moments.mean[1], [-0.5, 0.0, 0.5])
    np.testing.assert_allclose(moments.mean[0], 0.0)


def test_negative_pull_fraction_rejected() -> None:
    with pytest.raises(IllegalArgumentError):
        gaussian_posterior(GaussianPrior(), 5.0, State(0.0, -0.1))


def test_mu_plus_standard_normal() -> None:
    assert mu_plus(0.0, 1.0) == pytest.approx(1.0 / math.sqrt(2.0 * math.pi))


def test_mu_plus_concentrated() -> None:
    assert abs(mu_plus(10.0, 0.1) - 10.0) < 1e-9


def test_mu_plus_point_mass() -> None:
    assert mu_plus(-3.0, 0.0) == 0.0
    assert mu_plus(3.0, 0.0) == 3.0


def test_mu_plus_dominates_positive_part() -> None:
    mean = np.linspace(-5.0, 5.0, 101)
    sd = np.linspace(0.0, 3.0, 101)
    plus = mu_plus(mean[:, None], sd[None, :])
    assert np.all(plus >= np.maximum(mean, 0.0)[:, None])


def test_mu_plus_collapses_with_data() -> None:
    prior = GaussianPrior(0.0, 1.0)
    q = 1e3
    # posterior mean 0.5 at this x
    x = 0.5 * (q + 1.0)
    moments = posterior_moments(prior, 1.0, x, q)
    assert moments.mean == pytest.approx(0.5)
    assert abs(moments.mu_plus - max(moments.mean, 0.0)) < 1e-3
    at_zero = posterior_moments(prior, 1.0, 0.0, q)
    assert at_zero.mu_plus == pytest.approx(at_zero.sd / math.sqrt(2.0 * math.pi))


def test_two_point_prior_at_origin() -> None:
    prior = two_point(-2.5, 1.7, 0.415)
    weights, moments = discrete_posterior(prior, 1.0, State(0.0, 0.0))
    np.testing.assert_array_equal(weights, prior.mass)
    assert moments.mean == pytest.approx(0.585 * -2.5 + 0.415 * 1.7, abs=1e-12)
    assert moments.mu_plus == pytest.approx(0.7055, abs=1e-12)
    assert moments.sd is None


@pytest.mark.parametrize("state", [State(0.0, 0.0), State(4.0, 2.0), State(-9.0, 7.0)])
def test_degenerate_prior_ignores_data(state: State) -> None:
    weights, moments = discrete_posterior(degenerate(3.0), 1.0, state)
    assert weights.tolist() == [1.0]
    assert moments.mean == 3.0
    assert moments.mu_plus == 3.0


def test_symmetric_atoms_stay_symmetric() -> None:
    prior = DiscretePrior(((-1.0, 0.5), (1.0, 0.5)))
    weights, moments = discrete_posterior(prior, 1.0, State(0.0, 5.0))
    np.testing.assert_allclose(weights, [0.5, 0.5])
    assert moments.mean == pytest.approx(0.0)
    assert moments.mu_plus == pytest.approx(0.5)


def test_discrete_posterior_concentrates() -> None:
    prior = DiscretePrior(((-1.0, 0.5), (1.0, 0.5)))
    q = 1e6
    weights, moments = discrete_posterior(prior, 1.0, State(q * 1.0, q))
    assert weights[1] == pytest.approx(1.0)
    assert moments.mean == pytest.approx(1.0)


def test_discrete_weights_sum_to_one() -> None:
    prior = discretize_gaussian(GaussianPrior(0.0, 2.0), atoms=201)
    x = np.linspace(-5.0, 5.0, 11)
    weights, _ = discrete_posterior(prior, 1.0, State(x, np.full_like(x, 0.7)))
    np.testing.assert_allclose(weights.sum(axis=-1), 1.0)
    assert np.all(weights >= 0)


def test_fine_discretisation_matches_gaussian() -> None:
    gaussian = GaussianPrior(0.0, 2.0)
    fine = discretize_gaussian(gaussian, atoms=4001)
    for x, q in [(0.0, 0.0), (1.0, 0.5), (-2.0, 1.0)]:
        exact = posterior_moments(gaussian, 1.0, x, q)
        approx = posterior_moments(fine, 1.0, x, q)
        assert approx.mean == pytest.approx(exact.mean, abs=1e-4)
        assert approx.mu_plus == pytest.approx(exact.mu_plus, abs=1e-4)


def test_prob_nonnegative_symmetric_prior() -> None:
    assert prob_nonnegative(GaussianPrior(0.0, 50.0), 5.0, 0.0, 0.0) == 0.5
    assert prob_nonnegative(two_point(-2.5, 1.7, 0.415), 1.0, 0.0, 0.0) == (
        pytest.approx(0.415)
    )


@pytest.mark.parametrize(
    "atoms",
    [
        (),
        ((1.0, 0.5), (0.0, 0.5)),
        ((0.0, 0.7), (1.0, 0.7)),
        ((0.0, -0.5), (1.0, 1.5)),
    ],
)
def test_discrete_prior_validation(atoms: tuple) -> None:
    with pytest.raises(IllegalArgumentError):
        DiscretePrior(atoms)


def test_gaussian_prior_needs_positive_sd() -> None:
    with pytest.raises(IllegalArgumentError):
        GaussianPrior(0.0, 0.0)


def test_parametric_update_substitution() -> None:
    stat = parametric_sufficient_update(ScoreSufficientStat(0.0, 0.0), 2.0, 1.0, 4)
    assert stat == (1.0, 0.25)


def test_parametric_update_zero_score() -> None:
    stat = parametric_sufficient_update(ScoreSufficientStat(0.3, 0.1), 0.0, 2.0, 10)
    assert stat.x == 0.3
    assert stat.q == pytest.approx(0.2)


def test_parametric_update_accumulates() -> None:
    stat = ScoreSufficientStat(0.0, 0.0)
    for _ in range(100):
        stat = parametric_sufficient_update(stat, 1.0, 1.0, 100)
    assert stat.x == pytest.approx(10.0)
    assert stat.q == pytest.approx(1.0)


def test_approximate_posterior_uses_score_sd() -> None:
    prior = GaussianPrior(0.0, 1.0)
    approx = approximate_posterior(prior, 1.0, ScoreSufficientStat(1.0, 1.0))
    exact = gaussian_posterior(prior, 1.0, State(1.0, 1.0))
    assert approx == exact

import math

import numpy as np
import pytest

from hjbandit.beliefs import (
    ArmModel,
    GaussianPrior,
    best_arm_probabilities,
    degenerate,
    multiarm_moments,
    two_point,
)
from hjbandit.errors import IllegalArgumentError, UnsupportedK

ORIGIN = np.zeros((1, 2))


def test_point_masses() -> None:
    arms = ArmModel.homogeneous(1.0, 2)
    priors = [degenerate(1.0), degenerate(2.0)]
    mu_k, mu_max = multiarm_moments(priors, arms, ORIGIN, ORIGIN)
    np.testing.assert_allclose(mu_k, [[1.0, 2.0]])
    assert mu_max[0] == pytest.approx(2.0)


def test_normal_against_point_mass() -> None:
    arms = ArmModel.homogeneous(1.0, 2)
    _, mu_max = multiarm_moments(
        [GaussianPrior(0.0, 1.0), degenerate(0.0)], arms, ORIGIN, ORIGIN
    )
    assert mu_max[0] == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), abs=1e-9)


def test_two_iid_normals() -> None:
    arms = ArmModel.homogeneous(1.0, 2)
    prior = GaussianPrior(0.0, 1.0)
    _, mu_max = multiarm_moments([prior, prior], arms, ORIGIN, ORIGIN)
    assert mu_max[0] == pytest.approx(1.0 / math.sqrt(math.pi), abs=1e-8)


def test_three_iid_normals() -> None:
    # E max of three iid standard normals is 3 / (2 sqrt(pi))
    arms = ArmModel.homogeneous(1.0, 3)
    prior = GaussianPrior(0.0, 1.0)
    zeros = np.zeros((1, 3))
    _, mu_max = multiarm_moments([prior] * 3, arms, zeros, zeros)
    assert mu_max[0] == pytest.approx(1.5 / math.sqrt(math.pi), abs=1e-6)


def test_discrete_arms_enumerated() -> None:
    arms = ArmModel.homogeneous(1.0, 2)
    prior = two_point(-1.0, 1.0, 0.5)
    mu_k, mu_max = multiarm_moments([prior, prior], arms, ORIGIN, ORIGIN)
    np.testing.assert_allclose(mu_k, [[0.0, 0.0]], atol=1e-12)
    # max is -1 only when both arms sit at -1
    assert mu_max[0] == pytest.approx(0.5)


def test_mu_max_dominates_every_arm() -> None:
    arms = ArmModel((1.0, 2.0))
    priors = [GaussianPrior(0.0, 1.0), GaussianPrior(0.5, 2.0)]
    rng = np.random.default_rng(3)
    x = rng.normal(size=(50, 2))
    q = rng.uniform(0.0, 1.0, size=(50, 2))
    mu_k, mu_max = multiarm_moments(priors, arms, x, q)
    assert np.all(mu_max >= mu_k.max(axis=-1) - 1e-12)


def test_best_arm_probabilities_sum_to_one() -> None:
    arms = ArmModel.homogeneous(1.0, 3)
    prior = GaussianPrior(0.0, 1.0)
    x = np.array([[0.0, 0.0, 0.0], [1.0, -1.0, 0.5]])
    q = np.array([[0.0, 0.0, 0.0], [0.5, 0.5, 0.5]])
    probs = best_arm_probabilities([prior] * 3, arms, x, q)
    np.testing.assert_allclose(probs.sum(axis=-1), 1.0, atol=1e-8)
    np.testing.assert_allclose(probs[0], 1.0 / 3.0, atol=1e-8)
    assert probs[1].argmax() == 0


def test_point_mass_ties_go_to_lowest_arm() -> None:
    arms = ArmModel.homogeneous(1.0, 2)
    probs = best_arm_probabilities(
        [degenerate(1.0), degenerate(1.0)], arms, ORIGIN, ORIGIN
    )
    np.testing.assert_array_equal(probs, [[1.0, 0.0]])


def test_state_needs_arm_axis() -> None:
    arms = ArmModel.homogeneous(1.0, 2)
    prior = GaussianPrior()
    with pytest.raises(IllegalArgumentError):
        multiarm_moments([prior, prior], arms, np.zeros(3), np.zeros(3))


def test_too_many_gaussian_arms() -> None:
    arms = ArmModel.homogeneous(1.0, 4)
    zeros = np.zeros((1, 4))
    with pytest.raises(UnsupportedK):
        multiarm_moments([GaussianPrior()] * 4, arms, zeros, zeros)


def test_prior_count_must_match_arms() -> None:
    with pytest.raises(IllegalArgumentError):
        ArmModel.homogeneous(1.0, 2).check_priors([GaussianPrior()])

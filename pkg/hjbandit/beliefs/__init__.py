from .multiarm import best_arm_probabilities, multiarm_moments
from .posterior import (
    approximate_posterior,
    discrete_posterior,
    gaussian_posterior,
    mu_plus,
    normal_cdf,
    normal_pdf,
    parametric_sufficient_update,
    posterior_moments,
    prob_nonnegative,
)
from .priors import (
    ArmModel,
    DiscretePrior,
    GaussianPrior,
    PriorSpec,
    degenerate,
    discretize_gaussian,
    two_point,
)

__all__ = [
    # priors
    "ArmModel",
    "DiscretePrior",
    "GaussianPrior",
    "PriorSpec",
    "degenerate",
    "discretize_gaussian",
    "two_point",
    # posteriors
    "approximate_posterior",
    "discrete_posterior",
    "gaussian_posterior",
    "mu_plus",
    "normal_cdf",
    "normal_pdf",
    "parametric_sufficient_update",
    "posterior_moments",
    "prob_nonnegative",
    # several arms
    "best_arm_probabilities",
    "multiarm_moments",
]

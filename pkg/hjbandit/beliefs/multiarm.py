from __future__ import annotations

import logging
import math
from typing import List, Sequence, Tuple

import numpy as np
from scipy import special

from hjbandit.errors import IllegalArgumentError, UnsupportedK
from hjbandit.structs import State

from .posterior import discrete_posterior, mu_plus, posterior_moments
from .priors import ArmModel, DiscretePrior, GaussianPrior, PriorSpec

log = logging.getLogger(__name__)

__all__ = ["multiarm_moments", "best_arm_probabilities", "MAX_GAUSSIAN_ARMS"]

MAX_GAUSSIAN_ARMS = 3
DEFAULT_NODES = 64
# evaluation points held in memory at once by the quadrature
_CHUNK_POINTS = 1 << 22


def _hermite(nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    # physicists' rule: E f(m + s Z) = sum w_i f(m + sqrt(2) s z_i) / sqrt(pi)
    z, w = np.polynomial.hermite.hermgauss(nodes)
    return math.sqrt(2.0) * z, w / math.sqrt(math.pi)


def _split(
    x: np.ndarray, q: np.ndarray, arms: ArmModel
) -> Tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    q = np.asarray(q, dtype=float)
    x, q = np.broadcast_arrays(x, q)
    if x.shape[-1:] != (arms.K,):
        raise IllegalArgumentError(
            f"state arrays must end with an axis of length K={arms.K}"
        )
    return x, q


def _gaussian_view(
    priors: Sequence[PriorSpec], arms: ArmModel, x: np.ndarray, q: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Posterior means and sds per arm; a one-atom prior has sd zero"""
    means: List[np.ndarray] = []
    sds: List[np.ndarray] = []
    for k, prior in enumerate(priors):
        if isinstance(prior, DiscretePrior):
            if not prior.is_degenerate:
                raise IllegalArgumentError(
                    "cannot mix Gaussian arms with multi-atom discrete arms"
                )
            means.append(np.full(x.shape[:-1], prior.support[0]))
            sds.append(np.zeros(x.shape[:-1]))
            continue
        moments = posterior_moments(prior, arms.sigma[k], x[..., k], q[..., k])
        means.append(np.asarray(moments.mean, dtype=float))
        sds.append(np.asarray(moments.sd, dtype=float))
    return np.stack(means, axis=-1), np.stack(sds, axis=-1)


def _discrete_view(
    priors: Sequence[PriorSpec], arms: ArmModel, x: np.ndarray, q: np.ndarray
) -> List[Tuple[np.ndarray, np.ndarray]]:
    out = []
    for k, prior in enumerate(priors):
        assert isinstance(prior, DiscretePrior)
        weights, _ = discrete_posterior(
            prior, arms.sigma[k], State(x[..., k], q[..., k])  # type: ignore[arg-type]
        )
        out.append((prior.support, weights))
    return out


def _expected_max_discrete(
    arms_view: List[Tuple[np.ndarray, np.ndarray]],
) -> np.ndarray:
    # E max = sum_j u_j (G(u_j) - G(u_{j-1})), G the product of the arm cdfs
    values = np.unique(np.concatenate([support for support, _ in arms_view]))
    joint = None
    for support, weights in arms_view:
        cdf = weights @ (support[:, None] <= values[None, :]).astype(float)
        joint = cdf if joint is None else joint * cdf
    assert joint is not None
    increments = np.diff(joint, axis=-1, prepend=0.0)
    return increments @ values


def _expected_max_gaussian(
    means: np.ndarray, sds: np.ndarray, nodes: int
) -> np.ndarray:
    K = means.shape[-1]  # noqa: N806
    if K == 1:
        return means[..., 0]
    # the widest posterior is integrated in closed form, the others by
    # tensor Gauss-Hermite
    order = np.argsort(sds, axis=-1, kind="stable")
    means = np.take_along_axis(means, order, axis=-1)
    sds = np.take_along_axis(sds, order, axis=-1)
    z, w = _hermite(nodes)
    flat_m = means.reshape(-1, K)
    flat_s = sds.reshape(-1, K)
    out = np.empty(flat_m.shape[0])
    chunk = max(1, _CHUNK_POINTS // nodes ** (K - 1))
    for start in range(0, flat_m.shape[0], chunk):
        m = flat_m[start : start + chunk]
        s = flat_s[start : start + chunk]
        if K == 2:
            inner = m[:, :1] + s[:, :1] * z
            weights = w
        else:
            a = (m[:, 0:1] + s[:, 0:1] * z)[:, :, None]
            b = (m[:, 1:2] + s[:, 1:2] * z)[:, None, :]
            inner = np.maximum(a, b).reshape(m.shape[0], -1)
            weights = np.outer(w, w).ravel()
        last_m = m[:, -1:]
        last_s = s[:, -1:]
        value = inner + mu_plus(last_m - inner, np.broadcast_to(last_s, inner.shape))
        out[start : start + chunk] = value @ weights
    return out.reshape(means.shape[:-1])


def multiarm_moments(
    priors: Sequence[PriorSpec],
    arms: ArmModel,
    x: np.ndarray,
    q: np.ndarray,
    nodes: int = DEFAULT_NODES,
) -> Tuple[np.ndarray, np.ndarray]:
    """Per-arm posterior means and E[max_k mu_k] at the given states.

    ``x`` and ``q`` carry the arm index on their last axis. Arms are
    independent a priori. Discrete priors are enumerated exactly through
    the product of the arm cdfs; Gaussian posteriors (one-atom priors count
    as Gaussian with zero sd) use Gauss-Hermite quadrature with ``nodes``
    points per integrated dimension.

    Returns:
        tuple: ``(mu_k, mu_max)`` with shapes ``x.shape`` and ``x.shape[:-1]``
    """
    arms.check_priors(priors)
    x, q = _split(x, q, arms)
    if all(isinstance(prior, DiscretePrior) for prior in priors):
        view = _discrete_view(priors, arms, x, q)
        mu_k = np.stack([weights @ support for support, weights in view], axis=-1)
        return mu_k, _expected_max_discrete(view)

    gaussian_arms = sum(isinstance(prior, GaussianPrior) for prior in priors)
    if gaussian_arms and arms.K > MAX_GAUSSIAN_ARMS:
        raise UnsupportedK(
            f"Gaussian quadrature supports at most {MAX_GAUSSIAN_ARMS} arms,"
            f" got {arms.K}"
        )
    if nodes < DEFAULT_NODES:
        log.debug("Using %d Gauss-Hermite nodes per dimension", nodes)
    means, sds = _gaussian_view(priors, arms, x, q)
    return means, _expected_max_gaussian(means, sds, nodes)


def _below(a: np.ndarray, m: np.ndarray, s: np.ndarray, strict: bool) -> np.ndarray:
    """P(mu_j < a) (or <= a for a point mass when ``strict`` is false)"""
    positive = s > 0
    smooth = special.ndtr((a - m) / np.where(positive, s, 1.0))
    step = (m < a) if strict else (m <= a)
    return np.where(positive, smooth, step.astype(float))


def best_arm_probabilities(
    priors: Sequence[PriorSpec],
    arms: ArmModel,
    x: np.ndarray,
    q: np.ndarray,
    nodes: int = DEFAULT_NODES,
) -> np.ndarray:
    """Posterior probability that each arm has the largest mean.

    Ties between point masses go to the lowest arm index, so the
    probabilities along the last axis sum to one.
    """
    arms.check_priors(priors)
    x, q = _split(x, q, arms)
    K = arms.K  # noqa: N806
    if K == 1:
        return np.ones(x.shape)

    if all(isinstance(prior, DiscretePrior) for prior in priors):
        view = _discrete_view(priors, arms, x, q)
        probs = []
        for k, (support_k, weights_k) in enumerate(view):
            term = weights_k.copy()
            for j, (support_j, weights_j) in enumerate(view):
                if j == k:
                    continue
                if j < k:
                    mask = support_j[:, None] < support_k[None, :]
                else:
                    mask = support_j[:, None] <= support_k[None, :]
                term *= weights_j @ mask.astype(float)
            probs.append(term.sum(axis=-1))
        return np.stack(probs, axis=-1)

    means, sds = _gaussian_view(priors, arms, x, q)
    z, w = _hermite(nodes)
    probs = []
    for k in range(K):
        a = means[..., k, None] + sds[..., k, None] * z
        term = np.ones(a.shape)
        for j in range(K):
            if j == k:
                continue
            term *= _below(a, means[..., j, None], sds[..., j, None], strict=j < k)
        probs.append(term @ w)
    out = np.stack(probs, axis=-1)
    return out / out.sum(axis=-1, keepdims=True)

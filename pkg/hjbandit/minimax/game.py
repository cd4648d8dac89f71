from __future__ import annotations

import logging
from typing import Callable, List, Optional, Tuple

from hjbandit.hjb import PolicyRisk, solve_policy_risk
from hjbandit.policies import Thompson
from hjbandit.sim import GaussianShift, frequentist_profile
from hjbandit.structs import GameReport, LfpState

from .lfp import MinimaxSettings, Peaks, find_peaks, lfp_iterate, solve_under_lfp

log = logging.getLogger(__name__)

__all__ = ["evaluate_equilibrium", "search_lfp"]


def evaluate_equilibrium(
    lfp: LfpState,
    settings: MinimaxSettings,
    *,
    sigma: float = 1.0,
    peaks: Optional[Peaks] = None,
    history: Optional[List[LfpState]] = None,
) -> GameReport:
    """Value of the game at a candidate least-favourable prior.

    The minimax value is the minimal Bayes risk under ``lfp``; Thompson
    sampling's risk under the same prior is reported alongside. Without
    ``peaks`` the risk profile is simulated to measure how balanced the two
    peaks are.
    """
    lfp.validate()
    value, policy, problem, grid = solve_under_lfp(lfp, sigma, settings)
    thompson = Thompson(problem.prior, sigma)
    risk = solve_policy_risk(
        PolicyRisk(problem.priors, problem.arms, policy=thompson),
        grid,
        settings.solver,
    )
    if peaks is None:
        profile = frequentist_profile(
            policy,
            settings.mu_grid(),
            GaussianShift(sigma),
            settings.n,
            settings.reps,
            settings.seed,
            workers=settings.workers,
        )
        peaks = find_peaks(profile)
    report = GameReport(
        minimax_value=value,
        lfp=lfp,
        equilibrium_gap=peaks.gap,
        thompson_value=risk.value_at_origin,
        history=list(history or []),
    )
    log.info(
        "Minimax value %.4f, Thompson %.4f (ratio %.3f), peak gap %.3f",
        report.minimax_value,
        report.thompson_value,
        report.thompson_ratio,
        report.equilibrium_gap,
    )
    return report


def search_lfp(
    initial: LfpState,
    settings: MinimaxSettings,
    *,
    sigma: float = 1.0,
    on_iteration: Optional[Callable[[LfpState, Peaks], None]] = None,
) -> Tuple[GameReport, List[LfpState]]:
    """Iterate :func:`lfp_iterate` until the rounded state repeats or
    ``settings.max_iter`` updates were made.

    ``on_iteration`` sees every new state with the peaks behind it.
    """
    state = initial.validate()
    history = [state]
    peaks: Optional[Peaks] = None
    for _ in range(settings.max_iter):
        new, peaks = lfp_iterate(state, settings, sigma)
        if on_iteration is not None:
            on_iteration(new, peaks)
        converged = new[:3] == state[:3]
        state = new
        history.append(state)
        if converged:
            log.info("LFP search converged after %d iteration(s)", state.iteration)
            break
    else:
        if settings.max_iter:
            log.warning(
                "LFP search stopped after %d iterations without a fixed point",
                settings.max_iter,
            )
    report = evaluate_equilibrium(
        state, settings, sigma=sigma, peaks=peaks, history=history
    )
    return report, history

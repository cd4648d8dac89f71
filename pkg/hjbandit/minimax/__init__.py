"""Least-favourable prior search.

The search space is two-point priors straddling zero. Wider supports are
assumed not to be less favourable and are never tried.
"""

from .game import evaluate_equilibrium, search_lfp
from .lfp import (
    MinimaxSettings,
    Peaks,
    find_peaks,
    lfp_iterate,
    rescale_lfp,
    solve_under_lfp,
)

__all__ = [
    "MinimaxSettings",
    "Peaks",
    "evaluate_equilibrium",
    "find_peaks",
    "lfp_iterate",
    "rescale_lfp",
    "search_lfp",
    "solve_under_lfp",
]

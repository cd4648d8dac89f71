from __future__ import annotations

from dataclasses import dataclass

from hjbandit.errors import IllegalArgumentError

from .howard import DEFAULT_MAX_ITER, DEFAULT_TOLERANCE

__all__ = ["SolverOptions", "SCHEMES"]

SCHEMES = ("explicit", "implicit", "hybrid")


@dataclass(frozen=True)
class SolverOptions:
    """Knobs shared by the PDE solvers.

    Arguments:
        scheme (str): time stepping of finite-horizon solves, one of
            ``explicit`` (needs a CFL-compliant grid), ``implicit`` (Howard
            policy iteration every step) or ``hybrid`` (one factorised pull
            solve per step). Default: hybrid
        tol (float): Howard stopping threshold on the sup-norm value change.
            Default: 1e-9
        max_iter (int): Howard iterations allowed per step. Default: 100
        residual_tol (float): largest accepted residual of the discrete
            equations, in value units. Default: 1e-6
        slice_stride (int): keep every ``slice_stride``-th time slice (the
            first and last are always kept). Default: 1
        quadrature_nodes (int): Gauss-Hermite nodes per dimension for
            several-arm payoffs. Default: 64
        allow_discontinuous (bool): evaluate discontinuous policies with the
            risk PDE anyway. Default: False
    """

    scheme: str = "hybrid"
    tol: float = DEFAULT_TOLERANCE
    max_iter: int = DEFAULT_MAX_ITER
    residual_tol: float = 1e-6
    slice_stride: int = 1
    quadrature_nodes: int = 64
    allow_discontinuous: bool = False

    def __post_init__(self) -> None:
        if self.scheme not in SCHEMES:
            raise IllegalArgumentError(
                f"unknown scheme {self.scheme!r}, expected one of {SCHEMES}"
            )
        if not self.tol > 0 or not self.residual_tol > 0:
            raise IllegalArgumentError("tolerances must be positive")
        if self.max_iter < 1:
            raise IllegalArgumentError("max_iter must be at least 1")
        if self.slice_stride < 1:
            raise IllegalArgumentError("slice_stride must be at least 1")
        if self.quadrature_nodes < 2:
            raise IllegalArgumentError("quadrature_nodes must be at least 2")

from typing import Any, Optional

__all__ = [
    # base
    "BanditError",
    # configuration errors (exit code 2)
    "ConfigError",
    "SchemaError",
    "UnsupportedPdeEval",
    "IllegalArgumentError",
    "InvalidMu",
    # numerical errors (exit code 3)
    "NumericalError",
    "CFLViolation",
    "HowardNonconvergence",
    "SingularSystem",
    "AllWeightsUnderflow",
    "UnsupportedK",
    "OutOfGrid",
    "NoSwitchInRange",
    "PeakNotFound",
    "NoNegativePeak",
    "NoPositivePeak",
]


class BanditError(RuntimeError):
    # process exit status the command line maps this error to
    exit_code = 1

    def __str__(self) -> str:
        if not self.args:
            return self.__class__.__name__
        return f"{self.__class__.__name__}: {super().__str__()}"


class ConfigError(BanditError):
    exit_code = 2


class SchemaError(ConfigError):
    """Experiment configuration does not match the schema.

    ``key`` holds the dotted path of the offending entry, e.g.
    ``grid.preset`` or ``prior.atoms[1]``.
    """

    def __init__(self, message: str, key: Optional[str] = None) -> None:
        self.key = key
        if key:
            message = f"{key}: {message}"
        super().__init__(message)


class UnsupportedPdeEval(ConfigError):
    """Policy cannot be evaluated by the linear risk PDE (it is discontinuous)"""


class IllegalArgumentError(BanditError, ValueError):
    exit_code = 2


class InvalidMu(IllegalArgumentError):
    pass


class NumericalError(BanditError):
    exit_code = 3


class CFLViolation(NumericalError):
    def __init__(self, dt: float, bound: float, *args: Any) -> None:
        self.dt = dt
        self.bound = bound
        super().__init__(
            f"explicit step dt={dt:.3e} exceeds stability bound {bound:.3e}", *args
        )


class HowardNonconvergence(NumericalError):
    def __init__(self, iterations: int, change: float) -> None:
        self.iterations = iterations
        self.change = change
        super().__init__(
            f"policy iteration did not settle after {iterations} iterations "
            f"(last sup-norm change {change:.3e})"
        )


class SingularSystem(NumericalError):
    pass


class AllWeightsUnderflow(NumericalError):
    pass


class UnsupportedK(NumericalError):
    pass


class OutOfGrid(NumericalError):
    pass


class NoSwitchInRange(NumericalError):
    pass


class PeakNotFound(NumericalError):
    pass


class NoNegativePeak(PeakNotFound):
    pass


class NoPositivePeak(PeakNotFound):
    pass

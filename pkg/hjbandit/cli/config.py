"""Experiment configuration: one YAML file validated into frozen dataclasses.

Every key is optional; missing keys take the defaults documented on the
dataclasses below. An example file::

    config_version: "1.0"
    seed: 7
    prior: {kind: gaussian, mean: 0.0, sd: 50.0}
    arms: {count: 1, sigma: 5.0}
    grid: {preset: desk}
    solver: {scheme: hybrid}
    monte_carlo: {reps: 5000, horizons: [200, 1000, 5000]}
    output: {directory: results}
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import (
    Any,
    Dict,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Type,
    TypeVar,
)

import yaml

from hjbandit.beliefs import ArmModel, DiscretePrior, GaussianPrior, PriorSpec
from hjbandit.errors import BanditError, ConfigError, SchemaError
from hjbandit.hjb import SCHEMES, SolverOptions
from hjbandit.lattice import PRESETS, GridSpec
from hjbandit.minimax import MinimaxSettings
from hjbandit.structs import LfpState
from hjbandit.util import config_digest, output_dir_override, parse_config_version

__all__ = [
    "ArmConfig",
    "ExperimentConfig",
    "GridConfig",
    "MinimaxConfig",
    "MonteCarloConfig",
    "OutputConfig",
    "PriorConfig",
    "SolverConfig",
    "SweepConfig",
    "load_config",
    "parse_config",
]

PROBLEMS = ("optimal", "batched", "best-arm", "discounted")
REWARDS = ("gaussian", "bernoulli")

C = TypeVar("C")


@dataclass(frozen=True)
class PriorConfig:
    """``kind: gaussian`` uses ``mean`` and ``sd``; ``kind: discrete`` uses
    ``atoms``, a list of ``[mu, mass]`` pairs."""

    kind: str = "gaussian"
    mean: float = 0.0
    sd: float = 50.0
    atoms: Tuple[Tuple[float, float], ...] = ()

    def build(self) -> PriorSpec:
        if self.kind == "gaussian":
            return GaussianPrior(self.mean, self.sd)
        return DiscretePrior(self.atoms)


@dataclass(frozen=True)
class ArmConfig:
    count: int = 1
    sigma: Tuple[float, ...] = (5.0,)

    def build(self) -> ArmModel:
        sigma = self.sigma * self.count if len(self.sigma) == 1 else self.sigma
        return ArmModel(tuple(sigma))


@dataclass(frozen=True)
class GridConfig:
    preset: str = "paper"
    x_width: float = 2.5
    # unset: 1 for finite-horizon grids, the collapse bound for discounted ones
    q_max: Optional[float] = None

    def q_bound(self, collapse_q: float = 0.0) -> float:
        if self.q_max is not None:
            return self.q_max
        return max(1.0, float(math.ceil(collapse_q)))


@dataclass(frozen=True)
class SolverConfig:
    scheme: str = "hybrid"
    tol: float = 1e-9
    max_iter: int = 100
    residual_tol: float = 1e-6
    slice_stride: int = 100
    quadrature_nodes: int = 64
    allow_discontinuous: bool = False

    def build(self) -> SolverOptions:
        return SolverOptions(**dataclasses.asdict(self))


@dataclass(frozen=True)
class MonteCarloConfig:
    reps: int = 5000
    horizons: Tuple[int, ...] = (200, 500, 1000, 2500, 5000)
    reward: str = "gaussian"
    realized: bool = False
    chunk_size: int = 256
    timeout: Optional[float] = None
    workers: Optional[int] = None

    def runner_kwargs(self) -> Dict[str, Any]:
        return {
            "workers": self.workers,
            "chunk_size": self.chunk_size,
            "timeout": self.timeout,
        }


@dataclass(frozen=True)
class SweepConfig:
    """Prior sds and reward sds swept by ``eval-policy``; an empty tuple
    means the single value of ``prior.sd`` or ``arms.sigma``"""

    nu: Tuple[float, ...] = ()
    sigma: Tuple[float, ...] = ()


@dataclass(frozen=True)
class MinimaxConfig:
    initial: Tuple[float, float, float] = (-2.5, 2.5, 0.5)
    learning_rates: Tuple[float, float, float] = (0.1, 0.1, 0.1)
    support_unit: float = 0.05
    mass_unit: float = 0.005
    max_iter: int = 50
    mu_min: float = -6.0
    mu_max: float = 6.0
    mu_step: float = 0.1
    n: int = 2000
    reps: int = 4000

    def initial_state(self) -> LfpState:
        mu_lo, mu_hi, p = self.initial
        return LfpState(mu_lo, mu_hi, p)


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "results"
    value_slices: bool = True
    binary: bool = False
    compresslevel: Optional[int] = None


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one command needs. Defaults: mu0 = 0, nu = 50, sigma = 5
    on the ``paper`` grid preset."""

    config_version: str = "1.0"
    problem: str = "optimal"
    seed: int = 0
    beta: float = 1.0
    batch_dt: float = 0.25
    priors: Tuple[PriorConfig, ...] = (PriorConfig(),)
    arms: ArmConfig = field(default_factory=ArmConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    monte_carlo: MonteCarloConfig = field(default_factory=MonteCarloConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    minimax: MinimaxConfig = field(default_factory=MinimaxConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    @property
    def K(self) -> int:  # noqa: N802
        return self.arms.count

    def prior_specs(self) -> List[PriorSpec]:
        if len(self.priors) == 1:
            return [self.priors[0].build()] * self.K
        return [p.build() for p in self.priors]

    def arm_model(self) -> ArmModel:
        return self.arms.build()

    def solver_options(self) -> SolverOptions:
        return self.solver.build()

    def grid_spec(
        self, *, stationary: bool = False, collapse_q: float = 0.0
    ) -> GridSpec:
        sigma = max(self.arm_model().sigma)
        return GridSpec.from_preset(
            self.grid.preset,
            sigma,
            K=self.K,
            x_width=self.grid.x_width,
            q_max=self.grid.q_bound(collapse_q),
            stationary=stationary,
        )

    def minimax_settings(self) -> MinimaxSettings:
        mm = self.minimax
        return MinimaxSettings(
            learning_rates=mm.learning_rates,
            support_unit=mm.support_unit,
            mass_unit=mm.mass_unit,
            max_iter=mm.max_iter,
            mu_min=mm.mu_min,
            mu_max=mm.mu_max,
            mu_step=mm.mu_step,
            n=mm.n,
            reps=mm.reps,
            seed=self.seed,
            preset=self.grid.preset,
            solver=self.solver_options(),
            workers=self.monte_carlo.workers,
        )

    def output_directory(self) -> str:
        return output_dir_override() or self.output.directory

    def digest(self) -> str:
        """SHA-256 of the resolved configuration, independent of formatting"""
        canonical = json.dumps(dataclasses.asdict(self), sort_keys=True)
        return config_digest(canonical)


def _path(parent: str, key: str) -> str:
    return f"{parent}.{key}" if parent else key


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"expected a number, got {value!r}", path)
    return float(value)


def _integer(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"expected an integer, got {value!r}", path)
    return value


def _flag(value: Any, path: str) -> bool:
    if not isinstance(value, bool):
        raise SchemaError(f"expected true or false, got {value!r}", path)
    return value


def _text(value: Any, path: str) -> str:
    if not isinstance(value, (str, int, float)) or isinstance(value, bool):
        raise SchemaError(f"expected a string, got {value!r}", path)
    return str(value)


def _list(value: Any, path: str) -> List[Any]:
    if not isinstance(value, list):
        raise SchemaError(f"expected a list, got {value!r}", path)
    return value


def _numbers(value: Any, path: str, size: Optional[int] = None) -> Tuple[float, ...]:
    items = _list(value, path)
    if size is not None and len(items) != size:
        raise SchemaError(f"expected {size} numbers, got {len(items)}", path)
    return tuple(_number(v, f"{path}[{i}]") for i, v in enumerate(items))


def _section(
    cls: Type[C], raw: Any, path: str, fields: Mapping[str, Any]
) -> Mapping[str, Any]:
    """Check ``raw`` is a mapping whose keys are all known to ``cls``"""
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise SchemaError(f"expected a mapping, got {raw!r}", path)
    for key in raw:
        if key not in fields:
            raise SchemaError(f"unknown key for {cls.__name__}", _path(path, str(key)))
    return raw


def _convert(raw: Mapping[str, Any], path: str, converters: Mapping[str, Any]) -> dict:
    return {
        key: converters[key](value, _path(path, key)) for key, value in raw.items()
    }


def _optional(convert: Any) -> Any:
    def parse(value: Any, path: str) -> Any:
        return None if value is None else convert(value, path)

    return parse


def _choice(choices: Sequence[str]) -> Any:
    def parse(value: Any, path: str) -> str:
        text = _text(value, path)
        if text not in choices:
            raise SchemaError(f"expected one of {list(choices)}, got {text!r}", path)
        return text

    return parse


def _positive(convert: Any) -> Any:
    def parse(value: Any, path: str) -> Any:
        number = convert(value, path)
        if not number > 0:
            raise SchemaError(f"must be positive, got {number!r}", path)
        return number

    return parse


def _build(cls: Type[C], raw: Any, path: str, converters: Mapping[str, Any]) -> C:
    section = _section(cls, raw, path, converters)
    try:
        return cls(**_convert(section, path, converters))
    except SchemaError:
        raise
    except (BanditError, ValueError, TypeError) as exc:
        raise SchemaError(str(exc), path or None) from exc


def _atoms(value: Any, path: str) -> Tuple[Tuple[float, float], ...]:
    pairs = _list(value, path)
    atoms = tuple(_numbers(p, f"{path}[{i}]", 2) for i, p in enumerate(pairs))
    return atoms  # type: ignore[return-value]


def _prior(raw: Any, path: str) -> PriorConfig:
    converters = {
        "kind": _choice(("gaussian", "discrete")),
        "mean": _number,
        "sd": _positive(_number),
        "atoms": _atoms,
    }
    config = _build(PriorConfig, raw, path, converters)
    if config.kind == "discrete" and not config.atoms:
        raise SchemaError("a discrete prior needs atoms", _path(path, "atoms"))
    try:
        config.build()
    except (BanditError, ValueError) as exc:
        raise SchemaError(str(exc), path) from exc
    return config


def _priors(raw: Any, path: str) -> Tuple[PriorConfig, ...]:
    if isinstance(raw, list):
        if not raw:
            raise SchemaError("expected at least one prior", path)
        return tuple(_prior(p, f"{path}[{i}]") for i, p in enumerate(raw))
    return (_prior(raw, path),)


def _arms(raw: Any, path: str) -> ArmConfig:
    def sigma(value: Any, p: str) -> Tuple[float, ...]:
        values = _numbers(value, p) if isinstance(value, list) else (
            _number(value, p),
        )
        if not values or not all(s > 0 for s in values):
            raise SchemaError("reward sds must be positive", p)
        return values

    config = _build(
        ArmConfig, raw, path, {"count": _positive(_integer), "sigma": sigma}
    )
    if len(config.sigma) not in (1, config.count):
        raise SchemaError(
            f"expected 1 or {config.count} sds, got {len(config.sigma)}",
            _path(path, "sigma"),
        )
    return config


def _grid(raw: Any, path: str) -> GridConfig:
    converters = {
        "preset": _choice(tuple(PRESETS)),
        "x_width": _positive(_number),
        "q_max": _positive(_number),
    }
    return _build(GridConfig, raw, path, converters)


def _solver(raw: Any, path: str) -> SolverConfig:
    converters = {
        "scheme": _choice(SCHEMES),
        "tol": _positive(_number),
        "max_iter": _positive(_integer),
        "residual_tol": _positive(_number),
        "slice_stride": _positive(_integer),
        "quadrature_nodes": _positive(_integer),
        "allow_discontinuous": _flag,
    }
    config = _build(SolverConfig, raw, path, converters)
    try:
        config.build()
    except (BanditError, ValueError) as exc:
        raise SchemaError(str(exc), path or None) from exc
    return config


def _monte_carlo(raw: Any, path: str) -> MonteCarloConfig:
    def horizons(value: Any, p: str) -> Tuple[int, ...]:
        items = _list(value, p)
        if not items:
            raise SchemaError("expected at least one horizon", p)
        return tuple(_positive(_integer)(v, f"{p}[{i}]") for i, v in enumerate(items))

    converters = {
        "reps": _positive(_integer),
        "horizons": horizons,
        "reward": _choice(REWARDS),
        "realized": _flag,
        "chunk_size": _positive(_integer),
        "timeout": _optional(_positive(_number)),
        "workers": _optional(_positive(_integer)),
    }
    return _build(MonteCarloConfig, raw, path, converters)


def _sweep(raw: Any, path: str) -> SweepConfig:
    def values(value: Any, p: str) -> Tuple[float, ...]:
        items = _numbers(value, p)
        if not items:
            raise SchemaError("sweep is empty", p)
        if not all(v > 0 for v in items):
            raise SchemaError("swept sds must be positive", p)
        return items

    return _build(SweepConfig, raw, path, {"nu": values, "sigma": values})


def _minimax(raw: Any, path: str) -> MinimaxConfig:
    def triple(value: Any, p: str) -> Tuple[float, ...]:
        return _numbers(value, p, 3)

    converters = {
        "initial": triple,
        "learning_rates": triple,
        "support_unit": _positive(_number),
        "mass_unit": _positive(_number),
        "max_iter": _integer,
        "mu_min": _number,
        "mu_max": _number,
        "mu_step": _positive(_number),
        "n": _positive(_integer),
        "reps": _positive(_integer),
    }
    config = _build(MinimaxConfig, raw, path, converters)
    try:
        config.initial_state().validate()
    except ValueError as exc:
        raise SchemaError(str(exc), _path(path, "initial")) from exc
    return config


def _output(raw: Any, path: str) -> OutputConfig:
    def level(value: Any, p: str) -> int:
        number = _integer(value, p)
        if not 1 <= number <= 9:
            raise SchemaError(f"compresslevel must lie in 1..9, got {number}", p)
        return number

    converters = {
        "directory": _text,
        "value_slices": _flag,
        "binary": _flag,
        "compresslevel": _optional(level),
    }
    return _build(OutputConfig, raw, path, converters)


def _version(value: Any, path: str) -> str:
    text = _text(value, path)
    try:
        parse_config_version(text)
    except ValueError as exc:
        raise SchemaError(f"unsupported config version {text!r}", path) from exc
    return text


_TOP_LEVEL = {
    "config_version": _version,
    "problem": _choice(PROBLEMS),
    "seed": _integer,
    "beta": _positive(_number),
    "batch_dt": _positive(_number),
    "prior": _priors,
    "arms": _arms,
    "grid": _grid,
    "solver": _solver,
    "monte_carlo": _monte_carlo,
    "sweep": _sweep,
    "minimax": _minimax,
    "output": _output,
}


def parse_config(raw: Any) -> ExperimentConfig:
    """Validate a decoded YAML document.

    Raises:
        SchemaError: with the dotted path of the first offending key
    """
    section = dict(_section(ExperimentConfig, raw, "", _TOP_LEVEL))
    values = _convert(section, "", _TOP_LEVEL)
    if "prior" in values:
        values["priors"] = values.pop("prior")
    config = ExperimentConfig(**values)
    if config.seed < 0:
        raise SchemaError("seed must be nonnegative", "seed")
    if len(config.priors) not in (1, config.K):
        raise SchemaError(
            f"expected 1 or {config.K} priors, got {len(config.priors)}", "prior"
        )
    try:
        config.arm_model().check_priors(config.prior_specs())
        config.grid_spec()
        config.minimax_settings()
    except BanditError as exc:
        raise SchemaError(str(exc)) from exc
    return config


def load_config(path: Optional[str]) -> ExperimentConfig:
    """Read and validate the YAML file at ``path``; ``None`` gives the
    defaults.

    Raises:
        ConfigError: the file cannot be read
        SchemaError: the file is not valid YAML or does not match the schema
    """
    if path is None:
        return ExperimentConfig()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        raw = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else path
        raise SchemaError(f"{exc.problem} ({where})") from exc
    except yaml.YAMLError as exc:
        raise SchemaError(str(exc)) from exc
    return parse_config(raw)

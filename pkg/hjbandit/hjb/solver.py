from __future__ import annotations

import logging
import time
from typing import Callable, List, NamedTuple, Optional, Tuple

import numpy as np
import scipy.sparse as sp

from hjbandit.errors import (
    IllegalArgumentError,
    NumericalError,
    UnsupportedK,
    UnsupportedPdeEval,
)
from hjbandit.lattice import (
    GridSpec,
    ValueField,
    check_cfl,
    factorize,
    generator_matrix,
)
from hjbandit.lattice.operator import Coefficients
from hjbandit.metrics import Metrics
from hjbandit.metrics.stats import Avg, Count, Max, Total
from hjbandit.policies.abstract import AbstractPolicy
from hjbandit.policies.optimal import OptimalFromValue, PiecewiseConstantTable
from hjbandit.structs import SolveReport

from .coefficients import Payoffs, payoffs
from .howard import StepResult, howard_implicit, howard_stationary
from .options import SolverOptions
from .problem import Batched, BestArm, Discounted, FiniteHorizonOptimal, PolicyRisk
from .schemes import (
    ArmwiseSolver,
    HjbCoefficients,
    HybridPullSolver,
    step_explicit,
)

log = logging.getLogger(__name__)

__all__ = [
    "Solution",
    "BatchedSolution",
    "solve_optimal",
    "solve_policy_risk",
    "solve_batched",
    "solve_discounted",
    "solve_discounted_policy_risk",
    "solve_best_arm",
    "policy_map",
]


class Solution(NamedTuple):
    fields: List[ValueField]
    "Stored value slices in increasing time order, ``t = 0`` first"

    report: SolveReport

    controls: List[np.ndarray]
    "Control in force at each stored slice (pull decision, arm or pull share)"

    decisions: np.ndarray
    "Control of every time step, ``t = 0`` first, whatever the slice stride"

    @property
    def grid(self) -> GridSpec:
        return self.fields[0].grid

    @property
    def value_at_origin(self) -> float:
        return self.fields[0].at_origin()

    def optimal_policy(self, clamp: bool = True) -> OptimalFromValue:
        times = self.grid.dt * np.arange(self.decisions.shape[0])
        return OptimalFromValue(self.grid, times, self.decisions, clamp=clamp)


class BatchedSolution(NamedTuple):
    table: PiecewiseConstantTable
    "Decision of every batch"

    fields: List[ValueField]
    "Value at each batch boundary, ``t = 0`` first"

    report: SolveReport

    @property
    def value_at_origin(self) -> float:
        return self.fields[0].at_origin()


class _Instruments:
    """Sensors of one solve; their snapshot goes into the report"""

    def __init__(self, scheme: str) -> None:
        self.scheme = scheme
        self.metrics = Metrics(tags={"scheme": scheme})
        self._started = time.perf_counter()
        self.iterations = self.metrics.sensor("howard-iterations")
        self._total = Total()
        for name, stat in (
            ("iterations-avg", Avg()),
            ("iterations-max", Max()),
            ("iterations-total", self._total),
            ("steps", Count()),
        ):
            self.iterations.add(self.metrics.metric_name(name, "hjb"), stat)
        self.residual = self.metrics.sensor("step-residual")
        self._max_residual = Max()
        self.residual.add(
            self.metrics.metric_name("residual-max", "hjb"), self._max_residual
        )

    def record(self, result: StepResult) -> None:
        self.iterations.record(result.iterations)
        self.residual.record(result.residual)

    def report(self, value: float, residual_tol: float) -> SolveReport:
        max_residual = max(self._max_residual.measure(), 0.0)
        if max_residual > residual_tol:
            raise NumericalError(
                f"residual {max_residual:.3e} exceeds tolerance {residual_tol:.3e}"
            )
        wall = time.perf_counter() - self._started
        iterations = int(self._total.measure())
        log.info(
            "Finished %s solve in %.2fs: %d iterations, V(0) = %.6g",
            self.scheme,
            wall,
            iterations,
            value,
        )
        return SolveReport(
            scheme=self.scheme,
            iterations=iterations,
            max_residual=max_residual,
            wall_time=wall,
            value_at_origin=value,
            stats=self.metrics.snapshot(),
        )


def _compact(control: np.ndarray) -> np.ndarray:
    """int8 copy of pull decisions and arm indices; pull shares stay float"""
    control = np.asarray(control)
    if np.array_equal(control, np.rint(control)):
        return control.astype(np.int8)
    return np.array(control, dtype=np.float64)


class _Recorder:
    """Keeps every ``stride``-th slice plus the first and the last, and the
    control of every step"""

    def __init__(self, grid: GridSpec, stride: int) -> None:
        self._grid = grid
        self._stride = stride
        self._fields: List[ValueField] = []
        self._controls: List[np.ndarray] = []
        self._decisions: List[np.ndarray] = []

    def keep(self, time_index: int, values: np.ndarray, control: np.ndarray) -> None:
        self._decisions.append(_compact(control))
        if time_index in (0, self._grid.nt) or time_index % self._stride == 0:
            self._fields.append(ValueField(self._grid, time_index, values))
            self._controls.append(np.array(control))

    def result(self) -> Tuple[List[ValueField], List[np.ndarray], np.ndarray]:
        return self._fields[::-1], self._controls[::-1], np.stack(self._decisions[::-1])


def _finite_horizon(grid: GridSpec) -> None:
    if grid.stationary:
        raise IllegalArgumentError("finite-horizon solves need a grid with nt > 0")


def _march(
    grid: GridSpec,
    terminal: np.ndarray,
    step: Callable[[int, np.ndarray, Optional[np.ndarray]], StepResult],
    options: SolverOptions,
    instruments: _Instruments,
) -> Solution:
    """Step from ``t = 1`` back to ``t = 0``; ``step`` gets the new time index.

    The terminal slice carries the control of the last decision period.
    """
    recorder = _Recorder(grid, options.slice_stride)
    values = terminal
    control: Optional[np.ndarray] = None
    for index in range(grid.nt - 1, -1, -1):
        result = step(index, values, control)
        instruments.record(result)
        if control is None:
            recorder.keep(grid.nt, values, result.control)
        values, control = result.values, result.control
        recorder.keep(index, values, control)
        log.debug("Time slice %d/%d done", index, grid.nt)
    fields, controls, decisions = recorder.result()
    report = instruments.report(fields[0].at_origin(), options.residual_tol)
    return Solution(fields, report, controls, decisions)


def _one_arm_coefficients(pay: Payoffs) -> HjbCoefficients:
    return HjbCoefficients(pay.arm_generators[0], pay.mean, pay.best)


def solve_optimal(
    problem: FiniteHorizonOptimal,
    grid: GridSpec,
    options: Optional[SolverOptions] = None,
) -> Solution:
    """Minimal Bayes risk: ``V_t + mu_plus + min(-mu + L V, 0) = 0``, V(t=1) = 0.

    One arm uses ``options.scheme``. Several arms solve
    ``V_t + mu_max + min_k(-mu_k + L_k V) = 0`` with the per-arm hybrid
    scheme. ``value_at_origin`` of the result is the minimal ex-ante risk.
    """
    options = options or SolverOptions()
    _finite_horizon(grid)
    pay = payoffs(problem, grid, options.quadrature_nodes)
    terminal = np.zeros(grid.size)

    if problem.K > 1:
        if options.scheme != "hybrid":
            log.warning(
                "Several arms are always solved with the hybrid scheme, not %s",
                options.scheme,
            )
        instruments = _Instruments("hybrid")
        armwise = ArmwiseSolver(grid, pay.arm_generators, grid.dt)
        gaps = pay.gaps()
        log.info("Solving %d-arm optimal problem on %d nodes", problem.K, grid.size)
        return _march(
            grid,
            terminal,
            lambda _i, old, _c: armwise.step(old, gaps),
            options,
            instruments,
        )

    coeffs = _one_arm_coefficients(pay)
    instruments = _Instruments(options.scheme)
    log.info(
        "Solving one-arm optimal problem (%s) on %dx%d nodes, %d steps",
        options.scheme,
        grid.nx,
        grid.nq,
        grid.nt,
    )
    if options.scheme == "explicit":
        check_cfl(grid, coeffs.generator, grid.dt)
        field = ValueField(grid, grid.nt, terminal)

        def explicit(_i: int, old: np.ndarray, _c: Optional[np.ndarray]) -> StepResult:
            return step_explicit(field.with_values(old, grid.nt), coeffs, grid.dt)

        return _march(grid, terminal, explicit, options, instruments)

    if options.scheme == "implicit":

        def implicit(
            _i: int, old: np.ndarray, control: Optional[np.ndarray]
        ) -> StepResult:
            return howard_implicit(
                coeffs.generator,
                old,
                grid.dt,
                coeffs.mean,
                coeffs.mu_plus,
                control,
                tol=options.tol,
                max_iter=options.max_iter,
            )

        return _march(grid, terminal, implicit, options, instruments)

    hybrid = HybridPullSolver(coeffs, grid.dt)
    return _march(
        grid, terminal, lambda _i, old, _c: hybrid.step(old), options, instruments
    )


def _policy_weights(policy: AbstractPolicy, grid: GridSpec, t: float) -> np.ndarray:
    """Pull share of every arm at every node, shape ``(size, K)``"""
    x, q = grid.flat_mesh()
    if grid.K == 1:
        share = np.asarray(policy.pull_probability(x[:, 0], q[:, 0], t), dtype=float)
        weights = np.broadcast_to(share, (grid.size,))[:, None]
    else:
        weights = np.asarray(policy.arm_probabilities(x, q, t), dtype=float)
    if np.any(weights < 0) or np.any(weights > 1):
        raise IllegalArgumentError(f"policy {policy.name} left [0, 1]")
    return np.array(weights)


def _check_eligible(policy: AbstractPolicy, options: SolverOptions) -> None:
    if policy.continuous:
        return
    if not options.allow_discontinuous:
        raise UnsupportedPdeEval(
            f"{policy.name} is discontinuous; estimate its risk by simulation"
        )
    log.warning("Evaluating discontinuous policy %s with the risk PDE", policy.name)


def _full_generators(
    problem: PolicyRisk, grid: GridSpec, pay: Payoffs
) -> List[sp.csr_matrix]:
    if grid.K == 1:
        return [pay.arm_generators[0]]
    return [
        generator_matrix(
            grid, Coefficients(pay.means[:, k], problem.arms.sigma[k] ** 2), arm=k
        )
        for k in range(grid.K)
    ]


class _LinearRiskStep:
    """Backward step of the linear risk PDE, reassembled only when the
    policy depends on time"""

    def __init__(
        self,
        policy: AbstractPolicy,
        grid: GridSpec,
        generators: List[sp.csr_matrix],
        pay: Payoffs,
        scheme: str,
    ) -> None:
        self._policy = policy
        self._grid = grid
        self._generators = generators
        self._pay = pay
        self._explicit = scheme == "explicit"
        self._assembled_at: Optional[float] = None

    def _assemble(self, t: float) -> None:
        grid = self._grid
        dt = grid.dt
        weights = _policy_weights(self._policy, grid, t)
        rate = sp.csr_matrix((grid.size, grid.size))
        for k, gen in enumerate(self._generators):
            rate = rate + sp.diags(weights[:, k]) @ gen
        self._rate = sp.csr_matrix(rate)
        self._source = self._pay.best - np.sum(weights * self._pay.means, axis=1)
        if grid.K == 1:
            self._control = weights[:, 0]
        else:
            self._control = np.argmax(weights, axis=1).astype(np.float64)
        if self._explicit:
            check_cfl(grid, self._rate, dt)
        else:
            self._matrix = sp.identity(grid.size, format="csr") - dt * self._rate
            self._solve = factorize(self._matrix)
        self._assembled_at = t

    def __call__(
        self, index: int, old: np.ndarray, _control: Optional[np.ndarray]
    ) -> StepResult:
        dt = self._grid.dt
        t = index * dt
        if self._assembled_at is None or self._policy.time_dependent:
            self._assemble(t)
        if self._explicit:
            new = old + dt * (self._source + self._rate @ old)
            return StepResult(new, self._control, 1, 0.0)
        rhs = old + dt * self._source
        new = self._solve(rhs)
        residual = float(np.max(np.abs(self._matrix @ new - rhs), initial=0.0))
        return StepResult(new, self._control, 1, residual)


def solve_policy_risk(
    problem: PolicyRisk,
    grid: GridSpec,
    options: Optional[SolverOptions] = None,
) -> Solution:
    """Bayes risk of a fixed policy: ``V_t + mu_plus + pi (-mu + L V) = 0``.

    The equation is linear, so no policy iteration is needed; implicit and
    hybrid schemes coincide. With several arms the policy's arm shares
    weight the arm generators and mu_max replaces mu_plus.

    Raises:
        UnsupportedPdeEval: the policy is discontinuous (UCB, tables)
    """
    options = options or SolverOptions()
    _finite_horizon(grid)
    policy = problem.policy
    _check_eligible(policy, options)
    if policy.arms != grid.K:
        raise IllegalArgumentError(
            f"policy chooses among {policy.arms} arm(s), grid has {grid.K}"
        )
    pay = payoffs(problem, grid, options.quadrature_nodes)
    generators = _full_generators(problem, grid, pay)
    scheme = "explicit" if options.scheme == "explicit" else "implicit"
    instruments = _Instruments(scheme)
    log.info("Evaluating %s by the risk PDE (%s)", policy.name, scheme)

    linear = _LinearRiskStep(policy, grid, generators, pay, scheme)
    return _march(grid, np.zeros(grid.size), linear, options, instruments)


def solve_batched(
    problem: Batched,
    grid: GridSpec,
    options: Optional[SolverOptions] = None,
) -> BatchedSolution:
    """Optimal batched (piecewise-constant) policy and its risk.

    One arm: ``V_{k+1} = min(S[V_k], V_k + h * mu_plus)`` where ``S`` solves
    the always-pull linear PDE over a batch of length ``h``. Several arms:
    the minimum over arms of each arm's batch solution. The argmin of every
    batch is recorded as the table decision.
    """
    options = options or SolverOptions()
    _finite_horizon(grid)
    steps = problem.steps_per_batch(grid.dt)
    h = problem.batch_dt
    pay = payoffs(problem, grid, options.quadrature_nodes)
    instruments = _Instruments("hybrid")
    log.info(
        "Solving batched problem: %d batches of %d steps", problem.batches, steps
    )

    if problem.K == 1:
        pull_solver = HybridPullSolver(_one_arm_coefficients(pay), grid.dt)

        def batch(old: np.ndarray) -> StepResult:
            pull = old
            residual = 0.0
            for _ in range(steps):
                pull, step_residual = pull_solver.pull_branch(pull)
                residual = max(residual, step_residual)
            stay = old + h * pay.best
            control = (pull <= stay).astype(np.float64)
            return StepResult(np.minimum(pull, stay), control, steps, residual)

    else:
        armwise = ArmwiseSolver(grid, pay.arm_generators, grid.dt)
        gaps = pay.gaps()

        def batch(old: np.ndarray) -> StepResult:
            branches = []
            residual = 0.0
            for arm in range(problem.K):
                value = old
                for _ in range(steps):
                    previous = value
                    value = armwise.branch(arm, previous, gaps[:, arm])
                    residual = max(
                        residual,
                        armwise.branch_residual(arm, value, previous, gaps[:, arm]),
                    )
                branches.append(value)
            stacked = np.stack(branches, axis=-1)
            control = np.argmin(stacked, axis=-1)
            new = np.take_along_axis(stacked, control[:, None], axis=-1)[:, 0]
            return StepResult(new, control.astype(np.float64), steps, residual)

    values = np.zeros(grid.size)
    fields = [ValueField(grid, grid.nt, values)]
    decisions: List[np.ndarray] = []
    for b in range(problem.batches - 1, -1, -1):
        result = batch(values)
        instruments.record(result)
        values = result.values
        fields.append(ValueField(grid, b * steps, values))
        decisions.append(result.control)
    fields.reverse()
    decisions.reverse()
    batch_times = [b * h for b in range(problem.batches)]
    table = PiecewiseConstantTable(grid, batch_times, np.stack(decisions))
    report = instruments.report(fields[0].at_origin(), options.residual_tol)
    return BatchedSolution(table, fields, report)


def _stationary_grid(grid: GridSpec, problem: Discounted) -> None:
    if problem.K != 1:
        raise UnsupportedK("discounted problems are solved for one arm")
    needed = problem.collapse_q()
    if grid.q_max < needed:
        raise IllegalArgumentError(
            f"q_max={grid.q_max:g} leaves the posterior uncollapsed; a discounted"
            f" solve needs q_max >= {needed:.4g}"
        )
    if not grid.stationary:
        log.info("Ignoring the time axis of the grid for a discounted solve")


def _stationary_report(
    scheme: str, result: StepResult, field: ValueField, options: SolverOptions
) -> SolveReport:
    instruments = _Instruments(scheme)
    instruments.record(result)
    return instruments.report(field.at_origin(), options.residual_tol)


def _stationary_field(grid: GridSpec, values: np.ndarray) -> ValueField:
    flat = GridSpec(grid.x_min, grid.x_max, grid.nx, grid.q_max, grid.nq, 0, grid.dt)
    return ValueField(flat, 0, values)


def solve_discounted(
    problem: Discounted,
    grid: GridSpec,
    options: Optional[SolverOptions] = None,
) -> Solution:
    """Stationary ``beta V = mu_plus + min(-mu + L V, 0)`` by policy iteration.

    There is no time loop and no terminal condition, so ``q_max`` must reach
    :meth:`Discounted.collapse_q`.

    Raises:
        IllegalArgumentError: ``grid.q_max`` is below the collapse bound
        UnsupportedK: the problem has more than one arm
    """
    options = options or SolverOptions()
    _stationary_grid(grid, problem)
    pay = payoffs(problem, grid)
    log.info("Solving discounted problem with beta=%g", problem.beta)
    result = howard_stationary(
        pay.arm_generators[0],
        problem.beta,
        pay.mean,
        pay.best,
        tol=options.tol,
        max_iter=options.max_iter,
    )
    field = _stationary_field(grid, result.values)
    report = _stationary_report("stationary", result, field, options)
    return Solution([field], report, [result.control], _compact(result.control)[None])


def solve_discounted_policy_risk(
    problem: Discounted,
    policy: AbstractPolicy,
    grid: GridSpec,
    options: Optional[SolverOptions] = None,
) -> Solution:
    """Discounted risk of a fixed stationary policy, one sparse solve:
    ``(beta I - pi L) V = mu_plus - pi mu``
    """
    options = options or SolverOptions()
    _stationary_grid(grid, problem)
    _check_eligible(policy, options)
    pay = payoffs(problem, grid)
    generator = pay.arm_generators[0]
    weights = _policy_weights(policy, grid, 0.0)[:, 0]
    identity = sp.identity(grid.size, format="csr")
    matrix = problem.beta * identity - sp.diags(weights) @ generator
    rhs = pay.best - weights * pay.mean
    values = factorize(matrix)(rhs)
    residual = float(np.max(np.abs(matrix @ values - rhs), initial=0.0))
    result = StepResult(values, weights, 1, residual)
    field = _stationary_field(grid, values)
    report = _stationary_report("stationary", result, field, options)
    return Solution([field], report, [weights], _compact(weights)[None])


def solve_best_arm(
    problem: BestArm,
    grid: GridSpec,
    options: Optional[SolverOptions] = None,
) -> Solution:
    """Best-arm identification: ``V_t + min_k L_k V = 0`` with terminal
    ``V(t=1) = mu_max - max_k mu_k``. The recorded control is the sampled arm.
    """
    options = options or SolverOptions()
    _finite_horizon(grid)
    pay = payoffs(problem, grid, options.quadrature_nodes)
    terminal = pay.best - pay.means.max(axis=1)
    # quadrature error can dip a hair below zero where the posteriors collapse
    terminal = np.maximum(terminal, 0.0)
    armwise = ArmwiseSolver(grid, pay.arm_generators, grid.dt)
    log.info("Solving %d-arm best-arm identification problem", problem.K)
    return _march(
        grid,
        terminal,
        lambda _i, old, _c: armwise.step(old),
        options,
        _Instruments("hybrid"),
    )


def policy_map(solution: Solution) -> List[np.ndarray]:
    """Control arrays of every stored slice, shaped like the grid"""
    grid = solution.grid
    return [np.asarray(control).reshape(grid.shape) for control in solution.controls]

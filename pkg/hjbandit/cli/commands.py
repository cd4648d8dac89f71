from __future__ import annotations

import logging
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from hjbandit.beliefs import ArmModel, GaussianPrior, PriorSpec
from hjbandit.errors import SchemaError
from hjbandit.hjb import (
    Batched,
    BatchedSolution,
    BestArm,
    Discounted,
    FiniteHorizonOptimal,
    PolicyRisk,
    Solution,
    policy_map,
    solve_batched,
    solve_best_arm,
    solve_discounted,
    solve_discounted_policy_risk,
    solve_optimal,
    solve_policy_risk,
)
from hjbandit.lattice import GridSpec
from hjbandit.minimax import Peaks, rescale_lfp, search_lfp
from hjbandit.policies import (
    UCB,
    AbstractPolicy,
    ConstantProb,
    MultiArmThompson,
    Thompson,
    extract_stopping_boundary,
)
from hjbandit.sim import (
    CenteredBernoulli,
    GaussianArms,
    GaussianShift,
    RewardFamily,
    bayes_risk_mc,
)
from hjbandit.structs import LfpState, SolveReport

from .config import ExperimentConfig
from .emit import ResultWriter

log = logging.getLogger(__name__)

__all__ = [
    "EVAL_POLICIES",
    "cmd_eval_policy",
    "cmd_minimax",
    "cmd_simulate",
    "cmd_solve",
]

EVAL_POLICIES = ("thompson", "ucb", "constant")

Summary = Dict[str, Any]


def _report(report: SolveReport) -> Dict[str, Any]:
    # wall time would break byte-identical reruns
    payload = report._asdict()
    payload.pop("wall_time")
    return payload


def _policy_rows(
    grid: GridSpec, times: Sequence[float], controls: Sequence[np.ndarray]
) -> Iterator[List[Any]]:
    xs, qs = grid.flat_mesh()
    for t, control in zip(times, controls):
        flat = np.asarray(control).reshape(-1)
        for i in range(grid.size):
            cells: List[Any] = [t]
            for arm in range(grid.K):
                cells += [xs[i, arm], qs[i, arm]]
            cells.append(flat[i])
            yield cells


def _policy_header(grid: GridSpec, time_column: str, control: str) -> List[str]:
    if grid.K == 1:
        return [time_column, "x", "q", control]
    axes = [f"{c}{k + 1}" for k in range(grid.K) for c in ("x", "q")]
    return [time_column, *axes, control]


def _write_fields(
    config: ExperimentConfig, out: ResultWriter, solution: Any, prefix: str = "value"
) -> None:
    if not config.output.value_slices:
        return
    for field in solution.fields:
        out.value_field(
            f"{prefix}_t{field.time_index:05d}",
            field,
            binary=config.output.binary,
            compresslevel=config.output.compresslevel,
        )


def _write_solution(
    config: ExperimentConfig, out: ResultWriter, solution: Solution, control: str
) -> None:
    _write_fields(config, out, solution)
    grid = solution.grid
    times = [field.t for field in solution.fields]
    controls = policy_map(solution)
    out.csv(
        "policy_map.csv",
        _policy_header(grid, "t", control),
        _policy_rows(grid, times, controls),
    )


def _solve_optimal(config: ExperimentConfig, out: ResultWriter) -> Summary:
    grid = config.grid_spec()
    problem = FiniteHorizonOptimal(tuple(config.prior_specs()), config.arm_model())
    solution = solve_optimal(problem, grid, config.solver_options())
    _write_solution(config, out, solution, "pull" if grid.K == 1 else "arm")
    if grid.K == 1:
        boundary = extract_stopping_boundary(solution)
        out.csv("stopping_boundary.csv", ["q", "t", "x"], boundary.rows())
    return {
        "value_at_origin": solution.value_at_origin,
        "solve": _report(solution.report),
    }


def _solve_batched(config: ExperimentConfig, out: ResultWriter) -> Summary:
    grid = config.grid_spec()
    problem = Batched(
        tuple(config.prior_specs()), config.arm_model(), batch_dt=config.batch_dt
    )
    solution: BatchedSolution = solve_batched(problem, grid, config.solver_options())
    _write_fields(config, out, solution)
    table = solution.table
    decision = "pull" if grid.K == 1 else "arm"
    out.csv(
        "policy_table.csv",
        _policy_header(grid, "batch_start", decision),
        _policy_rows(grid, list(table.batch_times), list(table.decisions)),
    )
    return {
        "value_at_origin": solution.value_at_origin,
        "batches": problem.batches,
        "batch_dt": problem.batch_dt,
        "solve": _report(solution.report),
    }


def _solve_best_arm(config: ExperimentConfig, out: ResultWriter) -> Summary:
    grid = config.grid_spec()
    problem = BestArm(tuple(config.prior_specs()), config.arm_model())
    solution = solve_best_arm(problem, grid, config.solver_options())
    _write_solution(config, out, solution, "arm")
    return {
        "value_at_origin": solution.value_at_origin,
        "solve": _report(solution.report),
    }


def _solve_discounted(config: ExperimentConfig, out: ResultWriter) -> Summary:
    arms = config.arm_model()
    problem = Discounted(tuple(config.prior_specs()), arms, beta=config.beta)
    grid = config.grid_spec(stationary=True, collapse_q=problem.collapse_q())
    options = config.solver_options()
    solution = solve_discounted(problem, grid, options)
    _write_solution(config, out, solution, "pull")
    thompson = Thompson(problem.prior, problem.sigma)
    risk = solve_discounted_policy_risk(problem, thompson, solution.grid, options)
    _write_fields(config, out, risk, prefix="thompson_value")
    return {
        "value_at_origin": solution.value_at_origin,
        "thompson_value": risk.value_at_origin,
        "beta": problem.beta,
        "solve": _report(solution.report),
    }


_SOLVERS = {
    "optimal": _solve_optimal,
    "batched": _solve_batched,
    "best-arm": _solve_best_arm,
    "discounted": _solve_discounted,
}


def cmd_solve(
    config: ExperimentConfig, out: ResultWriter, *, problem: Optional[str] = None
) -> Summary:
    """Run the PDE solver of ``problem`` (default: ``config.problem``) and
    write value slices, the policy map and ``report.json``"""
    problem = problem or config.problem
    log.info("Solving the %s problem", problem)
    summary = {"command": "solve", "problem": problem}
    summary.update(_SOLVERS[problem](config, out))
    summary["config_sha256"] = out.digest
    out.json("report.json", summary)
    return summary


def _one_arm(config: ExperimentConfig, command: str) -> None:
    if config.K != 1:
        raise SchemaError(f"{command} handles one-armed problems", "arms.count")


def _sweep_priors(config: ExperimentConfig) -> List[Tuple[float, PriorSpec]]:
    base = config.priors[0]
    if not config.sweep.nu:
        return [(base.sd, base.build())]
    if base.kind != "gaussian":
        raise SchemaError("sweeping nu needs a Gaussian prior", "sweep.nu")
    return [(nu, GaussianPrior(base.mean, nu)) for nu in config.sweep.nu]


def _build_policy(
    name: str, prior: PriorSpec, sigma: float, n: int, delta: float, p: float
) -> AbstractPolicy:
    if name == "thompson":
        return Thompson(prior, sigma)
    if name == "ucb":
        return UCB(n, delta)
    return ConstantProb(p)


def cmd_eval_policy(
    config: ExperimentConfig,
    out: ResultWriter,
    *,
    policy: str = "thompson",
    delta: float = 7.8,
    p: float = 0.5,
) -> Summary:
    """Risk of ``policy`` against the minimal Bayes risk over the ``sweep``
    grid of prior sds and reward sds.

    Continuous policies are evaluated with the risk PDE; the others by
    simulation at the longest configured horizon.
    """
    _one_arm(config, "eval-policy")
    sigmas = config.sweep.sigma or config.arm_model().sigma[:1]
    options = config.solver_options()
    mc = config.monte_carlo
    n = max(mc.horizons)
    rows = []
    for nu, prior in _sweep_priors(config):
        for sigma in sigmas:
            arms = ArmModel.single(sigma)
            grid = GridSpec.from_preset(
                config.grid.preset,
                sigma,
                x_width=config.grid.x_width,
                q_max=config.grid.q_bound(),
            )
            optimal = solve_optimal(FiniteHorizonOptimal(prior, arms), grid, options)
            rule = _build_policy(policy, prior, sigma, n, delta, p)
            if rule.continuous or options.allow_discontinuous:
                risk = solve_policy_risk(
                    PolicyRisk(prior, arms, policy=rule), grid, options
                ).value_at_origin
                method = "pde"
            else:
                log.warning(
                    "%s is discontinuous; estimating its risk by simulation", rule.name
                )
                risk = bayes_risk_mc(
                    rule,
                    prior,
                    GaussianShift(sigma),
                    n,
                    mc.reps,
                    config.seed,
                    realized=mc.realized,
                    **mc.runner_kwargs(),
                ).mean
                method = "mc"
            best = optimal.value_at_origin
            ratio = risk / best if best > 0 else float("nan")
            log.info(
                "nu=%g sigma=%g: optimal %.6g, %s %.6g",
                nu,
                sigma,
                best,
                rule.name,
                risk,
            )
            rows.append([nu, sigma, best, risk, ratio, method])
    out.csv(
        f"eval_{policy}.csv",
        ["nu", "sigma", "optimal", policy, "ratio", "method"],
        rows,
    )
    summary = {
        "command": "eval-policy",
        "policy": policy,
        "points": len(rows),
        "config_sha256": out.digest,
    }
    out.json("report.json", summary)
    return summary


def _family(config: ExperimentConfig) -> RewardFamily:
    arms = config.arm_model()
    if config.monte_carlo.reward == "bernoulli":
        _one_arm(config, "bernoulli rewards")
        if arms.sigma != (1.0,):
            raise SchemaError("bernoulli rewards have unit sd", "arms.sigma")
        return CenteredBernoulli()
    if arms.K == 1:
        return GaussianShift(arms.sigma[0])
    return GaussianArms(arms)


def cmd_simulate(
    config: ExperimentConfig, out: ResultWriter, *, ucb_delta: Optional[float] = None
) -> Summary:
    """Monte-Carlo Bayes risk of the optimal and Thompson policies (and UCB
    with ``ucb_delta``) at every configured horizon, next to the PDE value
    they approach"""
    grid = config.grid_spec()
    priors = tuple(config.prior_specs())
    arms = config.arm_model()
    options = config.solver_options()
    family = _family(config)
    mc = config.monte_carlo

    optimal = solve_optimal(FiniteHorizonOptimal(priors, arms), grid, options)
    thompson: AbstractPolicy
    if arms.K == 1:
        thompson = Thompson(priors[0], arms.sigma[0])
    else:
        thompson = MultiArmThompson(
            priors, arms, quadrature_nodes=options.quadrature_nodes
        )
    thompson_risk = solve_policy_risk(
        PolicyRisk(priors, arms, policy=thompson), grid, options
    )
    contenders: List[Tuple[str, Any, float]] = [
        ("optimal", optimal.optimal_policy(), optimal.value_at_origin),
        ("thompson", thompson, thompson_risk.value_at_origin),
    ]
    if ucb_delta is not None:
        _one_arm(config, "UCB simulation")
        contenders.append(("ucb", None, float("nan")))

    prior: Any = priors[0] if arms.K == 1 else list(priors)
    rows = []
    for n in mc.horizons:
        for label, policy, asymptote in contenders:
            if policy is None:
                assert ucb_delta is not None
                policy = UCB(n, ucb_delta)
            estimate = bayes_risk_mc(
                policy,
                prior,
                family,
                n,
                mc.reps,
                config.seed,
                realized=mc.realized,
                **mc.runner_kwargs(),
            )
            p25, p75 = estimate.iqr
            rows.append(
                [label, n, estimate.mean, estimate.stderr, p25, p75, asymptote]
            )
    out.csv(
        "bayes_risk.csv",
        ["policy", "n", "mean", "stderr", "p25", "p75", "asymptote"],
        rows,
    )
    summary = {
        "command": "simulate",
        "optimal_value": optimal.value_at_origin,
        "thompson_value": thompson_risk.value_at_origin,
        "reps": mc.reps,
        "horizons": list(mc.horizons),
        "config_sha256": out.digest,
    }
    out.json("report.json", summary)
    return summary


def _iteration_record(state: LfpState, peaks: Optional[Peaks]) -> Dict[str, Any]:
    record: Dict[str, Any] = state._asdict()
    record["peaks"] = peaks._asdict() if peaks is not None else None
    return record


def cmd_minimax(config: ExperimentConfig, out: ResultWriter) -> Summary:
    """Least-favourable prior search for unit reward sd, then the game value
    and the prior rescaled to the configured reward sd"""
    _one_arm(config, "minimax")
    settings = config.minimax_settings()
    initial = config.minimax.initial_state()
    records = [_iteration_record(initial, None)]

    def on_iteration(state: LfpState, peaks: Peaks) -> None:
        records.append(_iteration_record(state, peaks))

    if settings.max_iter == 0:
        log.info("max_iter is 0; reporting the initial prior unchanged")
    report, history = search_lfp(initial, settings, on_iteration=on_iteration)
    out.json_lines("lfp_iterations.jsonl", records)
    sigma = config.arm_model().sigma[0]
    summary = {
        "command": "minimax",
        "minimax_value": report.minimax_value,
        "thompson_value": report.thompson_value,
        "thompson_ratio": report.thompson_ratio,
        "equilibrium_gap": report.equilibrium_gap,
        "lfp": report.lfp._asdict(),
        "rescaled_lfp": rescale_lfp(report.lfp, sigma)._asdict(),
        "sigma": sigma,
        "iterations": len(history) - 1,
        "config_sha256": out.digest,
    }
    out.json("game_report.json", summary)
    return summary

from __future__ import annotations

import asyncio
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from hjbandit.beliefs import DiscretePrior, GaussianPrior
from hjbandit.errors import IllegalArgumentError
from hjbandit.metrics import Metrics, Sensor
from hjbandit.metrics.stats import Avg, Count, Percentile, Percentiles, Variance
from hjbandit.policies import UCB, AbstractPolicy
from hjbandit.structs import RiskProfile
from hjbandit.util import wait_for, worker_count

from .episode import EpisodeBatch, EpisodeSettings, Priors, simulate_batch
from .rewards import RewardFamily

log = logging.getLogger(__name__)

__all__ = [
    "RiskEstimate",
    "UcbTuning",
    "MonteCarloRunner",
    "bayes_risk_mc",
    "frequentist_profile",
    "tune_ucb",
]

# sd multiples covered by the percentile histogram
_TAIL_SDS = 8.0


class RiskEstimate(NamedTuple):
    mean: float
    "Average cumulative regret"

    stderr: float
    "Monte-Carlo standard error of ``mean``"

    iqr: Tuple[float, float]
    "25th and 75th percentile of the regret distribution"

    reps: int

    stats: Optional[Dict[str, Dict[str, float]]] = None
    "Snapshot of the regret sensor"


class UcbTuning(NamedTuple):
    best_delta: float
    deltas: List[float]
    risks: List[RiskEstimate]


def _mu_bound(prior: Priors) -> float:
    priors = list(prior) if isinstance(prior, (list, tuple)) else [prior]
    bound = 0.0
    for p in priors:
        if isinstance(p, GaussianPrior):
            bound = max(bound, abs(p.mean) + _TAIL_SDS * p.sd)
        elif isinstance(p, DiscretePrior):
            bound = max(bound, float(np.max(np.abs(p.support))))
    return bound


class _RegretStats:
    """Regret sensor of one estimate with handles on its stats"""

    def __init__(self, bound: float, buckets: int, tags: Dict[str, Any]) -> None:
        self.metrics = Metrics(tags=tags)
        self.sensor = self.metrics.sensor("regret")
        self.avg = Avg()
        self.variance = Variance()
        self.percentiles = Percentiles(
            buckets,
            max_val=bound,
            min_val=-bound,
            percentiles=[Percentile("regret-p25", 25), Percentile("regret-p75", 75)],
        )
        self.sensor.add(self.metrics.metric_name("regret-avg", "mc"), self.avg)
        self.sensor.add(
            self.metrics.metric_name("regret-variance", "mc"), self.variance
        )
        self.sensor.add(self.metrics.metric_name("replications", "mc"), Count())
        self.sensor.add_compound(self.percentiles)

    def estimate(self, reps: int) -> RiskEstimate:
        return RiskEstimate(
            mean=self.avg.measure(),
            stderr=self.variance.stderr(),
            iqr=(self.percentiles.value(0.25), self.percentiles.value(0.75)),
            reps=reps,
            stats=self.metrics.snapshot(),
        )


class MonteCarloRunner:
    """Runs replications of bandit episodes on a pool of worker threads.

    Replications are split into chunks of consecutive indices; each chunk is
    simulated in a worker and summarised into a private copy of the regret
    sensor. The copies are merged in chunk order, so estimates are
    bit-for-bit reproducible for a given seed whatever the worker count.

    Arguments:
        workers (int): worker threads. ``HJBANDIT_THREADS`` takes precedence.
            Default: ``min(8, cpu_count)``
        chunk_size (int): replications per task. Default: 256
        timeout (float): wall-clock budget of one estimate in seconds.
            Default: None (unbounded)
        percentile_buckets (int): bins of the regret percentile histogram.
            Default: 4000
    """

    def __init__(
        self,
        *,
        workers: Optional[int] = None,
        chunk_size: int = 256,
        timeout: Optional[float] = None,
        percentile_buckets: int = 4000,
    ) -> None:
        if chunk_size < 1:
            raise IllegalArgumentError("chunk_size must be at least 1")
        self._workers = worker_count(workers)
        self._chunk_size = chunk_size
        self._timeout = timeout
        self._buckets = percentile_buckets
        self._executor: Optional[ThreadPoolExecutor] = None

    async def __aenter__(self) -> MonteCarloRunner:
        return self

    async def __aexit__(self, *exc: Any) -> None:
        await self.close()

    async def close(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True, cancel_futures=True)
            self._executor = None

    def _pool(self) -> ThreadPoolExecutor:
        if self._executor is None:
            self._executor = ThreadPoolExecutor(
                max_workers=self._workers, thread_name_prefix="hjbandit-mc"
            )
        return self._executor

    def _chunks(self, reps: int) -> List[np.ndarray]:
        return [
            np.arange(start, min(start + self._chunk_size, reps))
            for start in range(0, reps, self._chunk_size)
        ]

    async def _estimate(
        self,
        reps: int,
        simulate: Callable[[np.ndarray], EpisodeBatch],
        bound: float,
        tags: Dict[str, Any],
    ) -> RiskEstimate:
        if reps < 1:
            raise IllegalArgumentError(f"need at least one replication, got {reps}")
        # summed regrets can land on the bound itself up to rounding
        padded = bound * (1.0 + 1e-6) + 1e-9
        stats = _RegretStats(padded, self._buckets, tags)
        template = stats.sensor

        def work(indices: np.ndarray) -> Sensor:
            local = template.detached_copy()
            local.record_many(simulate(indices).regret)
            return local

        loop = asyncio.get_running_loop()
        pool = self._pool()
        futures = [loop.run_in_executor(pool, work, c) for c in self._chunks(reps)]
        partials = await wait_for(asyncio.gather(*futures), self._timeout)
        for partial in partials:
            template.merge(partial)
        return stats.estimate(reps)

    @staticmethod
    def _regret_bound(
        mu_bound: float, settings: EpisodeSettings, sigma: float
    ) -> float:
        spread = settings.periods / settings.n
        bound = mu_bound * spread
        if settings.realized:
            bound += _TAIL_SDS * sigma * math.sqrt(spread)
        return bound

    async def bayes_risk(
        self,
        policy: AbstractPolicy,
        prior: Priors,
        family: RewardFamily,
        settings: EpisodeSettings,
        reps: int,
        seed: int,
    ) -> RiskEstimate:
        """Average regret with the local parameter drawn from ``prior``"""
        log.info(
            "Estimating Bayes risk of %s: n=%d, %d replications",
            policy.name,
            settings.n,
            reps,
        )

        def simulate(indices: np.ndarray) -> EpisodeBatch:
            return simulate_batch(policy, family, settings, seed, indices, prior=prior)

        bound = self._regret_bound(_mu_bound(prior), settings, family.sigma)
        return await self._estimate(
            reps, simulate, bound, {"policy": policy.name, "n": settings.n}
        )

    async def at_mu(
        self,
        policy: AbstractPolicy,
        mu: float,
        family: RewardFamily,
        settings: EpisodeSettings,
        reps: int,
        seed: int,
    ) -> RiskEstimate:
        """Frequentist risk at a fixed local parameter"""

        def simulate(indices: np.ndarray) -> EpisodeBatch:
            fixed = np.full(indices.size, mu)
            return simulate_batch(policy, family, settings, seed, indices, mu=fixed)

        bound = self._regret_bound(abs(mu), settings, family.sigma)
        return await self._estimate(
            reps, simulate, bound, {"policy": policy.name, "mu": mu}
        )

    async def frequentist_profile(
        self,
        policy: AbstractPolicy,
        mu_grid: Sequence[float],
        family: RewardFamily,
        settings: EpisodeSettings,
        reps: int,
        seed: int,
    ) -> RiskProfile:
        """Risk at every point of ``mu_grid``; all points share the seed so
        neighbouring points see common random numbers"""
        grid = [float(mu) for mu in mu_grid]
        if not grid:
            raise IllegalArgumentError("mu grid is empty")
        log.info(
            "Profiling %s over %d local parameters, %d replications each",
            policy.name,
            len(grid),
            reps,
        )
        estimates = await asyncio.gather(
            *(self.at_mu(policy, mu, family, settings, reps, seed) for mu in grid)
        )
        return RiskProfile(
            mu_grid=grid,
            mean_regret=[e.mean for e in estimates],
            iqr=[e.iqr for e in estimates],
            stderr=[e.stderr for e in estimates],
            reps=reps,
        )

    async def tune_ucb(
        self,
        deltas: Sequence[float],
        prior: Priors,
        family: RewardFamily,
        settings: EpisodeSettings,
        reps: int,
        seed: int,
    ) -> UcbTuning:
        """Grid search of UCB's exploration weight by Bayes risk"""
        grid = [float(d) for d in deltas]
        if not grid:
            raise IllegalArgumentError("delta grid is empty")
        risks = []
        for delta in grid:
            policy = UCB(settings.n, delta)
            risks.append(
                await self.bayes_risk(policy, prior, family, settings, reps, seed)
            )
        # first of equal minima
        best = int(np.argmin([r.mean for r in risks]))
        log.info("Best UCB delta %.3g with risk %.4g", grid[best], risks[best].mean)
        return UcbTuning(grid[best], grid, risks)


def _settings(
    n: int, beta: Optional[float], realized: bool, horizon_multiple: int
) -> EpisodeSettings:
    return EpisodeSettings(n, beta, horizon_multiple, realized)


def bayes_risk_mc(
    policy: AbstractPolicy,
    prior: Priors,
    family: RewardFamily,
    n: int,
    reps: int,
    seed: int,
    *,
    beta: Optional[float] = None,
    realized: bool = False,
    horizon_multiple: int = 10,
    **runner_kwargs: Any,
) -> RiskEstimate:
    """Blocking front end of :meth:`MonteCarloRunner.bayes_risk`"""
    settings = _settings(n, beta, realized, horizon_multiple)

    async def main() -> RiskEstimate:
        async with MonteCarloRunner(**runner_kwargs) as runner:
            return await runner.bayes_risk(policy, prior, family, settings, reps, seed)

    return asyncio.run(main())


def frequentist_profile(
    policy: AbstractPolicy,
    mu_grid: Sequence[float],
    family: RewardFamily,
    n: int,
    reps: int,
    seed: int,
    *,
    realized: bool = False,
    **runner_kwargs: Any,
) -> RiskProfile:
    """Blocking front end of :meth:`MonteCarloRunner.frequentist_profile`"""
    settings = _settings(n, None, realized, 10)

    async def main() -> RiskProfile:
        async with MonteCarloRunner(**runner_kwargs) as runner:
            return await runner.frequentist_profile(
                policy, mu_grid, family, settings, reps, seed
            )

    return asyncio.run(main())


def tune_ucb(
    deltas: Sequence[float],
    prior: Priors,
    family: RewardFamily,
    n: int,
    reps: int,
    seed: int,
    **runner_kwargs: Any,
) -> UcbTuning:
    """Blocking front end of :meth:`MonteCarloRunner.tune_ucb`"""
    settings = _settings(n, None, False, 10)

    async def main() -> UcbTuning:
        async with MonteCarloRunner(**runner_kwargs) as runner:
            return await runner.tune_ucb(deltas, prior, family, settings, reps, seed)

    return asyncio.run(main())

"""
Orchestrates the Monte Carlo loop.
Receives the trial configuration, runs every (placement, trial) pair and folds
the outcomes into per-placement statistics.
"""
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import structlog
from pydantic import BaseModel, Field
from tqdm import tqdm

from app.core.config import settings
from app.core.exceptions import ConfigurationError
from app.sim.config import TrialConfig
from app.sim.stats import mi_from_counts, wilson_interval
from app.sim.trial import TrialOutcome, run_trial, trial_rng

logger = structlog.get_logger(__name__)


class RouteStats(BaseModel):
    route: int
    attacked: bool
    errors: int
    ambiguous: int
    mean_distortion: float
    max_distortion: float
    budget: float
    mutual_information: float | None


class PlacementStats(BaseModel):
    placement: str
    trials: int
    block_errors: int
    error_rate: float = Field(ge=0.0, le=1.0)
    ci_low: float
    ci_high: float
    routes: list[RouteStats]
    audit_violations: int = 0


class TrialStats(BaseModel):
    seed: int
    n: int
    trials: int
    placements: list[PlacementStats]
    worst_placement: str
    worst_error_rate: float
    audit_violations: int
    traces: list[dict] = Field(default_factory=list)

    @property
    def audit_passed(self) -> bool:
        return self.audit_violations == 0

    def for_placement(self, label: str) -> PlacementStats:
        for stats in self.placements:
            if stats.placement == label:
                return stats
        raise KeyError(label)


class _Collector:
    """Order-insensitive fold of trial outcomes for one placement."""

    def __init__(self, config: TrialConfig, label: str):
        n_r = config.network.n_r
        self.label = label
        self.trials = 0
        self.block_errors = 0
        self.violations = 0
        self.errors = np.zeros(n_r, dtype=np.int64)
        self.ambiguous = np.zeros(n_r, dtype=np.int64)
        self.distortion_sum = np.zeros(n_r)
        self.distortion_max = np.zeros(n_r)
        self.attacked = [False] * n_r
        self.budgets = [r.distortion_limit for r in config.network.routes]
        self.joint: list[np.ndarray | None] = [None] * n_r

    def add(self, outcome: TrialOutcome) -> None:
        self.trials += 1
        self.block_errors += int(outcome.block_error)
        for r in outcome.routes:
            j = r.route
            self.attacked[j] = r.attacked
            self.errors[j] += int(r.error)
            self.ambiguous[j] += int(r.ambiguous)
            self.distortion_sum[j] += r.distortion
            self.distortion_max[j] = max(self.distortion_max[j], r.distortion)
            if not r.within_budget:
                self.violations += 1
            if r.joint is not None:
                counts = np.asarray(r.joint, dtype=np.int64)
                self.joint[j] = counts if self.joint[j] is None else self.joint[j] + counts

    def result(self) -> PlacementStats:
        low, high = wilson_interval(self.block_errors, self.trials)
        routes = [
            RouteStats(
                route=j,
                attacked=self.attacked[j],
                errors=int(self.errors[j]),
                ambiguous=int(self.ambiguous[j]),
                mean_distortion=float(self.distortion_sum[j] / self.trials),
                max_distortion=float(self.distortion_max[j]),
                budget=self.budgets[j],
                mutual_information=None if self.joint[j] is None else mi_from_counts(self.joint[j]),
            )
            for j in range(len(self.budgets))
        ]
        return PlacementStats(
            placement=self.label,
            trials=self.trials,
            block_errors=self.block_errors,
            error_rate=self.block_errors / self.trials,
            ci_low=low,
            ci_high=high,
            routes=routes,
            audit_violations=self.violations,
        )


class SimulationRunner:
    """Application service that runs the Monte Carlo loop."""

    def __init__(self, workers: int | None = None, progress: bool = True, min_trials: int | None = None):
        self._workers = workers or settings.mc_workers
        self._progress = progress
        self._min_trials = settings.min_trials if min_trials is None else min_trials

    def run(self, config: TrialConfig) -> TrialStats:
        """
        Execute every requested placement for ``config.trials`` trials.
        Results depend only on the master seed: each trial draws from its own stream.
        """
        if config.trials < self._min_trials:
            raise ConfigurationError(f"at least {self._min_trials} trials are needed, got {config.trials}")
        placements = config.resolved_placements()
        results = []
        traces: list[dict] = []
        executor = ThreadPoolExecutor(max_workers=self._workers) if self._workers > 1 else None
        try:
            with tqdm(total=len(placements) * config.trials, disable=not self._progress, desc="trials") as bar:
                for p_index, placement in enumerate(placements):
                    collector = _Collector(config, placement.label)

                    def one(t_index: int, p_index=p_index, placement=placement) -> TrialOutcome:
                        return run_trial(config, placement, trial_rng(config.seed, p_index, t_index))

                    outcomes = executor.map(one, range(config.trials)) if executor else map(one, range(config.trials))
                    for outcome in outcomes:
                        collector.add(outcome)
                        if config.keep_traces and len(traces) < settings.trace_limit:
                            traces.append(outcome.model_dump())
                        bar.update(1)
                    stats = collector.result()
                    logger.info(
                        "placement_done",
                        placement=stats.placement,
                        error_rate=stats.error_rate,
                        violations=stats.audit_violations,
                    )
                    results.append(stats)
        finally:
            if executor:
                executor.shutdown()

        worst = max(results, key=lambda s: s.error_rate)
        violations = sum(s.audit_violations for s in results)
        if violations:
            logger.error("distortion_audit_failed", violations=violations)
        return TrialStats(
            seed=config.seed,
            n=config.n,
            trials=config.trials,
            placements=results,
            worst_placement=worst.placement,
            worst_error_rate=worst.error_rate,
            audit_violations=violations,
            traces=traces,
        )


def monte_carlo(config: TrialConfig, **runner_options) -> TrialStats:
    return SimulationRunner(**runner_options).run(config)

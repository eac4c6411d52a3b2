"""Finite-population EDA used as the empirical check on the exact engine.

A population is an integer array of point indices into ``problem.fitness``.
Each generation selects ``parent_count`` parents and resamples ``N``
offspring from the parents' empirical distribution, so the population size
stays fixed and the update matches the infinite-population model as
``N`` grows.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import dynamics
from .errors import DomainError
from .fitness import LevelDistribution, Problem, d_of, uniform_level_distribution
from .selection import TRUNCATION, SelectionSchema
from .theory import tournament_exact_tau, truncation_exact_tau

RNG_NAME = f"numpy.random.Generator(PCG64), numpy {np.__version__}"
SEED_MOD = 2**64


@dataclass(frozen=True)
class SimConfig:
    population_size: int
    schema: SelectionSchema
    seed: int = 0
    replications: int = 1
    parent_count: int | None = None
    max_iters: int | None = None

    def __post_init__(self):
        n = self.population_size
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
            raise DomainError(f"population_size must be a positive integer, got {n!r}")
        if self.replications < 1:
            raise DomainError(f"replications must be >= 1, got {self.replications}")
        if not 0 <= self.seed < SEED_MOD:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.max_iters is not None and self.max_iters < 0:
            raise DomainError(f"max_iters must be >= 0, got {self.max_iters}")
        se = self.parents()
        if not 1 <= se <= n or (se == n and n > 1):
            raise DomainError(f"parent_count must satisfy 1 <= Se < N, got Se={se}, N={n}")

    def parents(self) -> int:
        """Number of parents ``Se``. Truncation uses ``round(mu * N)``; a
        tournament defaults to ``N // 2``. Clipped into ``[1, N - 1]``."""
        n = self.population_size
        if self.schema.kind == TRUNCATION:
            se = int(round(self.schema.mu * n))
            if self.parent_count is not None and self.parent_count != se:
                raise DomainError(
                    f"truncation fixes parent_count = round(mu*N) = {se}, got {self.parent_count}")
        elif self.parent_count is not None:
            return int(self.parent_count)
        else:
            se = n // 2
        return min(max(se, 1), max(n - 1, 1))

    def iteration_cap(self, problem: Problem) -> int:
        if self.max_iters is not None:
            return self.max_iters
        return default_max_iters(problem, self.schema)


def default_max_iters(problem: Problem, schema: SelectionSchema) -> int:
    """Ten times the infinite-population stopping time from a uniform start, plus 100."""
    d0 = float(d_of(uniform_level_distribution(problem), problem))
    if d0 == 0:
        return 100
    if schema.kind == TRUNCATION:
        tau = truncation_exact_tau(d0, schema.mu)[1]
    else:
        tau = tournament_exact_tau(d0)[1]
    return 10 * tau + 100


@dataclass
class TrialResult:
    stopping_time: int | None
    d_hat_trajectory: list[float]
    expected_fitness_trajectory: list[float]
    seed_used: int

    @property
    def converged(self) -> bool:
        return self.stopping_time is not None


def sample_initial(problem: Problem, n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(problem.size, size=n)


def select_parents(population: np.ndarray, fitness: np.ndarray, schema: SelectionSchema,
                   parent_count: int, rng: np.random.Generator) -> np.ndarray:
    """Pick ``parent_count`` parents from ``population``.

    ``fitness[i]`` is the fitness of ``population[i]``. Truncation keeps the
    fittest, breaking ties at the cut uniformly at random. Tournaments draw
    two contestants with replacement and keep the fitter, tossing a fair coin
    on ties.
    """
    size = population.shape[0]
    if schema.kind == TRUNCATION:
        perm = rng.permutation(size)
        order = perm[np.argsort(fitness[perm], kind="stable")[::-1]]
        return population[order[:parent_count]]
    pairs = rng.integers(size, size=(parent_count, 2))
    fa, fb = fitness[pairs[:, 0]], fitness[pairs[:, 1]]
    coin = rng.random(parent_count) < 0.5
    take_a = (fa > fb) | ((fa == fb) & coin)
    winners = np.where(take_a, pairs[:, 0], pairs[:, 1])
    return population[winners]


def resample(parents: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` i.i.d. draws from the parent multiset."""
    if parents.shape[0] == 0:
        raise DomainError("cannot resample from an empty parent set")
    return parents[rng.integers(parents.shape[0], size=n)]


def run_trial(problem: Problem, config: SimConfig, seed: int | None = None) -> TrialResult:
    seed = config.seed if seed is None else seed
    rng = np.random.default_rng(seed)
    n_pop = config.population_size
    se = config.parents()
    cap = config.iteration_cap(problem)
    pop = sample_initial(problem, n_pop, rng)
    d_hat, mean_fit = [], []
    stop = None
    for n in range(cap + 1):
        fit = problem.fitness[pop]
        nonopt = n_pop - int(np.count_nonzero(problem.is_optimal[pop]))
        d_hat.append(nonopt / n_pop)
        mean_fit.append(float(fit.mean()))
        if nonopt == 0:
            stop = n
            break
        if n == cap:
            break
        parents = select_parents(pop, fit, config.schema, se, rng)
        pop = resample(parents, n_pop, rng)
    return TrialResult(stop, d_hat, mean_fit, seed)


def _worker_count(jobs: int) -> int:
    cap = os.environ.get("EDA_LAB_THREADS")
    workers = os.cpu_count() or 1
    if cap:
        try:
            workers = min(workers, max(1, int(cap)))
        except ValueError:
            pass
    return max(1, min(workers, jobs))


@dataclass
class MonteCarloSummary:
    trials: list[TrialResult]
    engine_d: list[float]
    engine_tau: int | None
    mean_d_hat: list[float]
    mean_abs_error: list[float]
    rng: str = RNG_NAME
    stopping_times: list[int | None] = field(init=False)

    def __post_init__(self):
        self.stopping_times = [t.stopping_time for t in self.trials]

    @property
    def not_reached(self) -> int:
        return sum(t is None for t in self.stopping_times)

    def stopping_time_stats(self) -> dict:
        """Mean, median, sample std and quantiles over the converged trials."""
        done = np.array([t for t in self.stopping_times if t is not None], dtype=float)
        out = {"replications": len(self.trials), "converged": int(done.size),
               "not_reached": self.not_reached}
        if done.size == 0:
            out.update(mean=None, median=None, std=None, quantiles=None)
            return out
        qs = (0.0, 0.05, 0.25, 0.5, 0.75, 0.95, 1.0)
        out.update(
            mean=float(done.mean()),
            median=float(np.median(done)),
            std=float(done.std(ddof=1)) if done.size > 1 else 0.0,
            quantiles={f"q{int(q * 100):02d}": float(np.quantile(done, q)) for q in qs},
        )
        return out

    def median_stopping_time(self) -> float:
        """Median over all trials, counting a trial that never converged as +inf."""
        vals = [np.inf if t is None else t for t in self.stopping_times]
        return float(np.median(vals))


def _padded(seq: list[float], length: int) -> np.ndarray:
    # past the stopping time the population is all-optimal and stays so
    out = np.zeros(length)
    out[: len(seq)] = seq
    return out


def monte_carlo(problem: Problem, config: SimConfig,
                dist0: LevelDistribution | None = None,
                workers: int | None = None) -> MonteCarloSummary:
    """Run ``config.replications`` independent trials.

    Replication ``k`` uses seed ``(config.seed + k) mod 2**64``. Trials may run
    on a thread pool (``EDA_LAB_THREADS`` caps its size); results are
    collected by replication index, so the summary does not depend on
    completion order. ``dist0`` is the engine start to compare against and
    defaults to the uniform level distribution the simulator samples from.
    """
    seeds = [(config.seed + k) % SEED_MOD for k in range(config.replications)]
    workers = _worker_count(len(seeds)) if workers is None else workers
    if workers == 1:
        trials = [run_trial(problem, config, s) for s in seeds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            trials = list(pool.map(lambda s: run_trial(problem, config, s), seeds))

    dist0 = uniform_level_distribution(problem) if dist0 is None else dist0
    length = max(len(t.d_hat_trajectory) for t in trials)
    traj = dynamics.run(dist0, config.schema, problem, max_iters=max(length, 1))
    engine_d = [float(v) for v in traj.d[:length]]
    engine_d += [0.0] * (length - len(engine_d))

    d_hat = np.vstack([_padded(t.d_hat_trajectory, length) for t in trials])
    err = np.abs(d_hat - np.asarray(engine_d))
    mean_d_hat = d_hat.mean(axis=0)
    mean_err = err.mean(axis=0)
    return MonteCarloSummary(
        trials=trials,
        engine_d=engine_d,
        engine_tau=traj.tau,
        mean_d_hat=mean_d_hat.tolist(),
        mean_abs_error=mean_err.tolist(),
    )

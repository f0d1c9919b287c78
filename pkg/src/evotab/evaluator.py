"""Paired GA-vs-baseline experiments and their aggregation.

Every iteration draws one initial population and hands identical copies to
both optimizers. Seeds are derived per iteration from the master seed, so
the outcome does not depend on how iterations are scheduled across worker
processes.

Seed derivation, fixed so results can be recomputed independently::

    seed  = int.from_bytes(blake2b(pack("<4Q", master, trial, iteration, size),
                                   digest_size=8).digest(), "little")
    initial population stream: random.Random(seed)
    GA stream:                 random.Random(seed ^ 0x9E3779B97F4A7C15)
    baseline stream:           random.Random(seed ^ 0xD1B54A32D192ED03)

All inputs are reduced modulo 2**64 before packing.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import random
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Iterable

from .errors import EvotabError, IterationError, SpecError
from .ga import GaConfig, run_ga
from .population import Individual, RunOutcome
from .random_search import run_random
from .table import BenchmarkTable

SCHEMA_VERSION = 1

ALLOW_TARGETS = "allow_targets"
EXCLUDE_TARGETS = "exclude_targets"
INITIAL_POLICIES = (ALLOW_TARGETS, EXCLUDE_TARGETS)

GA = "ga"
RANDOM = "random"
ALGORITHMS = (GA, RANDOM)
ALGORITHM_TITLES = {GA: "Genetic Algorithm", RANDOM: "Baseline"}

DEFAULT_MASTER_SEED = 0

_MASK64 = (1 << 64) - 1
_GA_TAG = 0x9E3779B97F4A7C15
_RANDOM_TAG = 0xD1B54A32D192ED03


def derive_seed(master_seed: int, trial: int, iteration: int, population_size: int) -> int:
    """64-bit seed for one iteration; see the module docstring."""
    packed = struct.pack(
        "<4Q", *(int(v) & _MASK64 for v in (master_seed, trial, iteration, population_size))
    )
    return int.from_bytes(hashlib.blake2b(packed, digest_size=8).digest(), "little")


@dataclass(frozen=True)
class ExperimentConfig:
    population_sizes: tuple[int, ...] = (5, 10, 15, 20, 25)
    iterations_per_trial: int = 1000
    trials: int = 3
    target: float = 16.0
    ga_config: GaConfig = field(default_factory=GaConfig)
    master_seed: int = DEFAULT_MASTER_SEED
    initial_population_policy: str = ALLOW_TARGETS
    algorithms: tuple[str, ...] = ALGORITHMS
    max_draws: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "population_sizes", tuple(int(s) for s in self.population_sizes))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        # The GA always chases the experiment target.
        if self.ga_config.target != self.target:
            object.__setattr__(self, "ga_config", dataclasses.replace(self.ga_config, target=self.target))

    def validate(self, table: BenchmarkTable | None = None) -> None:
        if not self.population_sizes:
            raise SpecError("population_sizes must not be empty")
        if any(s < 2 for s in self.population_sizes):
            raise SpecError("every population size must be at least 2")
        if self.iterations_per_trial < 1:
            raise SpecError("iterations_per_trial must be at least 1")
        if self.trials < 1:
            raise SpecError("trials must be at least 1")
        if self.initial_population_policy not in INITIAL_POLICIES:
            raise SpecError(f"initial_population_policy must be one of {INITIAL_POLICIES}")
        if not self.algorithms or any(a not in ALGORITHMS for a in self.algorithms):
            raise SpecError(f"algorithms must be a non-empty subset of {ALGORITHMS}")
        if table is not None:
            available = len(table)
            if self.initial_population_policy == EXCLUDE_TARGETS:
                available -= table.count_at_least(self.target)
            too_big = [s for s in self.population_sizes if s > available]
            if too_big:
                raise SpecError(
                    f"population sizes {too_big} exceed the {available} rows available "
                    f"for initial populations"
                )

    def to_dict(self) -> dict[str, Any]:
        return {
            "population_sizes": list(self.population_sizes),
            "iterations_per_trial": self.iterations_per_trial,
            "trials": self.trials,
            "target": self.target,
            "mutation_rate": self.ga_config.mutation_rate,
            "invalid_offspring_policy": self.ga_config.invalid_offspring_policy,
            "max_cycles": self.ga_config.max_cycles,
            "master_seed": self.master_seed,
            "initial_population_policy": self.initial_population_policy,
            "algorithms": list(self.algorithms),
        }


def sample_initial_rows(
    table: BenchmarkTable, size: int, rng, policy: str = ALLOW_TARGETS, target: float = 16.0
) -> list[int]:
    """Row indices of a uniform sample of ``size`` distinct rows.

    Under ``exclude_targets`` rows at or above ``target`` are never drawn.
    """
    if policy == EXCLUDE_TARGETS:
        candidates = [i for i in range(len(table)) if table.fitness[i] < target]
    else:
        candidates = list(range(len(table)))
    if size > len(candidates):
        raise SpecError(f"cannot draw {size} initial individuals from {len(candidates)} rows")
    return rng.sample(candidates, size)


def sample_initial(
    table: BenchmarkTable, size: int, rng, policy: str = ALLOW_TARGETS, target: float = 16.0
) -> list[Individual]:
    return [table.individual(i) for i in sample_initial_rows(table, size, rng, policy, target)]


def paired_iteration(
    table: BenchmarkTable, population_size: int, config: ExperimentConfig, seed: int
) -> tuple[RunOutcome | None, RunOutcome | None]:
    """Run both optimizers from one shared initial population.

    Returns ``(ga, baseline)``; an entry is ``None`` when that algorithm is
    not in ``config.algorithms``. Errors from either run propagate.
    """
    initial = sample_initial(
        table, population_size, random.Random(seed), config.initial_population_policy, config.target
    )
    ga = _run_algorithm(table, GA, initial, config, seed) if GA in config.algorithms else None
    baseline = (
        _run_algorithm(table, RANDOM, initial, config, seed) if RANDOM in config.algorithms else None
    )
    return ga, baseline


def _run_algorithm(table, algo, initial, config, seed) -> RunOutcome:
    # Each algorithm gets its own copy of the members and its own stream.
    if algo == GA:
        return run_ga(table, list(initial), config.ga_config, random.Random(seed ^ _GA_TAG))
    return run_random(
        table, list(initial), config.target, random.Random(seed ^ _RANDOM_TAG), config.max_draws
    )


_worker_state: dict[str, Any] = {}


def _init_worker(table: BenchmarkTable, config: ExperimentConfig) -> None:
    _worker_state["table"] = table
    _worker_state["config"] = config


def _run_task(task: tuple[int, int, int]) -> dict[str, Any]:
    size, trial, iteration = task
    table = _worker_state["table"]
    config = _worker_state["config"]
    seed = derive_seed(config.master_seed, trial, iteration, size)
    record: dict[str, Any] = {
        "population_size": size,
        "trial": trial,
        "iteration": iteration,
        "seed": seed,
    }
    rows = sample_initial_rows(
        table, size, random.Random(seed), config.initial_population_policy, config.target
    )
    record["initial_rows"] = rows
    initial = [table.individual(i) for i in rows]
    for algo in config.algorithms:
        try:
            out = _run_algorithm(table, algo, initial, config, seed)
        except EvotabError as exc:
            record["error"] = {"algorithm": algo, "message": f"{type(exc).__name__}: {exc}"}
            return record
        record[algo] = out.result_value
        record[f"{algo}_additions"] = out.additions
    return record


def iteration_tasks(config: ExperimentConfig) -> list[tuple[int, int, int]]:
    """``(population_size, trial, iteration)`` in canonical order (trials count from 1)."""
    return [
        (size, trial, it)
        for size in config.population_sizes
        for trial in range(1, config.trials + 1)
        for it in range(config.iterations_per_trial)
    ]


def run_iterations(
    table: BenchmarkTable, config: ExperimentConfig, workers: int = 1
) -> list[dict[str, Any]]:
    """Per-iteration records in canonical order.

    Raises:
        IterationError: for the first failing iteration in canonical order.
    """
    config.validate(table)
    tasks = iteration_tasks(config)
    if workers <= 1:
        _init_worker(table, config)
        records = [_run_task(t) for t in tasks]
    else:
        chunk = max(1, len(tasks) // (workers * 8))
        with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(table, config)) as ex:
            records = list(ex.map(_run_task, tasks, chunksize=chunk))
    for rec in records:
        if "error" in rec:
            err = rec["error"]
            raise IterationError(
                err["algorithm"], rec["population_size"], rec["trial"], rec["iteration"], err["message"]
            )
    return records


def _mean(values: Iterable[float]) -> float:
    values = list(values)
    return math.fsum(values) / len(values)


def _std_error(values: list[float]) -> float:
    n = len(values)
    if n < 2:
        return 0.0
    mu = _mean(values)
    var = math.fsum((v - mu) ** 2 for v in values) / (n - 1)
    return math.sqrt(var / n)


def winner_label(difference: float) -> str:
    if difference > 0:
        return ALGORITHM_TITLES[GA]
    if difference < 0:
        return ALGORITHM_TITLES[RANDOM]
    return "Tie"


@dataclass
class ExperimentSummary:
    """Per-size aggregates for both algorithms.

    ``differences[size]`` is baseline mean minus GA mean, so a positive value
    means the GA needed fewer individuals.
    """

    config: dict[str, Any]
    population_sizes: list[int]
    algorithms: list[str]
    trial_means: dict[str, dict[int, list[float]]]
    grand_means: dict[str, dict[int, float]]
    std_errors: dict[str, dict[int, float]]
    differences: dict[int, float] = field(default_factory=dict)
    winners: dict[int, str] = field(default_factory=dict)
    overall_difference: float | None = None

    def to_dict(self) -> dict[str, Any]:
        def keyed(d):
            return {str(k): v for k, v in d.items()}

        return {
            "schema_version": SCHEMA_VERSION,
            "config": self.config,
            "population_sizes": self.population_sizes,
            "algorithms": self.algorithms,
            "trial_means": {a: keyed(v) for a, v in self.trial_means.items()},
            "grand_means": {a: keyed(v) for a, v in self.grand_means.items()},
            "std_errors": {a: keyed(v) for a, v in self.std_errors.items()},
            "differences": keyed(self.differences),
            "winners": keyed(self.winners),
            "overall_difference": self.overall_difference,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExperimentSummary":
        def unkeyed(d):
            return {int(k): v for k, v in d.items()}

        return cls(
            config=data["config"],
            population_sizes=data["population_sizes"],
            algorithms=data["algorithms"],
            trial_means={a: unkeyed(v) for a, v in data["trial_means"].items()},
            grand_means={a: unkeyed(v) for a, v in data["grand_means"].items()},
            std_errors={a: unkeyed(v) for a, v in data["std_errors"].items()},
            differences=unkeyed(data["differences"]),
            winners=unkeyed(data["winners"]),
            overall_difference=data["overall_difference"],
        )


def summarize(records: list[dict[str, Any]], config: ExperimentConfig) -> ExperimentSummary:
    """Aggregate per-iteration records; pure, so it can be rerun from ``results.jsonl``."""
    sizes = list(config.population_sizes)
    algos = [a for a in ALGORITHMS if a in config.algorithms]
    trial_means: dict[str, dict[int, list[float]]] = {a: {} for a in algos}
    grand: dict[str, dict[int, float]] = {a: {} for a in algos}
    errors: dict[str, dict[int, float]] = {a: {} for a in algos}

    for algo in algos:
        for size in sizes:
            per_trial = []
            pooled = []
            for trial in range(1, config.trials + 1):
                vals = [
                    r[algo] for r in records if r["population_size"] == size and r["trial"] == trial
                ]
                if not vals:
                    raise SpecError(f"no records for {algo} size={size} trial={trial}")
                per_trial.append(_mean(vals))
                pooled.extend(vals)
            trial_means[algo][size] = per_trial
            grand[algo][size] = _mean(per_trial)
            errors[algo][size] = _std_error(pooled)

    summary = ExperimentSummary(config.to_dict(), sizes, algos, trial_means, grand, errors)
    if GA in algos and RANDOM in algos:
        for size in sizes:
            diff = grand[RANDOM][size] - grand[GA][size]
            summary.differences[size] = diff
            summary.winners[size] = winner_label(diff)
        summary.overall_difference = _mean(summary.differences.values())
    return summary


def write_results(records: list[dict[str, Any]], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps({"schema_version": SCHEMA_VERSION, **rec}, sort_keys=True) + "\n")


def read_results(path) -> list[dict[str, Any]]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def run_experiment(
    table: BenchmarkTable,
    config: ExperimentConfig | None = None,
    workers: int = 1,
    results_path=None,
) -> ExperimentSummary:
    """Run every (size, trial, iteration) pair and aggregate.

    When ``results_path`` is given the per-iteration records are written
    there as JSON lines before aggregation.
    """
    config = config or ExperimentConfig()
    records = run_iterations(table, config, workers)
    if results_path is not None:
        write_results(records, results_path)
    return summarize(records, config)

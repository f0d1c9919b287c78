"""Steady-state genetic algorithm and random-search baseline for tabular
hyperparameter-optimization benchmarks."""

from .errors import (
    EvotabError,
    IterationError,
    NonTerminationError,
    SelectionError,
    SpecError,
    TableError,
    TableParseError,
    TableValidationError,
)
from .evaluator import ExperimentConfig, ExperimentSummary, derive_seed, paired_iteration, run_experiment
from .ga import GaConfig, crossover, roulette_ranges, run_ga, select_parent, select_parents
from .population import Individual, Population, RunOutcome
from .random_search import run_random
from .table import (
    NMT_SCHEMA,
    BenchmarkTable,
    GeneSpec,
    SyntheticSpec,
    generate_synthetic,
    load_table,
    lookup_fitness,
    save_table,
)

__version__ = "0.1.0"

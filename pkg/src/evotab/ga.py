"""Steady-state genetic algorithm over a benchmark table.

One breeding cycle: roulette selection of two distinct parents, one-point
crossover into a placeholder offspring, an optional mutation of a current
member, a validity check of the offspring, then replacement of the weakest
member. The run stops as soon as the population holds an individual at or
above the target fitness, whether it arrived by addition or by mutation; its
score is the number of individuals added plus the initial population size.
"""

from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import DuplicateChromosomeError, NonTerminationError, SelectionError, SpecError
from .population import Chromosome, Individual, Population, RunOutcome
from .table import BenchmarkTable, random_pool_value

ASSIGN_ZERO = "assign_zero"
REJECT_RETRY = "reject_retry"
INVALID_POLICIES = (ASSIGN_ZERO, REJECT_RETRY)

PARENT_RESAMPLE_LIMIT = 64


@dataclass(frozen=True)
class GaConfig:
    """GA parameters.

    ``invalid_offspring_policy`` decides what happens to an offspring whose
    combination is absent from the table: ``assign_zero`` adds it with
    fitness 0 (it is then the weakest member and is replaced next),
    ``reject_retry`` discards it and breeds again.
    """

    mutation_rate: float = 0.125
    target: float = 16.0
    invalid_offspring_policy: str = ASSIGN_ZERO
    max_cycles: int = 10_000

    def __post_init__(self):
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise SpecError(f"mutation_rate must be in [0, 1], got {self.mutation_rate}")
        if not self.target > 0:
            raise SpecError(f"target must be positive, got {self.target}")
        if self.invalid_offspring_policy not in INVALID_POLICIES:
            raise SpecError(
                f"invalid_offspring_policy must be one of {INVALID_POLICIES}, "
                f"got {self.invalid_offspring_policy!r}"
            )
        if self.max_cycles < 1:
            raise SpecError(f"max_cycles must be >= 1, got {self.max_cycles}")


@dataclass
class GaState:
    """Mutable state of one GA run.

    ``history`` holds every chromosome that entered the population through
    initialization or addition; under ``reject_retry`` it also holds
    discarded absent offspring so they are never bred twice.
    """

    population: Population
    history: set[Chromosome]
    placeholder: list[float]
    additions: int = 0
    cycles: int = 0

    @classmethod
    def start(cls, population: Population) -> "GaState":
        n_genes = len(population[0].chromosome)
        return cls(population, set(population.chromosomes), [0.0] * n_genes)


@dataclass
class MutationReport:
    fired: bool
    member: int | None = None
    gene: int | None = None
    old_value: float | None = None
    new_value: float | None = None
    applied: bool = False
    reason: str | None = None
    fitness: float | None = None

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}


def roulette_ranges(population, scale: float | None = None) -> list[float]:
    """Cumulative upper bounds of the roulette wheel.

    With ``scale=None`` the bounds are in fitness units and the last equals
    the total fitness; pass ``scale=100`` for percentages. Fitnesses
    ``[10, 25, 15, 5, 45]`` give ``[10, 35, 50, 55, 100]`` on either scale.

    Raises:
        SelectionError: the total fitness is not positive.
    """
    fits = population.fitnesses if isinstance(population, Population) else list(population)
    total = sum(fits)
    if not total > 0:
        raise SelectionError("total fitness is zero; nothing can be selected")
    if scale is None:
        scale = total
    # Clamp so rounding cannot push an inner bound past the last one.
    bounds = [min(c * scale / total, scale) for c in itertools.accumulate(fits)]
    bounds[-1] = float(scale)
    return bounds


def _spin(fits: Sequence[float], rng) -> int:
    bounds = roulette_ranges(fits)
    u = rng.random() * bounds[-1]
    i = bisect.bisect_right(bounds, u)
    if i >= len(fits):
        # u rounded up to the total; fall back to the last selectable member
        i = max(j for j, f in enumerate(fits) if f > 0)
    return i


def select_parent(population: Population, rng) -> Individual:
    """Fitness-proportional draw of one member.

    A uniform ``u`` in ``[0, total)`` picks member ``i`` when
    ``bound[i-1] <= u < bound[i]``, so zero-fitness members are never picked.
    """
    return population[_spin(population.fitnesses, rng)]


def select_parent_indices(population: Population, rng) -> tuple[int, int]:
    """Indices of two distinct roulette-selected members, fitter first."""
    fits = population.fitnesses
    if sum(1 for f in fits if f > 0) < 2:
        raise SelectionError("need at least two members with positive fitness")
    first = _spin(fits, rng)
    for _ in range(PARENT_RESAMPLE_LIMIT):
        second = _spin(fits, rng)
        if second != first:
            break
    else:
        others = [i for i in range(len(fits)) if i != first]
        second = min(others, key=lambda i: (-fits[i], i))
    a, b = sorted((first, second), key=lambda i: (-fits[i], i))
    return a, b


def select_parents(population: Population, rng) -> tuple[Individual, Individual]:
    i, j = select_parent_indices(population, rng)
    return population[i], population[j]


def crossover_point(n_genes: int, rng) -> int:
    """Cut position in ``1..n_genes-1`` so both parents contribute."""
    return rng.randrange(1, n_genes)


def crossover(parent1, parent2, rng=None, point: int | None = None) -> Chromosome:
    """One-point crossover: genes before ``point`` from ``parent1``, the rest from ``parent2``."""
    c1 = parent1.chromosome if isinstance(parent1, Individual) else tuple(parent1)
    c2 = parent2.chromosome if isinstance(parent2, Individual) else tuple(parent2)
    if point is None:
        point = crossover_point(len(c1), rng)
    return tuple(c1[:point]) + tuple(c2[point:])


def evaluate_offspring(table: BenchmarkTable, chromosome: Sequence[float]) -> Individual:
    chromosome = tuple(float(v) for v in chromosome)
    return Individual(chromosome, table.lookup(chromosome))


def mutate(state: GaState, table: BenchmarkTable, config: GaConfig, rng) -> MutationReport:
    """Possibly mutate one gene of one non-weakest member.

    Fires with probability ``config.mutation_rate``. The chosen gene gets a
    uniform value from its pool and the member is re-scored. A mutation
    that would produce a combination absent from the table, or a copy of
    another current member, is dropped and the member is left as it was.
    """
    pop = state.population
    if not rng.random() < config.mutation_rate:
        return MutationReport(fired=False)
    weakest = pop.weakest_index
    candidates = [i for i in range(len(pop)) if i != weakest]
    member = candidates[rng.randrange(len(candidates))]
    gene = rng.randrange(table.n_genes)
    new_value = random_pool_value(table, gene, rng)
    old = pop[member].chromosome
    report = MutationReport(True, member, gene, old[gene], new_value)

    if new_value == old[gene]:
        report.reason = "unchanged"
        return report
    mutated = old[:gene] + (new_value,) + old[gene + 1:]
    fitness = table.lookup(mutated)
    if fitness == 0:
        report.reason = "absent"
    elif pop.contains(mutated):
        report.reason = "duplicate"
    else:
        pop[member] = Individual(mutated, fitness)
        report.applied = True
        report.fitness = fitness
    return report


def replace_weakest(population: Population, offspring: Individual) -> int:
    """Swap the weakest member (lowest index on ties) for ``offspring``.

    Returns the replaced index.

    Raises:
        DuplicateChromosomeError: ``offspring`` is already a member.
    """
    if population.contains(offspring.chromosome):
        raise DuplicateChromosomeError(f"{offspring.chromosome} is already in the population")
    index = population.weakest_index
    population[index] = offspring
    return index


def _as_population(initial) -> Population:
    pop = initial.copy() if isinstance(initial, Population) else Population(initial)
    if len(set(pop.chromosomes)) != len(pop):
        raise SpecError("initial population has duplicate chromosomes")
    return pop


def run_ga(
    table: BenchmarkTable,
    initial: Population | Iterable[Individual],
    config: GaConfig | None = None,
    rng=None,
) -> RunOutcome:
    """Run the GA until the population holds a target individual.

    ``initial`` is copied, never modified. Every breeding cycle appends one
    ``breed`` event to the audit trail whose ``outcome`` is ``add``,
    ``reject`` or ``stop`` (an applied mutation reached the target).

    Raises:
        NonTerminationError: ``config.max_cycles`` cycles without success.
        SelectionError: fewer than two members with positive fitness.
    """
    config = config or GaConfig()
    pop = _as_population(initial)
    outcome = RunOutcome("ga", pop.chromosomes)
    outcome.best_fitness = pop.fittest.fitness
    if pop.fittest.fitness >= config.target:
        outcome.terminated = True
        return outcome

    state = GaState.start(pop)
    n_genes = table.n_genes
    while state.cycles < config.max_cycles:
        state.cycles += 1
        try:
            i1, i2 = select_parent_indices(pop, rng)
        except SelectionError as exc:
            exc.outcome = outcome
            raise
        p1, p2 = pop[i1], pop[i2]
        point = crossover_point(n_genes, rng)
        state.placeholder[:] = crossover(p1, p2, point=point)
        child = tuple(state.placeholder)
        mutation = mutate(state, table, config, rng)

        event = {
            "event": "breed",
            "cycle": state.cycles,
            "parents": [i1, i2],
            "parent_chromosomes": [p1.chromosome, p2.chromosome],
            "crossover_point": point,
            "offspring": child,
            "mutation": mutation.to_dict() if mutation.fired else None,
        }
        outcome.audit.append(event)

        if mutation.applied and mutation.fitness >= config.target:
            event["outcome"] = "stop"
            event["reason"] = "mutation reached target"
            outcome.best_fitness = mutation.fitness
            outcome.terminated = True
            return outcome
        if child in state.history or pop.contains(child):
            event["outcome"] = "reject"
            event["reason"] = "duplicate"
            continue
        fitness = table.lookup(child)
        if fitness == 0 and config.invalid_offspring_policy == REJECT_RETRY:
            state.history.add(child)
            event["outcome"] = "reject"
            event["reason"] = "absent"
            continue

        removed = pop.weakest
        index = replace_weakest(pop, Individual(child, fitness))
        state.history.add(child)
        state.additions += 1
        outcome.additions = state.additions
        event.update(outcome="add", fitness=fitness, replaced=index, removed_fitness=removed.fitness)

        best = pop.fittest.fitness
        outcome.best_fitness = best
        if best >= config.target:
            outcome.terminated = True
            return outcome

    raise NonTerminationError(
        f"GA did not reach target {config.target} within {config.max_cycles} cycles", outcome
    )

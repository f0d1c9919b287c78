"""Random-search baseline: draw uniform table rows until one hits the target."""

from __future__ import annotations

from typing import Iterable

from .errors import NonTerminationError, SpecError
from .population import Individual, Population, RunOutcome
from .table import BenchmarkTable, sample_index


def run_random(
    table: BenchmarkTable,
    initial: Population | Iterable[Individual],
    target: float = 16.0,
    rng=None,
    max_draws: int | None = None,
) -> RunOutcome:
    """Add uniformly drawn rows to the population until one meets ``target``.

    Draws whose chromosome is already in the population are discarded and
    not counted. The population only grows; there is no replacement step.
    ``max_draws`` (default ``100 * len(table)``) bounds the total number of
    draws, rejected ones included.

    Raises:
        NonTerminationError: the draw budget ran out.
    """
    members = list(initial)
    seen = {m.chromosome for m in members}
    if len(seen) != len(members):
        raise SpecError("initial population has duplicate chromosomes")
    outcome = RunOutcome("random", [m.chromosome for m in members])
    outcome.best_fitness = max(m.fitness for m in members)
    if outcome.best_fitness >= target:
        outcome.terminated = True
        return outcome

    if max_draws is None:
        max_draws = 100 * len(table)
    for draw in range(1, max_draws + 1):
        index = sample_index(table, rng)
        outcome.audit.append({"event": "draw", "draw": draw, "index": index})
        individual = table.individual(index)
        if individual.chromosome in seen:
            outcome.audit.append({"event": "reject", "draw": draw, "index": index, "reason": "duplicate"})
            continue
        members.append(individual)
        seen.add(individual.chromosome)
        outcome.additions += 1
        outcome.audit.append(
            {
                "event": "add",
                "draw": draw,
                "index": index,
                "chromosome": individual.chromosome,
                "fitness": individual.fitness,
            }
        )
        if individual.fitness > outcome.best_fitness:
            outcome.best_fitness = individual.fitness
        if individual.fitness >= target:
            outcome.terminated = True
            return outcome

    raise NonTerminationError(f"random search did not reach target {target} in {max_draws} draws", outcome)

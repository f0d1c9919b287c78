"""Individuals, populations and run outcomes shared by both optimizers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable

Chromosome = tuple[float, ...]


@dataclass(frozen=True)
class Individual:
    """A chromosome with its fitness (BLEU score).

    A fitness of 0 marks a combination that is not present in the benchmark
    table.
    """

    chromosome: Chromosome
    fitness: float

    def __post_init__(self):
        if self.fitness < 0:
            raise ValueError(f"fitness must be non-negative, got {self.fitness}")


class Population:
    """Ordered list of individuals with fittest / second-fittest tracking.

    Ties on fitness always resolve to the lowest member index. The population
    is mutated in place by the GA, so ``fittest`` and ``second_fittest`` are
    recomputed on access rather than cached.
    """

    def __init__(self, members: Iterable[Individual]):
        self.members: list[Individual] = list(members)
        if not self.members:
            raise ValueError("population must have at least one member")

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, index: int) -> Individual:
        return self.members[index]

    def __setitem__(self, index: int, individual: Individual) -> None:
        self.members[index] = individual

    def copy(self) -> "Population":
        # Individuals are frozen, a shallow list copy is a deep copy.
        return Population(self.members)

    @property
    def fitnesses(self) -> list[float]:
        return [m.fitness for m in self.members]

    @property
    def chromosomes(self) -> list[Chromosome]:
        return [m.chromosome for m in self.members]

    def ranked_indices(self) -> list[int]:
        """Member indices from fittest to weakest, ties by lowest index."""
        return sorted(range(len(self.members)), key=lambda i: (-self.members[i].fitness, i))

    @property
    def fittest_index(self) -> int:
        return self.ranked_indices()[0]

    @property
    def fittest(self) -> Individual:
        return self.members[self.fittest_index]

    @property
    def second_fittest(self) -> Individual | None:
        if len(self.members) < 2:
            return None
        return self.members[self.ranked_indices()[1]]

    @property
    def weakest_index(self) -> int:
        fits = self.fitnesses
        return fits.index(min(fits))

    @property
    def weakest(self) -> Individual:
        return self.members[self.weakest_index]

    def contains(self, chromosome: Chromosome) -> bool:
        return any(m.chromosome == chromosome for m in self.members)

    def __repr__(self) -> str:
        return f"Population({self.fitnesses!r})"


@dataclass
class RunOutcome:
    """Result of one optimization iteration.

    ``result_value`` is the individuals-added metric: the number of
    individuals added before the target was reached plus the initial
    population size. ``audit`` holds JSON-ready event dicts.
    """

    algorithm: str
    initial: list[Chromosome]
    additions: int = 0
    terminated: bool = False
    audit: list[dict[str, Any]] = field(default_factory=list)
    best_fitness: float = 0.0

    @property
    def initial_size(self) -> int:
        return len(self.initial)

    @property
    def result_value(self) -> int:
        return self.additions + len(self.initial)

    def to_dict(self) -> dict[str, Any]:
        return {
            "algorithm": self.algorithm,
            "initial": [list(c) for c in self.initial],
            "additions": self.additions,
            "result_value": self.result_value,
            "terminated": self.terminated,
            "best_fitness": self.best_fitness,
            "events": self.audit,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunOutcome":
        return cls(
            algorithm=data["algorithm"],
            initial=[tuple(c) for c in data["initial"]],
            additions=data["additions"],
            terminated=data["terminated"],
            audit=list(data["events"]),
            best_fitness=data.get("best_fitness", 0.0),
        )

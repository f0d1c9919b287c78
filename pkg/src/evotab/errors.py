"""Exception types raised by evotab."""

from __future__ import annotations


class EvotabError(Exception):
    """Base class for all package errors."""


class TableError(EvotabError):
    """A benchmark table could not be built.

    ``problems`` lists every issue found, each a human readable string that
    names the offending line when one is known.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))

    def __reduce__(self):
        return type(self), (self.problems,)


class TableParseError(TableError):
    """Malformed CSV content."""


class TableValidationError(TableError):
    """Well formed CSV that violates a table invariant."""


class SpecError(EvotabError, ValueError):
    """Invalid configuration (synthetic spec, GA config, experiment config)."""


class SelectionError(EvotabError):
    """Parents cannot be selected from the population."""


class DuplicateChromosomeError(EvotabError):
    """An offspring duplicates a chromosome already in the population."""


class NonTerminationError(EvotabError):
    """A run exhausted its cycle or draw budget without reaching the target.

    The partial :class:`~evotab.population.RunOutcome` is attached as
    ``outcome``.
    """

    def __init__(self, message, outcome=None):
        super().__init__(message)
        self.outcome = outcome

    def __reduce__(self):
        return type(self), (str(self), self.outcome)


class IterationError(EvotabError):
    """An experiment iteration failed; carries its coordinates."""

    def __init__(self, algorithm, population_size, trial, iteration, cause):
        self.algorithm = algorithm
        self.population_size = population_size
        self.trial = trial
        self.iteration = iteration
        self.cause = cause
        super().__init__(
            f"{algorithm} failed at population_size={population_size} "
            f"trial={trial} iteration={iteration}: {cause}"
        )

    def __reduce__(self):
        return type(self), (
            self.algorithm, self.population_size, self.trial, self.iteration, self.cause
        )

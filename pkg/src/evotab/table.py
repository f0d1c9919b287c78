"""Tabular fitness benchmark: loading, validation, lookup and synthesis.

A benchmark table is a precomputed grid of hyperparameter combinations with
their BLEU scores. It is stored column-wise, one array per gene plus one for
fitness, and doubles as the fitness oracle for the optimizers: a chromosome
that is not a row of the table has fitness 0.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import SpecError, TableParseError, TableValidationError
from .population import Chromosome, Individual

FITNESS_COLUMN = "bleu"


@dataclass(frozen=True)
class GeneSpec:
    """One chromosome position and its admissible values."""

    name: str
    pool: tuple[float, ...]

    def __post_init__(self):
        pool = tuple(float(v) for v in self.pool)
        if not pool:
            raise SpecError(f"gene {self.name!r}: pool is empty")
        if len(set(pool)) != len(pool):
            raise SpecError(f"gene {self.name!r}: pool has duplicate values")
        if not all(math.isfinite(v) for v in pool):
            raise SpecError(f"gene {self.name!r}: pool values must be finite")
        object.__setattr__(self, "pool", pool)


# Learning rates are the raw values; the usual 3/6/10 rendering is in 1e-4 units.
NMT_SCHEMA: tuple[GeneSpec, ...] = (
    GeneSpec("bpe_units", (10000, 30000, 50000)),
    GeneSpec("num_layers", (2, 4)),
    GeneSpec("embed_dim", (256, 512, 1024)),
    GeneSpec("hidden_units", (1024, 2048)),
    GeneSpec("attn_heads", (8, 16)),
    GeneSpec("learning_rate", (0.0003, 0.0006, 0.001)),
)


def header(schema: Sequence[GeneSpec] = NMT_SCHEMA) -> list[str]:
    return [g.name for g in schema] + [FITNESS_COLUMN]


def grid_size(schema: Sequence[GeneSpec]) -> int:
    return math.prod(len(g.pool) for g in schema)


def iter_grid(schema: Sequence[GeneSpec]) -> Iterable[Chromosome]:
    """Every chromosome of the full grid, in lexicographic pool order."""
    return itertools.product(*(g.pool for g in schema))


class BenchmarkTable:
    """Immutable columnar store of chromosome -> fitness rows.

    Args:
        schema: Gene definitions, one per chromosome position.
        genes: Row-major gene values, shape ``(N, len(schema))``.
        fitness: BLEU score per row, all strictly positive.
        line_numbers: Source line of each row, used only in diagnostics.

    Raises:
        TableValidationError: listing every violated invariant.
    """

    def __init__(self, schema, genes, fitness, line_numbers=None):
        self.schema = tuple(schema)
        genes = np.asarray(genes, dtype=np.float64).reshape(-1, len(self.schema))
        fitness = np.asarray(fitness, dtype=np.float64).reshape(-1)
        if line_numbers is None:
            line_numbers = [f"row {i}" for i in range(len(fitness))]
        else:
            line_numbers = [f"line {n}" for n in line_numbers]

        problems = _validate(self.schema, genes, fitness, line_numbers)
        if problems:
            raise TableValidationError(problems)

        self.columns = tuple(genes[:, i].copy() for i in range(len(self.schema)))
        self.fitness = fitness.copy()
        for arr in (*self.columns, self.fitness):
            arr.flags.writeable = False

        self._rows: list[Chromosome] = [tuple(float(v) for v in row) for row in genes]
        self._index: dict[Chromosome, float] = {
            c: float(f) for c, f in zip(self._rows, self.fitness)
        }

    def __len__(self) -> int:
        return len(self._rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BenchmarkTable):
            return NotImplemented
        return (
            self.schema == other.schema
            and self._rows == other._rows
            and np.array_equal(self.fitness, other.fitness)
        )

    def __repr__(self) -> str:
        return f"BenchmarkTable(rows={len(self)}, genes={len(self.schema)})"

    @property
    def n_genes(self) -> int:
        return len(self.schema)

    @property
    def grid_size(self) -> int:
        return grid_size(self.schema)

    def chromosome(self, index: int) -> Chromosome:
        return self._rows[index]

    def individual(self, index: int) -> Individual:
        return Individual(self._rows[index], float(self.fitness[index]))

    def rows(self) -> list[Chromosome]:
        return list(self._rows)

    def lookup(self, chromosome: Sequence[float]) -> float:
        """Stored fitness of ``chromosome``, or exactly 0.0 when absent."""
        return self._index.get(tuple(chromosome), 0.0)

    def contains(self, chromosome: Sequence[float]) -> bool:
        return tuple(chromosome) in self._index

    def count_at_least(self, threshold: float) -> int:
        return int(np.count_nonzero(self.fitness >= threshold))

    def target_indices(self, threshold: float) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.fitness >= threshold)]


def _validate(schema, genes, fitness, labels) -> list[str]:
    problems = []
    if genes.shape[0] != fitness.shape[0]:
        return [f"gene rows ({genes.shape[0]}) and fitness values ({fitness.shape[0]}) differ"]
    if fitness.shape[0] == 0:
        return ["table has no data rows"]

    pools = [set(g.pool) for g in schema]
    seen: dict[Chromosome, str] = {}
    for label, row, fit in zip(labels, genes, fitness):
        chrom = tuple(float(v) for v in row)
        for gene, pool, value in zip(schema, pools, chrom):
            if not math.isfinite(value):
                problems.append(f"{label}: {gene.name} value {value} is not finite")
            elif value not in pool:
                problems.append(
                    f"{label}: {gene.name} value {_fmt_gene(value)} is not in pool "
                    f"{{{', '.join(_fmt_gene(v) for v in gene.pool)}}}"
                )
        if not math.isfinite(fit) or fit <= 0:
            problems.append(f"{label}: {FITNESS_COLUMN} must be a positive number, got {fit}")
        if chrom in seen:
            problems.append(f"{label}: duplicate chromosome, first seen on {seen[chrom]}")
        else:
            seen[chrom] = label
    return problems


def lookup_fitness(table: BenchmarkTable, chromosome: Sequence[float]) -> float:
    """Fitness of ``chromosome`` in ``table``; 0 when the combination is absent."""
    return table.lookup(chromosome)


def sample_index(table: BenchmarkTable, rng) -> int:
    return rng.randrange(len(table))


def sample_row(table: BenchmarkTable, rng) -> Individual:
    """Uniformly drawn row of ``table`` as an :class:`Individual`."""
    return table.individual(sample_index(table, rng))


def random_pool_value(table: BenchmarkTable, gene_index: int, rng) -> float:
    pool = table.schema[gene_index].pool
    return pool[rng.randrange(len(pool))]


def load_table(source, schema: Sequence[GeneSpec] = NMT_SCHEMA) -> BenchmarkTable:
    """Read a benchmark CSV.

    ``source`` is a binary stream or a filesystem path. The header must be
    exactly the schema gene names followed by ``bleu``. Row order is kept.

    Raises:
        TableParseError: malformed rows (wrong field count, non-numeric
            values, bad encoding, wrong header), each tagged with its line.
        TableValidationError: table invariants violated.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            return load_table(fh, schema)

    raw = source.read()
    if isinstance(raw, str):
        text = raw
    else:
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise TableParseError([f"not valid UTF-8: {exc}"]) from None

    expected = header(schema)
    reader = csv.reader(io.StringIO(text, newline=""))
    problems: list[str] = []
    genes: list[list[float]] = []
    fitness: list[float] = []
    line_numbers: list[int] = []

    first = next(reader, None)
    if first != expected:
        raise TableParseError(
            [f"line 1: header must be {','.join(expected)!r}, got {','.join(first or [])!r}"]
        )
    for fields in reader:
        lineno = reader.line_num
        if not fields or fields == [""]:
            continue
        if len(fields) != len(expected):
            problems.append(f"line {lineno}: expected {len(expected)} fields, got {len(fields)}")
            continue
        try:
            values = [float(f) for f in fields]
        except ValueError:
            problems.append(f"line {lineno}: non-numeric value in {','.join(fields)!r}")
            continue
        genes.append(values[:-1])
        fitness.append(values[-1])
        line_numbers.append(lineno)

    if problems:
        raise TableParseError(problems)
    return BenchmarkTable(schema, np.array(genes).reshape(-1, len(schema)), fitness, line_numbers)


def _fmt_gene(value: float) -> str:
    return np.format_float_positional(value, trim="-")


def save_table(table: BenchmarkTable, sink) -> None:
    """Write ``table`` as CSV to a binary stream or path.

    Gene values use the shortest positional form that round-trips; fitness
    is written with two decimals.
    """
    if isinstance(sink, (str, os.PathLike)):
        with open(sink, "wb") as fh:
            save_table(table, fh)
        return
    lines = [",".join(header(table.schema))]
    for chrom, fit in zip(table.rows(), table.fitness):
        lines.append(",".join([*(_fmt_gene(v) for v in chrom), f"{fit:.2f}"]))
    sink.write(("\n".join(lines) + "\n").encode("utf-8"))


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters for a synthetic benchmark.

    The defaults keep 150 of the 216 grid points with BLEU between 9.86 and
    16.41, exactly seven of them at or above 16.
    """

    schema: tuple[GeneSpec, ...] = NMT_SCHEMA
    rows_to_keep: int = 150
    target_threshold: float = 16.0
    target_count: int = 7
    fitness_min: float = 9.86
    fitness_max: float = 16.41
    seed: int = 0

    def validate(self) -> None:
        grid = grid_size(self.schema)
        if not 1 <= self.rows_to_keep <= grid:
            raise SpecError(f"rows_to_keep must be in [1, {grid}], got {self.rows_to_keep}")
        if not 1 <= self.target_count <= self.rows_to_keep:
            raise SpecError(
                f"target_count must be in [1, rows_to_keep={self.rows_to_keep}], "
                f"got {self.target_count}"
            )
        if not (0 < self.fitness_min < self.fitness_max):
            raise SpecError("need 0 < fitness_min < fitness_max")
        if not self.target_threshold <= self.fitness_max:
            raise SpecError("target_threshold must not exceed fitness_max")
        # Equality with fitness_min only works when every row is a target.
        if self.target_count < self.rows_to_keep:
            if not self.fitness_min < self.target_threshold:
                raise SpecError("target_threshold must exceed fitness_min")
            if _floor2(self.target_threshold - 0.01) < self.fitness_min:
                raise SpecError("target_threshold leaves no room below it above fitness_min")
        elif self.target_threshold > self.fitness_min:
            raise SpecError("when every row is a target, target_threshold must not exceed fitness_min")


def synthetic_scores(schema: Sequence[GeneSpec], rng: np.random.Generator) -> np.ndarray:
    """Raw epistatic score for every grid point, in :func:`iter_grid` order.

    The score is a weighted sum of per-gene pool ranks plus a pairwise term
    ``e_ij * ((rank_i * rank_j) mod 3)`` for every gene pair, plus Gaussian
    noise with sigma 5% of the noiseless score range. Weights come from
    ``rng``.
    """
    ranks = np.array(list(itertools.product(*(range(len(g.pool)) for g in schema))), dtype=float)
    n = len(schema)
    main = rng.uniform(-1.0, 1.0, size=n)
    pairs = list(itertools.combinations(range(n), 2))
    inter = rng.uniform(-0.5, 0.5, size=len(pairs))

    score = ranks @ main
    for weight, (i, j) in zip(inter, pairs):
        score += weight * np.mod(ranks[:, i] * ranks[:, j], 3)
    spread = float(score.max() - score.min()) or 1.0
    return score + rng.normal(0.0, 0.05 * spread, size=score.shape)


def _floor2(x: float) -> float:
    return math.floor(round(x * 100, 6)) / 100


def _ceil2(x: float) -> float:
    return math.ceil(round(x * 100, 6)) / 100


def _affine(values: np.ndarray, lo: float, hi: float) -> np.ndarray:
    vmin, vmax = float(values.min()), float(values.max())
    if vmax == vmin:
        return np.full(values.shape, hi)
    return lo + (values - vmin) / (vmax - vmin) * (hi - lo)


def _assign_fitness(raw: np.ndarray, spec: SyntheticSpec) -> np.ndarray:
    """Map raw scores to BLEU-like values with exactly ``target_count`` targets.

    The top ``target_count`` rows by raw score land in
    ``[target_threshold, fitness_max]`` and the rest strictly below the
    threshold; the global ordering of raw scores is kept. Values are
    quantized to two decimals, with the extremes pinned to the range ends.
    """
    n, k = len(raw), spec.target_count
    lo, hi, thr = spec.fitness_min, spec.fitness_max, spec.target_threshold
    order = np.argsort(raw, kind="stable")
    overall = _affine(raw, lo, hi)
    out = np.empty(n)

    top = order[n - k:]
    top_lo = max(thr, float(overall[top].min()))
    if k == 1:
        out[top] = hi
    else:
        out[top] = [min(max(_ceil2(v), thr), hi) for v in _affine(raw[top], top_lo, hi)]
    out[top[-1]] = hi

    if k < n:
        bottom = order[: n - k]
        ceiling = _floor2(thr - 0.01)
        bottom_hi = min(ceiling, float(overall[bottom].max()))
        if n - k == 1:
            out[bottom] = lo
        else:
            out[bottom] = [
                min(max(_floor2(v), lo), ceiling) for v in _affine(raw[bottom], lo, bottom_hi)
            ]
        out[bottom[0]] = lo
    else:
        out[top[0]] = lo
    return out


def generate_synthetic(spec: SyntheticSpec | None = None) -> BenchmarkTable:
    """Build a deterministic synthetic benchmark table from ``spec``.

    ``rows_to_keep`` grid points are sampled without replacement and kept in
    grid order; their fitness comes from :func:`synthetic_scores`.
    """
    spec = spec or SyntheticSpec()
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    raw = synthetic_scores(spec.schema, rng)
    grid = np.array(list(iter_grid(spec.schema)), dtype=np.float64)
    keep = np.sort(rng.choice(len(grid), size=spec.rows_to_keep, replace=False))
    fitness = _assign_fitness(raw[keep], spec)
    return BenchmarkTable(spec.schema, grid[keep], fitness)


def coverage(table: BenchmarkTable) -> tuple[int, int]:
    return len(table), table.grid_size


def describe(table: BenchmarkTable, target: float) -> dict:
    """Summary statistics used by the ``validate`` subcommand."""
    return {
        "rows": len(table),
        "grid_size": table.grid_size,
        "targets": table.count_at_least(target),
        "target": target,
        "fitness_min": float(table.fitness.min()),
        "fitness_max": float(table.fitness.max()),
        "genes": {
            g.name: {
                "pool": list(g.pool),
                "observed": sorted(set(float(v) for v in col)),
            }
            for g, col in zip(table.schema, table.columns)
        },
    }

import io
import random

import numpy as np
import pytest

from evotab.table import NMT_SCHEMA, BenchmarkTable, generate_synthetic, iter_grid

ACCEPTANCE_LINES: list[str] = []

EXAMPLE_CHROMOSOME = (10000.0, 4.0, 512.0, 1024.0, 8.0, 0.0006)
OTHER_CHROMOSOME = (30000.0, 2.0, 256.0, 2048.0, 16.0, 0.001)

CSV_HEADER = "bpe_units,num_layers,embed_dim,hidden_units,attn_heads,learning_rate,bleu\n"


def csv_bytes(*rows: str) -> io.BytesIO:
    return io.BytesIO((CSV_HEADER + "".join(r + "\n" for r in rows)).encode())


def small_table(fitnesses, seed=0) -> BenchmarkTable:
    """Table whose rows are ``len(fitnesses)`` random grid points."""
    grid = list(iter_grid(NMT_SCHEMA))
    rows = random.Random(seed).sample(grid, len(fitnesses))
    return BenchmarkTable(NMT_SCHEMA, np.array(rows), fitnesses)


@pytest.fixture(scope="session")
def default_table():
    return generate_synthetic()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

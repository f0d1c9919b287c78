"""Render experiment summaries as markdown, CSV or JSON tables."""

from __future__ import annotations

import csv
import io

from .evaluator import ALGORITHM_TITLES, GA, RANDOM, ExperimentSummary

FORMATS = ("markdown", "csv", "json")
EXTENSIONS = {"markdown": "md", "csv": "csv", "json": "json"}

_RESULT_TITLES = {GA: "Genetic Algorithm Results", RANDOM: "Baseline Algorithm Results"}


def _num(x: float) -> str:
    return f"{x:.3f}"


def _markdown_table(title: str, head: list[str], rows: list[list[str]]) -> str:
    lines = [f"### {title}", "", "| " + " | ".join(head) + " |"]
    lines.append("|" + "|".join("---" for _ in head) + "|")
    lines.extend("| " + " | ".join(r) + " |" for r in rows)
    return "\n".join(lines)


def result_rows(summary: ExperimentSummary, algo: str) -> list[list[str]]:
    rows = []
    for size in summary.population_sizes:
        trials = [_num(v) for v in summary.trial_means[algo][size]]
        rows.append([str(size), *trials, _num(summary.grand_means[algo][size])])
    return rows


def result_header(summary: ExperimentSummary) -> list[str]:
    n_trials = len(summary.trial_means[summary.algorithms[0]][summary.population_sizes[0]])
    return (
        ["Initial Population Size"]
        + [f"Trial {t} (Average Number of Individuals Added)" for t in range(1, n_trials + 1)]
        + ["Average"]
    )


def difference_rows(summary: ExperimentSummary) -> list[list[str]]:
    return [
        [str(size), summary.winners[size], _num(summary.differences[size])]
        for size in summary.population_sizes
    ]


def render_markdown(summary: ExperimentSummary) -> str:
    blocks = []
    for algo in summary.algorithms:
        blocks.append(_markdown_table(_RESULT_TITLES[algo], result_header(summary), result_rows(summary, algo)))
    if summary.differences:
        blocks.append(
            _markdown_table(
                "Performance Difference",
                ["Initial Population Size", "Winner", "Difference in Performance"],
                difference_rows(summary),
            )
        )
        blocks.append(
            f"Overall mean difference: {_num(summary.overall_difference)} "
            f"individuals fewer for the {ALGORITHM_TITLES[GA]}"
            if summary.overall_difference >= 0
            else f"Overall mean difference: {_num(summary.overall_difference)} "
            f"(the {ALGORITHM_TITLES[RANDOM]} needed fewer individuals)"
        )
    return "\n\n".join(blocks) + "\n"


def render_csv(summary: ExperimentSummary) -> str:
    """Long-format CSV: ``table,population_size,column,value``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["table", "population_size", "column", "value"])
    for algo in summary.algorithms:
        for size in summary.population_sizes:
            for t, v in enumerate(summary.trial_means[algo][size], start=1):
                writer.writerow([algo, size, f"trial_{t}", _num(v)])
            writer.writerow([algo, size, "average", _num(summary.grand_means[algo][size])])
    for size in summary.population_sizes:
        if size in summary.differences:
            writer.writerow(["difference", size, "winner", summary.winners[size]])
            writer.writerow(["difference", size, "difference", _num(summary.differences[size])])
    if summary.overall_difference is not None:
        writer.writerow(["difference", "all", "overall_mean", _num(summary.overall_difference)])
    return buf.getvalue()


def render(summary: ExperimentSummary, fmt: str = "markdown") -> str:
    if fmt == "markdown":
        return render_markdown(summary)
    if fmt == "csv":
        return render_csv(summary)
    if fmt == "json":
        return summary.to_json()
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")

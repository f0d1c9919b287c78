"""Command-line interface: ``evotab generate | validate | run``.

Exit codes: 0 success, 1 runtime failure (I/O, non-terminating run),
2 invalid flags or an invalid dataset.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import EvotabError, SpecError, TableError
from .evaluator import (
    ALLOW_TARGETS,
    DEFAULT_MASTER_SEED,
    INITIAL_POLICIES,
    ExperimentConfig,
    run_experiment,
)
from .ga import ASSIGN_ZERO, INVALID_POLICIES, GaConfig
from .report import EXTENSIONS, FORMATS, render
from .table import (
    NMT_SCHEMA,
    SyntheticSpec,
    describe,
    generate_synthetic,
    load_table,
    save_table,
)

SEED_ENV = "EVOTAB_SEED"
U64_MAX = (1 << 64) - 1

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_INVALID = 2


def _u64(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value <= U64_MAX:
        raise argparse.ArgumentTypeError(f"must be in [0, 2**64 - 1], got {value}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _size_list(text: str) -> tuple[int, ...]:
    try:
        sizes = tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not sizes:
        raise argparse.ArgumentTypeError("at least one population size is required")
    if any(s < 2 for s in sizes):
        raise argparse.ArgumentTypeError(f"population sizes must be >= 2, got {text!r}")
    return sizes


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--dataset", type=Path, help="benchmark CSV path")
    shared.add_argument(
        "--seed", type=_u64, default=None,
        help=f"64-bit seed; falls back to ${SEED_ENV}, then {DEFAULT_MASTER_SEED}",
    )
    shared.add_argument("--format", choices=FORMATS, default="markdown", help="report format")
    shared.add_argument("--workers", type=_positive_int, default=1, help="worker processes")

    parser = argparse.ArgumentParser(
        prog="evotab",
        description="Steady-state GA vs random search on a tabular NMT hyperparameter benchmark.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", parents=[shared], help="write a synthetic benchmark CSV")
    gen.add_argument("--out", type=Path, help="output CSV path (same as --dataset)")
    defaults = SyntheticSpec()
    gen.add_argument("--rows", type=_positive_int, default=defaults.rows_to_keep, help="grid points kept")
    gen.add_argument("--targets", type=_positive_int, default=defaults.target_count,
                     help="rows at or above --threshold")
    gen.add_argument("--threshold", type=_float, default=defaults.target_threshold)
    gen.add_argument("--fitness-min", type=_float, default=defaults.fitness_min)
    gen.add_argument("--fitness-max", type=_float, default=defaults.fitness_max)

    val = sub.add_parser("validate", parents=[shared], help="check a benchmark CSV")
    val.add_argument("--target", type=_float, default=16.0, help="fitness threshold to count")

    run = sub.add_parser("run", parents=[shared], help="run paired GA / baseline experiments")
    run.add_argument("--algo", choices=("ga", "random", "both"), default="both")
    run.add_argument("--pop-sizes", type=_size_list, default=(5, 10, 15, 20, 25),
                     help="comma-separated initial population sizes")
    run.add_argument("--iterations", type=_positive_int, default=1000, help="iterations per trial")
    run.add_argument("--trials", type=_positive_int, default=3)
    run.add_argument("--target", type=_float, default=16.0, help="target BLEU")
    run.add_argument("--mutation-rate", type=_float, default=0.125)
    run.add_argument("--invalid-policy", choices=INVALID_POLICIES, default=ASSIGN_ZERO,
                     help="handling of offspring absent from the table")
    run.add_argument("--initial-policy", choices=INITIAL_POLICIES, default=ALLOW_TARGETS,
                     help="whether initial populations may contain target rows")
    run.add_argument("--max-cycles", type=_positive_int, default=10_000,
                     help="GA breeding-cycle cap per iteration")
    run.add_argument("--out-dir", type=Path, default=Path("results"))
    return parser


def resolve_seed(args, parser) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return DEFAULT_MASTER_SEED
    try:
        return _u64(env)
    except argparse.ArgumentTypeError as exc:
        parser.error(f"${SEED_ENV}: {exc}")


def _print_problems(header: str, problems) -> None:
    print(header, file=sys.stderr)
    for p in problems:
        print(f"  {p}", file=sys.stderr)


def cmd_generate(args, parser) -> int:
    out = args.out or args.dataset
    if out is None:
        parser.error("--out: an output path is required")
    seed = resolve_seed(args, parser)
    spec = SyntheticSpec(
        rows_to_keep=args.rows,
        target_count=args.targets,
        target_threshold=args.threshold,
        fitness_min=args.fitness_min,
        fitness_max=args.fitness_max,
        seed=seed,
    )
    try:
        table = generate_synthetic(spec)
    except SpecError as exc:
        print(f"invalid synthetic spec: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        save_table(table, out)
    except OSError as exc:
        print(f"cannot write {out}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(
        f"wrote {len(table)} rows ({table.count_at_least(args.threshold)} with "
        f"bleu >= {args.threshold:g}) to {out}"
    )
    return EXIT_OK


def _load(path: Path):
    try:
        return load_table(path, NMT_SCHEMA), None
    except TableError as exc:
        return None, exc


def cmd_validate(args, parser) -> int:
    if args.dataset is None:
        parser.error("--dataset: a dataset path is required")
    try:
        table, err = _load(args.dataset)
    except OSError as exc:
        print(f"--dataset: cannot read {args.dataset}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if err is not None:
        _print_problems(f"{args.dataset}: {len(err.problems)} problem(s)", err.problems)
        return EXIT_INVALID

    info = describe(table, args.target)
    if args.format == "json":
        print(json.dumps(info, indent=2))
        return EXIT_OK
    print(f"rows={info['rows']}, targets(≥{args.target:g})={info['targets']}, "
          f"coverage={info['rows']}/{info['grid_size']}")
    print(f"fitness min={info['fitness_min']:.2f} max={info['fitness_max']:.2f}")
    for name, g in info["genes"].items():
        observed = ", ".join(f"{v:g}" for v in g["observed"])
        pool = ", ".join(f"{v:g}" for v in g["pool"])
        print(f"{name}: observed {{{observed}}} of pool {{{pool}}}")
    return EXIT_OK


def cmd_run(args, parser) -> int:
    if not 0.0 <= args.mutation_rate <= 1.0:
        parser.error(f"--mutation-rate: must be in [0, 1], got {args.mutation_rate}")
    if not args.target > 0:
        parser.error(f"--target: must be positive, got {args.target}")
    seed = resolve_seed(args, parser)

    if args.dataset is None:
        table = generate_synthetic(SyntheticSpec())
    else:
        try:
            table, err = _load(args.dataset)
        except OSError as exc:
            print(f"--dataset: cannot read {args.dataset}: {exc}", file=sys.stderr)
            return EXIT_INVALID
        if err is not None:
            _print_problems(f"{args.dataset}: {len(err.problems)} problem(s)", err.problems)
            return EXIT_INVALID

    algorithms = ("ga", "random") if args.algo == "both" else (args.algo,)
    config = ExperimentConfig(
        population_sizes=args.pop_sizes,
        iterations_per_trial=args.iterations,
        trials=args.trials,
        target=args.target,
        ga_config=GaConfig(
            mutation_rate=args.mutation_rate,
            target=args.target,
            invalid_offspring_policy=args.invalid_policy,
            max_cycles=args.max_cycles,
        ),
        master_seed=seed,
        initial_population_policy=args.initial_policy,
        algorithms=algorithms,
    )
    try:
        config.validate(table)
    except SpecError as exc:
        parser.error(f"--pop-sizes: {exc}")

    try:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        summary = run_experiment(
            table, config, workers=args.workers, results_path=args.out_dir / "results.jsonl"
        )
        text = render(summary, args.format)
        (args.out_dir / "summary.json").write_text(summary.to_json(), encoding="utf-8")
        (args.out_dir / f"report.{EXTENSIONS[args.format]}").write_text(text, encoding="utf-8")
    except OSError as exc:
        print(f"cannot write to {args.out_dir}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except EvotabError as exc:
        # IterationError messages carry the failing coordinates.
        print(f"run failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {"generate": cmd_generate, "validate": cmd_validate, "run": cmd_run}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return COMMANDS[args.command](args, parser)


if __name__ == "__main__":
    sys.exit(main())

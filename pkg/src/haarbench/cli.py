"""Command-line entry point: ``haarbench <command> [options]``.

Parameter precedence, lowest to highest: built-in defaults, the
``HAARBENCH_SEED`` environment variable (seed only), the ``--config`` file,
then explicit flags.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .experiments import COMMANDS, SPEC_FIELDS, ExperimentSpec, render, run, write_table

log = logging.getLogger("haarbench")

SEED_ENV = "HAARBENCH_SEED"

_INT_KEYS = {"dim", "samples", "seed", "min_count", "bins", "points", "workers"}
_FLOAT_KEYS = {"window_width", "gamma"}
_BOOL_KEYS = {"maxent"}


def parse_eps_grid(text: str) -> tuple[float, ...]:
    try:
        grid = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad eps grid {text!r}: {exc}") from None
    if not grid:
        raise argparse.ArgumentTypeError("eps grid is empty")
    return grid


def _coerce(key: str, raw: str):
    if key in _INT_KEYS:
        return int(raw)
    if key in _FLOAT_KEYS:
        return float(raw)
    if key in _BOOL_KEYS:
        low = raw.strip().lower()
        if low not in ("1", "0", "true", "false", "yes", "no"):
            raise ValueError(f"expected a boolean for {key}, got {raw!r}")
        return low in ("1", "true", "yes")
    if key == "eps_grid":
        return parse_eps_grid(raw)
    return raw


def read_config(path: str) -> dict:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key = key.strip().replace("-", "_")
            if key not in SPEC_FIELDS or key == "command":
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _coerce(key, value.strip())
    return values


def _env_seed() -> dict:
    raw = os.environ.get(SEED_ENV)
    if raw is None or not raw.strip():
        return {}
    try:
        return {"seed": int(raw)}
    except ValueError:
        raise ValueError(f"{SEED_ENV} must be an unsigned integer, got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="haarbench",
        description="Fidelity/entanglement statistics of Haar-random bipartite states.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def shared(p):
        p.add_argument("--dim", type=int, help="local dimension d")
        p.add_argument("--samples", type=int, help="number of Monte Carlo samples N")
        p.add_argument("--seed", type=int, help=f"unsigned 64-bit seed (fallback: ${SEED_ENV})")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--config", help="flat key = value parameter file")
        p.add_argument("--workers", type=int, help="parallel worker processes")

    def reference(p):
        p.add_argument("--reference", choices=("separable", "max-entangled", "haar-random"))

    def input_kind(p):
        group = p.add_mutually_exclusive_group()
        group.add_argument("--gamma", type=float, help="two-qubit input with parameter gamma")
        group.add_argument("--maxent", action="store_true", default=None,
                           help="maximally entangled input at --dim")

    p = sub.add_parser("scatter", help="(entropy, fidelity) pairs of Haar states")
    shared(p)
    reference(p)

    p = sub.add_parser("avg-fid", help="windowed mean fidelity versus entropy")
    shared(p)
    reference(p)
    p.add_argument("--window-width", type=float)
    p.add_argument("--min-count", type=int, help="minimum samples for a valid window")

    p = sub.add_parser("pdf-table", help="closed-form fidelity density on a grid")
    shared(p)
    input_kind(p)
    p.add_argument("--points", type=int, help="grid points on [0, 1]")

    p = sub.add_parser("benchmark", help="JS divergence of the noisy device versus eps")
    shared(p)
    input_kind(p)
    p.add_argument("--eps-grid", type=parse_eps_grid, help="comma-separated error probabilities")
    p.add_argument("--bins", type=int, help="histogram bins on [0, 1]")
    return parser


def resolve_spec(args: argparse.Namespace) -> ExperimentSpec:
    values = _env_seed()
    if args.config:
        values.update(read_config(args.config))
    flags = {k: v for k, v in vars(args).items() if k in SPEC_FIELDS and v is not None}
    values.update(flags)
    values["command"] = args.command
    return ExperimentSpec(**values)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    assert args.command in COMMANDS
    try:
        spec = resolve_spec(args)
    except (OSError, ValueError) as exc:
        parser.error(str(exc))
    log.info("running %s with seed %d", spec.command, spec.seed)
    try:
        table = run(spec)
        if spec.out:
            write_table(table, spec.out, spec.format)
            log.info("wrote %d rows to %s", len(table.rows), spec.out)
        else:
            sys.stdout.write(render(table, spec.format))
    except (OSError, ValueError) as exc:
        print(f"haarbench: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Experiment drivers producing the tables behind each figure.

Each ``run_*`` function takes an :class:`ExperimentSpec`, performs the Monte
Carlo or analytic evaluation and returns a :class:`Table`. Rendering and
atomic file output live in :func:`render` and :func:`write_table`.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import asdict, dataclass, field, fields
from functools import partial
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import AnalyticPdf
from .benchmark import BenchmarkConfig, benchmark_sweep
from .quantum import (
    PureState,
    entropy_from_schmidt,
    overlap_sq,
    schmidt_coefficients,
)
from .sampling import RandomStream, blocked_map, haar_states, sample_haar_state

COMMANDS = ("scatter", "avg-fid", "pdf-table", "benchmark")
REFERENCE_KINDS = ("separable", "max-entangled", "haar-random")
FORMATS = ("csv", "json")

DEFAULT_SAMPLES = {"scatter": 50_000, "avg-fid": 200_000, "benchmark": 100_000, "pdf-table": 0}
DEFAULT_EPS_GRID = (0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3)

# stream ids under the run seed; sampling blocks are children of _SAMPLE_STREAM
_SAMPLE_STREAM = 0
_REFERENCE_STREAM = 1


@dataclass
class ExperimentSpec:
    """Fully resolved parameters of one experiment run.

    ``samples=None`` means the per-command default from ``DEFAULT_SAMPLES``.
    """

    command: str
    dim: int = 2
    samples: int | None = None
    seed: int = 0
    reference: str = "separable"
    window_width: float = 0.02
    min_count: int = 100
    gamma: float | None = None
    maxent: bool = False
    eps_grid: tuple[float, ...] = DEFAULT_EPS_GRID
    bins: int = 50
    points: int = 1001
    out: str | None = None
    format: str = "csv"
    workers: int = 1

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.samples is None:
            self.samples = DEFAULT_SAMPLES[self.command]
        if int(self.dim) != self.dim or self.dim < 2:
            raise ValueError(f"dim must be an integer >= 2, got {self.dim}")
        if self.command != "pdf-table" and self.samples < 1:
            raise ValueError(f"samples must be >= 1, got {self.samples}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.reference not in REFERENCE_KINDS:
            raise ValueError(f"reference must be one of {REFERENCE_KINDS}, got {self.reference!r}")
        if not 0.0 < self.window_width <= 1.0:
            raise ValueError(f"window width must lie in (0, 1], got {self.window_width}")
        if self.gamma is not None:
            if not 0.0 <= self.gamma <= 1.0:
                raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")
            if self.maxent:
                raise ValueError("--gamma and --maxent are mutually exclusive")
            if self.dim != 2:
                raise ValueError("gamma inputs are two-qubit only; use dim = 2")
        self.eps_grid = tuple(float(e) for e in self.eps_grid)
        if self.bins < 2:
            raise ValueError("bins must be >= 2")
        if self.points < 2:
            raise ValueError("points must be >= 2")
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}, got {self.format!r}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def provenance(self) -> dict:
        """Parameters needed to rerun the experiment; excludes output location and parallelism."""
        skip = {"out", "format", "workers"}
        meta = {k: v for k, v in asdict(self).items() if k not in skip}
        meta["eps_grid"] = list(self.eps_grid)
        return meta


@dataclass
class Table:
    columns: list[str]
    rows: list[tuple]
    metadata: dict = field(default_factory=dict)


def reference_state(kind: str, d: int, seed: int) -> PureState:
    if kind == "separable":
        return PureState.basis(d, 0, 0)
    if kind == "max-entangled":
        return PureState.max_entangled(d)
    if kind == "haar-random":
        return sample_haar_state(d, RandomStream(seed, _REFERENCE_STREAM))
    raise ValueError(f"unknown reference kind {kind!r}")


def _entropy_fidelity_block(d, reference, count, rng):
    states = haar_states(d, count, rng)
    entropy = entropy_from_schmidt(schmidt_coefficients(states, d))
    return np.stack([entropy, overlap_sq(reference, states)])


def sample_entropy_fidelity(
    d: int, n: int, reference: PureState, seed: int, workers: int = 1
) -> tuple[np.ndarray, np.ndarray]:
    """Entanglement entropy and fidelity to ``reference`` for ``n`` Haar states."""
    fn = partial(_entropy_fidelity_block, d, reference.amplitudes)
    blocks = blocked_map(fn, n, RandomStream(seed, _SAMPLE_STREAM), workers=workers)
    data = np.concatenate(blocks, axis=1)
    return data[0], data[1]


def window_average(
    entropy: np.ndarray, fidelity: np.ndarray, width: float = 0.02, min_count: int = 100
) -> list[tuple]:
    """Mean fidelity per entropy window.

    Returns ``(center, mean, count, std_error, valid)`` per window. Windows
    with fewer than ``min_count`` samples get ``mean = std_error = None`` and
    ``valid = False``.
    """
    n_windows = max(1, round(1.0 / width))
    idx = np.minimum((np.asarray(entropy) / width).astype(np.int64), n_windows - 1)
    rows = []
    for k in range(n_windows):
        sel = fidelity[idx == k]
        count = int(sel.size)
        center = (k + 0.5) * width
        if count >= max(min_count, 2):
            sem = float(sel.std(ddof=1) / math.sqrt(count))
            rows.append((center, float(sel.mean()), count, sem, True))
        else:
            rows.append((center, None, count, None, False))
    return rows


def _metadata(spec: ExperimentSpec, **extra) -> dict:
    meta = {"command": spec.command, "toolkit": "haarbench", "version": __version__}
    meta.update(spec.provenance())
    meta.update(extra)
    return meta


def run_scatter(spec: ExperimentSpec) -> Table:
    ref = reference_state(spec.reference, spec.dim, spec.seed)
    entropy, fidelity = sample_entropy_fidelity(spec.dim, spec.samples, ref, spec.seed, spec.workers)
    rows = [(float(e), float(f)) for e, f in zip(entropy, fidelity)]
    return Table(["entropy", "fidelity"], rows, _metadata(spec))


def run_avg(spec: ExperimentSpec) -> Table:
    ref = reference_state(spec.reference, spec.dim, spec.seed)
    entropy, fidelity = sample_entropy_fidelity(spec.dim, spec.samples, ref, spec.seed, spec.workers)
    rows = window_average(entropy, fidelity, spec.window_width, spec.min_count)
    return Table(
        ["window_center", "mean_fidelity", "sample_count", "std_error", "valid"],
        rows,
        _metadata(spec, expected_mean=1.0 / spec.dim**2),
    )


def pdf_for_spec(spec: ExperimentSpec) -> AnalyticPdf:
    if spec.gamma is not None:
        return AnalyticPdf.sep_gamma(spec.gamma)
    if spec.maxent:
        return AnalyticPdf.sep_maxent(spec.dim)
    return AnalyticPdf.global_haar(spec.dim**2)


def run_pdf_table(spec: ExperimentSpec) -> Table:
    ref = pdf_for_spec(spec)
    grid = np.linspace(0.0, 1.0, spec.points)
    values = ref.pdf(grid)
    rows = [(float(f), float(p)) for f, p in zip(grid, values)]
    return Table(["f", "pdf_value"], rows, _metadata(spec, distribution=ref.describe()))


def run_benchmark(spec: ExperimentSpec) -> Table:
    cfg = BenchmarkConfig(
        local_dim=spec.dim,
        gamma=spec.gamma,
        epsilon_grid=spec.eps_grid,
        samples_per_point=spec.samples,
        bin_count=spec.bins,
        seed=spec.seed,
    )
    rows = [tuple(r) for r in benchmark_sweep(cfg, workers=spec.workers)]
    return Table(
        ["eps", "js", "n_samples", "bins"],
        rows,
        _metadata(spec, input_kind=cfg.input_kind, distribution=cfg.reference_pdf().describe()),
    )


RUNNERS = {
    "scatter": run_scatter,
    "avg-fid": run_avg,
    "pdf-table": run_pdf_table,
    "benchmark": run_benchmark,
}


def run(spec: ExperimentSpec) -> Table:
    return RUNNERS[spec.command](spec)


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    # repr of a float is the shortest string that round-trips
    return repr(value) if isinstance(value, float) else str(value)


def render_csv(table: Table) -> str:
    lines = [f"# {key} = {json.dumps(value, sort_keys=True)}" for key, value in table.metadata.items()]
    lines.append(",".join(table.columns))
    lines.extend(",".join(_cell(v) for v in row) for row in table.rows)
    return "\n".join(lines) + "\n"


def render_json(table: Table) -> str:
    doc = {
        "metadata": table.metadata,
        "columns": table.columns,
        "rows": [dict(zip(table.columns, row)) for row in table.rows],
    }
    return json.dumps(doc, indent=1) + "\n"


def render(table: Table, fmt: str) -> str:
    if fmt == "csv":
        return render_csv(table)
    if fmt == "json":
        return render_json(table)
    raise ValueError(f"unknown format {fmt!r}")


def write_table(table: Table, path: str | os.PathLike, fmt: str) -> Path:
    """Write atomically: render to a temporary sibling, then rename over ``path``."""
    text = render(table, fmt)
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def parse_csv(text: str) -> Table:
    """Read back a table written by :func:`render_csv`."""
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(" = ")
            meta[key] = json.loads(value)
        elif line:
            body.append(line)
    columns = body[0].split(",")

    def conv(cell):
        if cell == "":
            return None
        if cell in ("true", "false"):
            return cell == "true"
        try:
            return int(cell)
        except ValueError:
            return float(cell)

    rows = [tuple(conv(c) for c in line.split(",")) for line in body[1:]]
    return Table(columns, rows, meta)


SPEC_FIELDS = {f.name for f in fields(ExperimentSpec)}

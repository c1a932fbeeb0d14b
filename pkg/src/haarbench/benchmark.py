"""Noisy distributed-computation benchmark.

A shared entangled pair is rotated by independent Haar local unitaries and
each half then passes through a depolarizing channel of strength ``eps``.
The fidelity of the output to ``|0...0>`` is histogrammed and compared with
the error-free closed-form density through the Jensen-Shannon divergence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial
from typing import NamedTuple, Sequence

import numpy as np

from . import tolerances as tol
from .analytic import AnalyticPdf, cdf
from .quantum import (
    DensityMatrix,
    DimensionMismatchError,
    PureState,
    SchmidtSpectrum,
    Side,
    expectation,
    fidelity_pure_mixed,
    partial_trace,
)
from .sampling import DEFAULT_BLOCK_SIZE, RandomStream, blocked_map, schmidt_fixed_states

DEFAULT_BINS = 50


class SupportMismatchError(ValueError):
    """KL divergence is infinite: ``p`` has mass where ``m`` has none."""


# ---------------------------------------------------------------------------
# depolarizing channel
# ---------------------------------------------------------------------------


def _check_eps(eps: float) -> float:
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"error probability must lie in [0, 1], got {eps}")
    return float(eps)


def depolarize(rho: np.ndarray, d: int, side: Side, eps: float) -> np.ndarray:
    """Apply ``(1-eps) s + eps tr(s) I/d`` to one party of ``(..., d^2, d^2)`` states."""
    eps = _check_eps(eps)
    if eps == 0.0:
        return rho
    eye = np.eye(d) / d
    if side == "A":
        rest = partial_trace(rho, d, "B")
        mixed = np.einsum("ik,...jl->...ijkl", eye, rest)
    elif side == "B":
        rest = partial_trace(rho, d, "A")
        mixed = np.einsum("...ik,jl->...ijkl", rest, eye)
    else:
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    mixed = mixed.reshape(rho.shape)
    return (1.0 - eps) * rho + eps * mixed


def depolarize_local(rho: DensityMatrix, side: Side, eps: float) -> DensityMatrix:
    if not rho.is_bipartite:
        raise DimensionMismatchError("depolarize_local needs a bipartite density matrix")
    return DensityMatrix(depolarize(rho.entries, rho.local_dim, side, eps), rho.local_dim)


# ---------------------------------------------------------------------------
# noisy device
# ---------------------------------------------------------------------------


def input_spectrum(d: int, gamma: float | None = None) -> SchmidtSpectrum:
    """Schmidt spectrum of the device input: maximally entangled, or the qubit gamma family."""
    if gamma is None:
        return SchmidtSpectrum.max_entangled(d)
    if d != 2:
        raise ValueError("gamma-parametrized inputs are defined for d = 2 only")
    return SchmidtSpectrum.from_gamma(gamma)


def noisy_fidelities(
    spectrum: SchmidtSpectrum,
    eps_grid: Sequence[float],
    reference: np.ndarray,
    n: int,
    rng: RandomStream,
) -> np.ndarray:
    """Fidelities of ``n`` noisy device outputs for every ``eps``, shape ``(len(eps_grid), n)``.

    The same local unitaries are reused across the ``eps`` grid.
    """
    d = spectrum.local_dim
    psi = schmidt_fixed_states(spectrum, n, rng)
    rho = psi[:, :, None] * psi[:, None, :].conj()
    out = np.empty((len(eps_grid), n))
    for k, eps in enumerate(eps_grid):
        noisy = depolarize(depolarize(rho, d, "A", eps), d, "B", eps)
        out[k] = np.clip(expectation(reference, noisy), 0.0, 1.0)
    return out


def sample_noisy_fidelity(
    d: int,
    eps: float,
    reference: PureState,
    rng: RandomStream,
    gamma: float | None = None,
) -> float:
    """One device trial: rotate, depolarize both halves, measure fidelity to ``reference``."""
    if reference.local_dim != d:
        raise DimensionMismatchError(f"reference is {reference.local_dim}-dimensional, expected {d}")
    spectrum = input_spectrum(d, gamma)
    psi = schmidt_fixed_states(spectrum, 1, rng)[0]
    rho = DensityMatrix(np.outer(psi, psi.conj()), d)
    noisy = depolarize_local(depolarize_local(rho, "A", eps), "B", eps)
    return fidelity_pure_mixed(reference, noisy)


# ---------------------------------------------------------------------------
# histograms and divergences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Histogram:
    """Probability mass over ``bin_count`` uniform bins on [0, 1]."""

    mass: np.ndarray
    edges: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        m = np.array(self.mass, dtype=float).ravel()
        if m.size < 2:
            raise ValueError("a histogram needs at least two bins")
        if np.any(m < 0):
            raise ValueError("histogram mass must be nonnegative")
        if abs(m.sum() - 1.0) > tol.HIST_ATOL:
            raise ValueError(f"histogram mass sums to {m.sum()!r}, expected 1")
        m.setflags(write=False)
        edges = np.linspace(0.0, 1.0, m.size + 1)
        edges.setflags(write=False)
        object.__setattr__(self, "mass", m)
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_counts(cls, counts) -> "Histogram":
        c = np.asarray(counts, dtype=float)
        total = c.sum()
        if total <= 0:
            raise ValueError("cannot normalize an empty histogram")
        return cls(c / total)

    @property
    def bin_count(self) -> int:
        return self.mass.size

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])


def histogram_counts(samples, bins: int) -> np.ndarray:
    """Counts in ``bins`` uniform bins on [0, 1]; last bin closed, others right-open."""
    x = np.asarray(samples, dtype=float).ravel()
    if bins < 2:
        raise ValueError(f"bin count must be >= 2, got {bins}")
    if np.any(~np.isfinite(x)) or np.any(x < 0.0) or np.any(x > 1.0):
        raise ValueError("samples must lie in [0, 1]")
    idx = np.minimum((x * bins).astype(np.int64), bins - 1)
    return np.bincount(idx, minlength=bins)


def empirical_histogram(samples, bins: int = DEFAULT_BINS) -> Histogram:
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("cannot histogram an empty sample")
    return Histogram.from_counts(histogram_counts(x, bins))


def analytic_histogram(ref: AnalyticPdf, bins: int = DEFAULT_BINS) -> Histogram:
    """Exact bin masses from CDF differences."""
    if bins < 2:
        raise ValueError(f"bin count must be >= 2, got {bins}")
    edges = np.linspace(0.0, 1.0, bins + 1)
    mass = np.clip(np.diff(cdf(ref, edges)), 0.0, None)
    return Histogram(mass / mass.sum())


def _check_binning(p: Histogram, q: Histogram) -> None:
    if p.bin_count != q.bin_count:
        raise ValueError(f"binning mismatch: {p.bin_count} vs {q.bin_count} bins")


def kl_divergence(p: Histogram, m: Histogram) -> float:
    """``sum p_i log2(p_i / m_i)`` with ``0 log(0/x) = 0``."""
    _check_binning(p, m)
    pm, mm = p.mass, m.mass
    if np.any((pm > 0) & (mm == 0)):
        raise SupportMismatchError("p has mass in a bin where m has none")
    nz = pm > 0
    return float(max(0.0, np.sum(pm[nz] * np.log2(pm[nz] / mm[nz]))))


def js_divergence(p: Histogram, q: Histogram) -> float:
    """Jensen-Shannon divergence in bits, in [0, 1]."""
    _check_binning(p, q)
    mid = Histogram((p.mass + q.mass) / 2.0)
    js = 0.5 * (kl_divergence(p, mid) + kl_divergence(q, mid))
    return min(1.0, max(0.0, js))


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BenchmarkConfig:
    """Parameters of one JS-versus-error sweep.

    ``gamma=None`` selects the maximally entangled input at ``local_dim``;
    a float selects the two-qubit gamma input (``local_dim`` must be 2).
    """

    local_dim: int = 2
    gamma: float | None = None
    epsilon_grid: tuple[float, ...] = (0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3)
    samples_per_point: int = 100_000
    bin_count: int = DEFAULT_BINS
    seed: int = 0

    def __post_init__(self):
        if int(self.local_dim) != self.local_dim or self.local_dim < 2:
            raise ValueError(f"local_dim must be an integer >= 2, got {self.local_dim}")
        if self.gamma is not None:
            if self.local_dim != 2:
                raise ValueError("gamma inputs require local_dim = 2")
            if not 0.0 <= self.gamma <= 1.0:
                raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")
        grid = tuple(sorted(float(e) for e in self.epsilon_grid))
        if not grid:
            raise ValueError("epsilon_grid is empty")
        for e in grid:
            _check_eps(e)
        object.__setattr__(self, "epsilon_grid", grid)
        if self.samples_per_point < 1:
            raise ValueError("samples_per_point must be >= 1")
        if self.bin_count < 2:
            raise ValueError("bin_count must be >= 2")

    @property
    def input_kind(self) -> str:
        return "maxent" if self.gamma is None else "gamma"

    def reference_pdf(self) -> AnalyticPdf:
        if self.gamma is None:
            return AnalyticPdf.sep_maxent(self.local_dim)
        return AnalyticPdf.sep_gamma(self.gamma)


class SweepRow(NamedTuple):
    eps: float
    js: float
    n_samples: int
    bins: int


def _sweep_block(coefficients, eps_grid, d, bins, count, rng):
    spectrum = SchmidtSpectrum(coefficients)
    reference = np.zeros(d * d, dtype=complex)
    reference[0] = 1.0
    fids = noisy_fidelities(spectrum, eps_grid, reference, count, rng)
    return np.stack([histogram_counts(row, bins) for row in fids])


def benchmark_sweep(
    cfg: BenchmarkConfig,
    *,
    workers: int = 1,
    block_size: int = DEFAULT_BLOCK_SIZE,
) -> list[SweepRow]:
    """JS divergence between noisy and error-free fidelity histograms along the eps grid.

    Histogram counts are accumulated block by block (a commutative merge),
    so the table is identical for any ``workers``.
    """
    spectrum = input_spectrum(cfg.local_dim, cfg.gamma)
    fn = partial(_sweep_block, spectrum.coefficients, cfg.epsilon_grid, cfg.local_dim, cfg.bin_count)
    rng = RandomStream(cfg.seed)
    counts = sum(blocked_map(fn, cfg.samples_per_point, rng, block_size=block_size, workers=workers))
    ref = analytic_histogram(cfg.reference_pdf(), cfg.bin_count)
    return [
        SweepRow(eps, js_divergence(Histogram.from_counts(c), ref), cfg.samples_per_point, cfg.bin_count)
        for eps, c in zip(cfg.epsilon_grid, counts)
    ]

"""Seedable samplers for Haar-random states and unitaries.

All randomness flows through :class:`RandomStream`; there is no module-level
RNG. Each sampler has a batched array form (``haar_states``,
``haar_unitaries`` ...) used by the Monte Carlo drivers, and a single-draw
form returning the validated objects from :mod:`haarbench.quantum`.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, TypeVar

import numpy as np

from .quantum import PureState, SchmidtSpectrum

T = TypeVar("T")

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

#: Samples per independently seeded block in :func:`blocked_map`.
DEFAULT_BLOCK_SIZE = 4096


def _splitmix64(x: int) -> int:
    x = (x + _GOLDEN) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def child_stream_id(parent: int, index: int) -> int:
    """Stream id of the ``index``-th child of ``parent``.

    ``splitmix64(splitmix64(parent) ^ index)``. Children of one parent are
    distinct for distinct indices, and the rule depends only on the two
    integers so a partitioned run is reproducible regardless of how blocks are
    scheduled.
    """
    return _splitmix64(_splitmix64(parent & _MASK64) ^ (index & _MASK64))


class RandomStream:
    """A reproducible random source identified by ``(seed, stream_id)``.

    The numpy ``Generator`` is built from ``SeedSequence(seed,
    spawn_key=(stream_id,))``, so two streams with the same pair produce
    identical draws and streams with different ids are independent.
    Gaussian variates are standard normal (mean 0, variance 1).
    """

    def __init__(self, seed: int = 0, stream_id: int = 0):
        if not 0 <= seed <= _MASK64 or not 0 <= stream_id <= _MASK64:
            raise ValueError("seed and stream_id must be unsigned 64-bit integers")
        self._seed = int(seed)
        self._stream_id = int(stream_id)
        ss = np.random.SeedSequence(self._seed, spawn_key=(self._stream_id,))
        self._gen = np.random.Generator(np.random.PCG64(ss))

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def stream_id(self) -> int:
        return self._stream_id

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def spawn(self, index: int) -> "RandomStream":
        return RandomStream(self._seed, child_stream_id(self._stream_id, index))

    def normal(self, size) -> np.ndarray:
        return self._gen.standard_normal(size)

    def complex_normal(self, size) -> np.ndarray:
        return self._gen.standard_normal(size) + 1j * self._gen.standard_normal(size)

    def uniform(self, size) -> np.ndarray:
        return self._gen.random(size)

    def __repr__(self):
        return f"RandomStream(seed={self._seed}, stream_id={self._stream_id})"


def _check_dim(d: int) -> None:
    if int(d) != d or d < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {d}")


# ---------------------------------------------------------------------------
# batched samplers
# ---------------------------------------------------------------------------


def haar_vectors(dim: int, n: int, rng: RandomStream) -> np.ndarray:
    """``n`` Haar-random unit vectors in C^dim, shape ``(n, dim)``.

    Real and imaginary parts are independent standard normals; dividing by
    the Euclidean norm makes the result uniform on the unit sphere.
    """
    z = rng.complex_normal((n, dim))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def haar_states(d: int, n: int, rng: RandomStream) -> np.ndarray:
    _check_dim(d)
    return haar_vectors(d * d, n, rng)


def haar_unitaries(d: int, n: int, rng: RandomStream) -> np.ndarray:
    """``n`` Haar-random ``d x d`` unitaries, shape ``(n, d, d)``.

    QR of a complex Ginibre matrix, with each column of Q rescaled by the
    phase of the matching diagonal entry of R so that R has a positive real
    diagonal. Without that correction the distribution is not Haar.
    """
    _check_dim(d)
    z = rng.complex_normal((n, d, d)) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    phases = diag / np.abs(diag)
    return q * phases[:, None, :]


def schmidt_fixed_states(s: SchmidtSpectrum, n: int, rng: RandomStream) -> np.ndarray:
    """``(Ua x Ub) sum_k s_k |k k>`` for ``n`` independent Haar pairs."""
    d = s.local_dim
    ua = haar_unitaries(d, n, rng)
    ub = haar_unitaries(d, n, rng)
    # (Ua diag(s) Ub^T) without forming the coefficient matrix explicitly
    m = (ua * s.coefficients[None, None, :]) @ np.swapaxes(ub, -1, -2)
    return m.reshape(n, d * d)


def pb_variates(d: int, n: int, rng: RandomStream) -> np.ndarray:
    """Inverse-CDF draws from density ``(d-1)(1-p)^(d-2)`` on [0, 1)."""
    _check_dim(d)
    u = rng.uniform(n)
    return 1.0 - (1.0 - u) ** (1.0 / (d - 1))


def reduced_fidelities(s: SchmidtSpectrum, n: int, rng: RandomStream) -> np.ndarray:
    """Fidelity of Schmidt-``s`` random states to ``|0...0>`` via the reduced model.

    ``f = p_b * sum_i s_i^2 |<i|psi_a>|^2`` with ``p_b`` from
    :func:`pb_variates` and ``psi_a`` Haar-random in C^d. Only d-dimensional
    objects are drawn.
    """
    d = s.local_dim
    pb = pb_variates(d, n, rng)
    psi_a = haar_vectors(d, n, rng)
    pa = np.abs(psi_a) ** 2 @ s.probabilities
    return pb * pa


# ---------------------------------------------------------------------------
# single-draw samplers
# ---------------------------------------------------------------------------


def sample_haar_state(d: int, rng: RandomStream) -> PureState:
    return PureState(haar_states(d, 1, rng)[0], d)


def sample_haar_unitary(d: int, rng: RandomStream) -> np.ndarray:
    return haar_unitaries(d, 1, rng)[0]


def sample_schmidt_fixed(s: SchmidtSpectrum, rng: RandomStream) -> PureState:
    if not isinstance(s, SchmidtSpectrum):
        s = SchmidtSpectrum(s)
    amps = schmidt_fixed_states(s, 1, rng)[0]
    return PureState(amps / np.linalg.norm(amps), s.local_dim)


def sample_gamma_state(gamma: float, rng: RandomStream) -> PureState:
    return sample_schmidt_fixed(SchmidtSpectrum.from_gamma(gamma), rng)


def sample_pb(d: int, rng: RandomStream) -> float:
    return float(pb_variates(d, 1, rng)[0])


def sample_fidelity_reduced(s: SchmidtSpectrum, rng: RandomStream) -> float:
    if not isinstance(s, SchmidtSpectrum):
        s = SchmidtSpectrum(s)
    return float(reduced_fidelities(s, 1, rng)[0])


# ---------------------------------------------------------------------------
# partitioned execution
# ---------------------------------------------------------------------------


def block_sizes(n: int, block_size: int = DEFAULT_BLOCK_SIZE) -> list[int]:
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    full, rest = divmod(n, block_size)
    return [block_size] * full + ([rest] if rest else [])


def _run_block(fn, count, seed, stream_id):
    return fn(count, RandomStream(seed, stream_id))


def blocked_map(
    fn: Callable[[int, RandomStream], T],
    n: int,
    rng: RandomStream,
    *,
    block_size: int = DEFAULT_BLOCK_SIZE,
    workers: int = 1,
) -> list[T]:
    """Evaluate ``fn(count, stream)`` over fixed-size blocks covering ``n`` samples.

    Block ``b`` always receives ``rng.spawn(b)``, so the returned list (in
    block order) is identical for any ``workers`` value. ``fn`` must be
    picklable when ``workers > 1``.
    """
    sizes = block_sizes(n, block_size)
    ids = [child_stream_id(rng.stream_id, b) for b in range(len(sizes))]
    if workers <= 1 or len(sizes) == 1:
        return [_run_block(fn, c, rng.seed, i) for c, i in zip(sizes, ids)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_block, fn, c, rng.seed, i) for c, i in zip(sizes, ids)]
        return [f.result() for f in futures]

"""State algebra for bipartite d x d systems.

Amplitudes are stored row-major: index ``k = i * d + j`` addresses the basis
vector ``|i>_A |j>_B``, so reshaping a state vector to ``(d, d)`` yields its
coefficient matrix directly.

The array-level helpers (``schmidt_coefficients``, ``entropy_from_schmidt``,
``overlap_sq``, ``partial_trace`` ...) accept arbitrary leading batch axes and
are what the Monte Carlo drivers use. The object-level functions
(``fidelity_pure_pure``, ``reduced_state`` ...) validate their inputs and
operate on single states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from . import tolerances as tol

Side = Literal["A", "B"]


class DimensionMismatchError(ValueError):
    """Two objects live on incompatible Hilbert spaces."""


class InvalidStateError(ValueError):
    """Data does not describe a valid state (norm, trace, positivity ...)."""


class NotUnitaryError(ValueError):
    """A matrix expected to be unitary is not, within tolerance."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def _local_dim_from_size(n: int) -> int:
    d = math.isqrt(n)
    if d * d != n or d < 2:
        raise DimensionMismatchError(
            f"length {n} is not the square of a local dimension >= 2"
        )
    return d


def _check_side(side: str) -> None:
    if side not in ("A", "B"):
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")


@dataclass(frozen=True)
class PureState:
    """Normalized pure state of two d-level systems."""

    amplitudes: np.ndarray
    local_dim: int = field(default=0)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).ravel()
        d = self.local_dim or _local_dim_from_size(amps.size)
        if d < 2:
            raise DimensionMismatchError(f"local dimension must be >= 2, got {d}")
        if amps.size != d * d:
            raise DimensionMismatchError(
                f"expected {d * d} amplitudes for local dimension {d}, got {amps.size}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > tol.NORM_ATOL:
            raise InvalidStateError(f"state norm is {norm!r}, expected 1")
        object.__setattr__(self, "amplitudes", _frozen(amps))
        object.__setattr__(self, "local_dim", d)

    @classmethod
    def from_vector(cls, vec, local_dim: int | None = None) -> "PureState":
        """Build a state from an unnormalized vector."""
        vec = np.asarray(vec, dtype=complex).ravel()
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise InvalidStateError("cannot normalize the zero vector")
        return cls(vec / norm, local_dim or 0)

    @classmethod
    def basis(cls, d: int, i: int, j: int) -> "PureState":
        amps = np.zeros(d * d, dtype=complex)
        amps[i * d + j] = 1.0
        return cls(amps, d)

    @classmethod
    def from_schmidt(cls, coefficients) -> "PureState":
        """``sum_n s_n |n>|n>`` for the given Schmidt coefficients."""
        s = np.asarray(coefficients, dtype=float)
        d = s.size
        amps = np.zeros(d * d, dtype=complex)
        amps[np.arange(d) * (d + 1)] = s
        return cls(amps, d)

    @classmethod
    def max_entangled(cls, d: int) -> "PureState":
        return cls.from_schmidt(np.full(d, 1.0 / math.sqrt(d)))

    @property
    def coefficient_matrix(self) -> np.ndarray:
        return self.amplitudes.reshape(self.local_dim, self.local_dim)

    def projector(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), self.local_dim)


@dataclass(frozen=True)
class DensityMatrix:
    """Mixed state, either of one d-level system or of a d x d pair.

    ``local_dim`` is the dimension of a single party. The matrix is
    ``d x d`` for a single party and ``d^2 x d^2`` for the bipartite case.
    """

    entries: np.ndarray
    local_dim: int

    def __post_init__(self):
        rho = np.asarray(self.entries, dtype=complex)
        d = self.local_dim
        if d < 2:
            raise DimensionMismatchError(f"local dimension must be >= 2, got {d}")
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] not in (d, d * d):
            raise DimensionMismatchError(
                f"shape {rho.shape} is incompatible with local dimension {d}"
            )
        if np.max(np.abs(rho - rho.conj().T)) > tol.DENSITY_ATOL:
            raise InvalidStateError("density matrix is not Hermitian")
        tr = np.trace(rho)
        if abs(tr - 1.0) > tol.DENSITY_ATOL:
            raise InvalidStateError(f"trace is {tr!r}, expected 1")
        if np.linalg.eigvalsh(rho).min() < -tol.DENSITY_ATOL:
            raise InvalidStateError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "entries", _frozen(rho))

    @property
    def is_bipartite(self) -> bool:
        return self.entries.shape[0] == self.local_dim**2

    @classmethod
    def maximally_mixed(cls, d: int, bipartite: bool = True) -> "DensityMatrix":
        n = d * d if bipartite else d
        return cls(np.eye(n, dtype=complex) / n, d)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Schmidt coefficients, stored in descending order."""

    coefficients: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.coefficients, dtype=float).ravel()
        if s.size < 2:
            raise InvalidStateError("a Schmidt spectrum needs at least two coefficients")
        if np.any(s < 0):
            raise InvalidStateError("Schmidt coefficients must be nonnegative")
        if abs(np.sum(s * s) - 1.0) > tol.SCHMIDT_ATOL:
            raise InvalidStateError(f"sum of squared coefficients is {np.sum(s * s)!r}")
        object.__setattr__(self, "coefficients", _frozen(np.sort(s)[::-1]))

    @classmethod
    def from_gamma(cls, gamma: float) -> "SchmidtSpectrum":
        """Qubit spectrum ``(sqrt((1+g)/2), sqrt((1-g)/2))``."""
        if not 0.0 <= gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
        return cls(np.sqrt([(1 + gamma) / 2, (1 - gamma) / 2]))

    @classmethod
    def max_entangled(cls, d: int) -> "SchmidtSpectrum":
        return cls(np.full(d, 1.0 / math.sqrt(d)))

    @property
    def local_dim(self) -> int:
        return self.coefficients.size

    @property
    def probabilities(self) -> np.ndarray:
        return self.coefficients**2

    def entropy(self) -> float:
        return float(entropy_from_schmidt(self.coefficients))


# ---------------------------------------------------------------------------
# array-level helpers (batched over leading axes)
# ---------------------------------------------------------------------------


def schmidt_coefficients(amplitudes: np.ndarray, d: int) -> np.ndarray:
    """Singular values of the coefficient matrices, descending, shape ``(..., d)``."""
    amps = np.asarray(amplitudes)
    m = amps.reshape(amps.shape[:-1] + (d, d))
    return np.linalg.svd(m, compute_uv=False)


def entropy_from_probabilities(p: np.ndarray, base: float) -> np.ndarray:
    """Shannon entropy ``-sum p log_base p`` over the last axis, with 0 log 0 = 0."""
    p = np.asarray(p, dtype=float)
    safe = np.where(p > 0, p, 1.0)
    h = -np.sum(np.where(p > 0, p * np.log(safe), 0.0), axis=-1) / math.log(base)
    return np.clip(h, 0.0, 1.0)


def entropy_from_schmidt(s: np.ndarray) -> np.ndarray:
    """Entanglement entropy in base-d units from Schmidt coefficients ``(..., d)``."""
    s = np.asarray(s, dtype=float)
    return entropy_from_probabilities(s * s, base=s.shape[-1])


def overlap_sq(reference: np.ndarray, amplitudes: np.ndarray) -> np.ndarray:
    """``|<reference|psi>|^2`` for each state in a batch, clamped to [0, 1]."""
    f = np.abs(np.asarray(amplitudes) @ np.conj(reference)) ** 2
    return np.clip(f, 0.0, 1.0)


def expectation(reference: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Real part of ``<reference|rho|reference>`` for a stack of matrices."""
    val = np.einsum("i,...ij,j->...", np.conj(reference), rho, reference)
    return val.real


def apply_local(amplitudes: np.ndarray, ua: np.ndarray, ub: np.ndarray) -> np.ndarray:
    """Amplitudes of ``(Ua x Ub)|psi>``; broadcasts over leading axes."""
    amps = np.asarray(amplitudes)
    d = ua.shape[-1]
    m = amps.reshape(amps.shape[:-1] + (d, d))
    out = ua @ m @ np.swapaxes(ub, -1, -2)
    return out.reshape(out.shape[:-2] + (d * d,))


def partial_trace(rho: np.ndarray, d: int, keep: Side) -> np.ndarray:
    """Reduced ``(..., d, d)`` matrices of a stack of ``(..., d^2, d^2)`` states."""
    _check_side(keep)
    r = np.asarray(rho).reshape(rho.shape[:-2] + (d, d, d, d))
    if keep == "A":
        return np.einsum("...ijkj->...ik", r)
    return np.einsum("...ijil->...jl", r)


def unitarity_error(u: np.ndarray) -> float:
    u = np.asarray(u)
    eye = np.eye(u.shape[-1])
    return float(np.max(np.abs(np.swapaxes(u.conj(), -1, -2) @ u - eye)))


# ---------------------------------------------------------------------------
# object-level operations
# ---------------------------------------------------------------------------


def fidelity_pure_pure(a: PureState, b: PureState) -> float:
    """``|<a|b>|^2``."""
    if a.local_dim != b.local_dim:
        raise DimensionMismatchError(
            f"local dimensions differ: {a.local_dim} vs {b.local_dim}"
        )
    return float(overlap_sq(a.amplitudes, b.amplitudes))


def fidelity_pure_mixed(a: PureState, rho: DensityMatrix) -> float:
    """``<a|rho|a>`` for a pure reference against a bipartite mixed state."""
    if a.local_dim != rho.local_dim or not rho.is_bipartite:
        raise DimensionMismatchError(
            f"pure state on {a.local_dim}x{a.local_dim} vs density matrix of shape "
            f"{rho.entries.shape}"
        )
    val = np.vdot(a.amplitudes, rho.entries @ a.amplitudes)
    if abs(val.imag) > tol.IMAG_ATOL:
        raise InvalidStateError(f"<a|rho|a> has imaginary part {val.imag!r}")
    return float(np.clip(val.real, 0.0, 1.0))


def reduced_state(psi: PureState, keep: Side = "A") -> DensityMatrix:
    """Partial trace of ``|psi><psi|`` over the side not kept."""
    _check_side(keep)
    m = psi.coefficient_matrix
    # rho_A = M M^dagger, rho_B = M^T M^*
    rho = m @ m.conj().T if keep == "A" else m.T @ m.conj()
    return DensityMatrix(rho, psi.local_dim)


def schmidt_decompose(psi: PureState) -> SchmidtSpectrum:
    s = schmidt_coefficients(psi.amplitudes, psi.local_dim)
    # SVD output is already unit-norm up to rounding; renormalize to keep the
    # spectrum invariant tight for the SchmidtSpectrum constructor
    return SchmidtSpectrum(s / np.linalg.norm(s))


def entanglement_entropy(psi: PureState) -> float:
    """Von Neumann entropy of either reduced state, logarithm base d."""
    return float(entropy_from_schmidt(schmidt_coefficients(psi.amplitudes, psi.local_dim)))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Entropy of a single-party density matrix, logarithm base ``local_dim``."""
    if rho.is_bipartite:
        raise DimensionMismatchError("expected a single-party density matrix")
    ev = np.clip(rho.eigenvalues(), 0.0, None)
    return float(entropy_from_probabilities(ev, base=rho.local_dim))


def check_unitary(u: np.ndarray, d: int | None = None) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise NotUnitaryError(f"expected a square matrix, got shape {u.shape}")
    if d is not None and u.shape[0] != d:
        raise DimensionMismatchError(f"expected a {d}x{d} unitary, got {u.shape}")
    err = unitarity_error(u)
    if err > tol.UNITARY_ATOL:
        raise NotUnitaryError(f"max|U^dagger U - I| = {err:.3g}")
    return u


def apply_local_unitaries(psi: PureState, ua, ub) -> PureState:
    """``(Ua x Ub)|psi>``."""
    d = psi.local_dim
    ua = check_unitary(ua, d)
    ub = check_unitary(ub, d)
    out = apply_local(psi.amplitudes, ua, ub)
    return PureState(out / np.linalg.norm(out), d)

"""Closed-form fidelity distributions and the gamma <-> entropy map.

Three reference densities on f in [0, 1]:

``global``
    Fidelity of a Haar-random state in dimension D to any fixed state,
    ``(D-1)(1-f)^(D-2)``.
``sep-gamma``
    Two-qubit states with Schmidt coefficients ``sqrt((1 +/- gamma)/2)``
    measured against a product state.
``sep-maxent``
    Maximally entangled d x d states measured against a product state,
    ``d(d-1)(1-d f)^(d-2)`` on ``[0, 1/d]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from . import tolerances as tol

KINDS = ("global", "sep-gamma", "sep-maxent")


def _as_f(f, name="f"):
    arr = np.asarray(f, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError(f"{name} must lie in [0, 1]")
    return arr


def _scalar_or_array(result, like):
    return float(result) if np.ndim(like) == 0 else result


def _check_gamma(gamma: float) -> float:
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    return float(gamma)


def _check_int(value: int, name: str) -> int:
    if int(value) != value or value < 2:
        raise ValueError(f"{name} must be an integer >= 2, got {value}")
    return int(value)


def pdf_global(D: int, f):
    """Haar fidelity density ``(D-1)(1-f)^(D-2)`` in Hilbert dimension ``D``."""
    D = _check_int(D, "D")
    x = _as_f(f)
    return _scalar_or_array((D - 1) * (1.0 - x) ** (D - 2), f)


def pdf_sep_maxent(d: int, f):
    d = _check_int(d, "d")
    x = _as_f(f)
    inside = x <= 1.0 / d
    base = np.where(inside, 1.0 - d * x, 0.0)
    out = np.where(inside, d * (d - 1) * base ** (d - 2), 0.0)
    return _scalar_or_array(out, f)


def pdf_sep_gamma(gamma: float, f):
    """Separable-reference fidelity density for the two-qubit gamma ensemble.

    Constant ``ln((1+g)/(1-g)) / g`` up to ``(1-g)/2``, then
    ``ln((1+g)/(2f)) / g`` up to ``(1+g)/2``, and zero beyond. ``gamma == 0``
    falls back to :func:`pdf_sep_maxent` with ``d = 2``.
    """
    gamma = _check_gamma(gamma)
    if gamma == 0.0:
        return pdf_sep_maxent(2, f)
    x = _as_f(f)
    lo = (1.0 - gamma) / 2.0
    hi = (1.0 + gamma) / 2.0
    # ln((1+g)/(1-g)) = 2 atanh(g), accurate for small g
    plateau = 2.0 * math.atanh(gamma) / gamma if gamma < 1.0 else math.inf
    with np.errstate(divide="ignore"):
        tail = np.log((1.0 + gamma) / (2.0 * np.maximum(x, lo))) / gamma
    out = np.where(x <= lo, plateau, np.where(x < hi, tail, 0.0))
    return _scalar_or_array(out, f)


def gamma_to_entropy(gamma: float) -> float:
    """Binary entropy (bits) of ``(1 + gamma) / 2``."""
    gamma = _check_gamma(gamma)
    p = np.array([(1.0 + gamma) / 2.0, (1.0 - gamma) / 2.0])
    nz = p[p > 0]
    return float(min(1.0, max(0.0, -np.sum(nz * np.log2(nz)))))


def entropy_to_gamma(e: float) -> float:
    """Inverse of :func:`gamma_to_entropy` by bisection."""
    if not 0.0 <= e <= 1.0:
        raise ValueError(f"entropy must lie in [0, 1], got {e}")
    if e == 1.0:
        return 0.0
    if e == 0.0:
        return 1.0
    return optimize.bisect(lambda g: gamma_to_entropy(g) - e, 0.0, 1.0, xtol=1e-13, maxiter=200)


@dataclass(frozen=True)
class AnalyticPdf:
    """A tagged reference density with its CDF and support.

    ``param`` is the Hilbert dimension D for ``global``, gamma for
    ``sep-gamma`` and the local dimension d for ``sep-maxent``.
    """

    kind: str
    param: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "sep-gamma":
            _check_gamma(self.param)
        else:
            object.__setattr__(self, "param", _check_int(self.param, "dimension"))

    @classmethod
    def global_haar(cls, D: int) -> "AnalyticPdf":
        return cls("global", D)

    @classmethod
    def sep_gamma(cls, gamma: float) -> "AnalyticPdf":
        return cls("sep-gamma", float(gamma))

    @classmethod
    def sep_maxent(cls, d: int) -> "AnalyticPdf":
        return cls("sep-maxent", d)

    @property
    def support(self) -> tuple[float, float]:
        if self.kind == "global":
            return (0.0, 1.0)
        if self.kind == "sep-maxent":
            return (0.0, 1.0 / self.param)
        return (0.0, (1.0 + self.param) / 2.0 if self.param > 0 else 0.5)

    @property
    def breakpoints(self) -> list[float]:
        """Interior points where the density is not smooth."""
        if self.kind == "sep-gamma" and 0.0 < self.param < 1.0:
            return [(1.0 - self.param) / 2.0, (1.0 + self.param) / 2.0]
        return [p for p in self.support if 0.0 < p < 1.0]

    @property
    def mean_fidelity(self) -> float:
        """Exact mean: 1/D for ``global``, 1/d^2 for the separable-reference kinds."""
        if self.kind == "global":
            return 1.0 / self.param
        if self.kind == "sep-maxent":
            return 1.0 / self.param**2
        return 0.25

    def pdf(self, f):
        if self.kind == "global":
            return pdf_global(self.param, f)
        if self.kind == "sep-maxent":
            return pdf_sep_maxent(self.param, f)
        return pdf_sep_gamma(self.param, f)

    def cdf(self, f):
        return cdf(self, f)

    def describe(self) -> dict:
        name = {"global": "D", "sep-gamma": "gamma", "sep-maxent": "d"}[self.kind]
        return {"kind": self.kind, name: self.param}


def _cdf_sep_gamma(gamma: float, x: np.ndarray) -> np.ndarray:
    if gamma == 0.0:
        return _cdf_sep_maxent(2, x)
    lo = (1.0 - gamma) / 2.0
    hi = (1.0 + gamma) / 2.0
    c = 1.0 + gamma
    plateau = 2.0 * math.atanh(gamma) / gamma if gamma < 1.0 else 0.0

    def antideriv(t):
        # integral of ln(c / (2t)) dt = t ln(c / (2t)) + t, with 0 ln 0 = 0
        safe = np.where(t > 0, t, 1.0)
        return np.where(t > 0, t * np.log(c / (2.0 * safe)), 0.0) + t

    below = plateau * np.minimum(x, lo)
    middle = (antideriv(np.clip(x, lo, hi)) - antideriv(lo)) / gamma
    return np.clip(np.where(x >= hi, 1.0, below + middle), 0.0, 1.0)


def _cdf_sep_maxent(d: int, x: np.ndarray) -> np.ndarray:
    base = np.clip(1.0 - d * x, 0.0, 1.0)
    return np.where(x >= 1.0 / d, 1.0, 1.0 - base ** (d - 1))


def cdf(ref: AnalyticPdf, f):
    """Closed-form ``P(F <= f)`` for a reference density."""
    x = _as_f(f)
    if ref.kind == "global":
        out = 1.0 - (1.0 - x) ** (ref.param - 1)
    elif ref.kind == "sep-maxent":
        out = _cdf_sep_maxent(ref.param, x)
    else:
        out = _cdf_sep_gamma(ref.param, x)
    return _scalar_or_array(out, f)


def quad_moment(ref: AnalyticPdf, order: int = 0, upper: float = 1.0) -> float:
    """``integral_0^upper f^order pdf(f) df`` by adaptive quadrature.

    Integrates piecewise between breakpoints so each piece is smooth.
    """
    cuts = sorted({0.0, upper, *[b for b in ref.breakpoints if b < upper]})
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        val, _ = integrate.quad(
            lambda t: t**order * ref.pdf(t), a, b,
            epsabs=tol.QUAD_EPSABS, epsrel=1e-12, limit=200,
        )
        total += val
    return total


def cdf_by_quadrature(ref: AnalyticPdf, f: float) -> float:
    return quad_moment(ref, 0, upper=float(_as_f(f)))

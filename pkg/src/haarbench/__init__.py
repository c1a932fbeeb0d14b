"""Fidelity and entanglement statistics of Haar-random bipartite pure states."""

__version__ = "0.1.0"

from .analytic import (
    AnalyticPdf,
    cdf,
    entropy_to_gamma,
    gamma_to_entropy,
    pdf_global,
    pdf_sep_gamma,
    pdf_sep_maxent,
)
from .benchmark import (
    BenchmarkConfig,
    Histogram,
    analytic_histogram,
    benchmark_sweep,
    depolarize_local,
    empirical_histogram,
    js_divergence,
    kl_divergence,
    sample_noisy_fidelity,
)
from .quantum import (
    DensityMatrix,
    PureState,
    SchmidtSpectrum,
    apply_local_unitaries,
    entanglement_entropy,
    fidelity_pure_mixed,
    fidelity_pure_pure,
    reduced_state,
    schmidt_decompose,
)
from .sampling import (
    RandomStream,
    sample_fidelity_reduced,
    sample_gamma_state,
    sample_haar_state,
    sample_haar_unitary,
    sample_pb,
    sample_schmidt_fixed,
)

"""Numerical tolerances shared across the toolkit.

Every validity check reads its threshold from here so a single edit
changes the behaviour everywhere.
"""

#: Allowed deviation of a pure-state norm from 1.
NORM_ATOL = 1e-12

#: Entrywise Hermiticity, unit trace and PSD slack for density matrices.
DENSITY_ATOL = 1e-10

#: Allowed deviation of sum(s_i^2) from 1 for a Schmidt spectrum.
SCHMIDT_ATOL = 1e-10

#: ``max|U^dagger U - I|`` accepted for a unitary.
UNITARY_ATOL = 1e-10

#: Imaginary residue tolerated in <a|rho|a> before it is discarded.
IMAG_ATOL = 1e-10

#: Overshoot past 1 tolerated for fidelities and entropies before clamping.
RANGE_ATOL = 1e-12

#: Absolute tolerance for adaptive quadrature.
QUAD_EPSABS = 1e-10

#: Histogram mass normalization slack.
HIST_ATOL = 1e-9

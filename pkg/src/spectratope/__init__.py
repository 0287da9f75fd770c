"""Perron spectracones and spectratopes.

Membership tests for the cones and polytopes of spectra realized by a fixed
diagonalizing similarity, circulant and Kronecker constructions, Karpelevic
arcs of stochastic eigenvalues, and the 4-by-4 stochastic spectra region.
"""

from .exceptions import *  # noqa: F401,F403
from .numerics import DEFAULT_TOL, Tolerance
from .perron import (
    PerronSimilarity,
    SpectrumVector,
    check_necessary_conditions,
    halfspace_description,
    in_row_cone,
    in_row_polytope,
    in_spectracone,
    in_spectratope,
    is_ideal,
    is_perron_similarity,
    normalize,
    realizing_matrix,
)
from .circulants import (
    block_circulant_realizable,
    circulant,
    circulant_realizable,
    dft,
    klein_matrix,
    klein_perms,
    kron_similarity,
    walsh,
)
from .karpelevic import (
    classify_arc,
    farey_fractions,
    has_multiple_root,
    ito_polynomial,
    roots,
    theta_boundary,
    theta_contains,
    vandermonde_similarity,
)

__version__ = "0.1.0"

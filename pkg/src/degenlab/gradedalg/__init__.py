"""Exact graded linear algebra over weighted hypersurface rings."""

from .hilbert import HilbertSeries, RationalForm
from .homs import (
    ExactnessCertificate,
    certify_indecomposable,
    end_structure,
    finite_pd_hom_test,
    graded_piece,
    hilbert_series,
    hom_basis,
    hom_dim,
    localization_rank,
    verify_exact,
)
from .poly import Poly, format_fraction, parse_fraction
from .presentation import (
    GradedMatrix,
    Presentation,
    direct_sum,
    free_module,
    zero_matrix,
    zero_module,
)
from .ring import CatalogError, MinimalPrime, RingSpec

__all__ = [
    "CatalogError",
    "ExactnessCertificate",
    "GradedMatrix",
    "HilbertSeries",
    "MinimalPrime",
    "Poly",
    "Presentation",
    "RationalForm",
    "RingSpec",
    "certify_indecomposable",
    "direct_sum",
    "end_structure",
    "finite_pd_hom_test",
    "format_fraction",
    "free_module",
    "graded_piece",
    "hilbert_series",
    "hom_basis",
    "hom_dim",
    "localization_rank",
    "parse_fraction",
    "verify_exact",
    "zero_matrix",
    "zero_module",
]

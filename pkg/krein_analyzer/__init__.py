"""
Krein Extension Analyzer Package

Exact construction of the Krein boundary operator B_K for (-1)^n d^(2n)/dx^(2n)
on a finite interval, classification of self-adjoint extensions by their
negative squares, and numerical cross-checks through the Weyl function and
eigenvalue counting.
"""

__version__ = "1.0.0"

from .exact_linalg import RationalMatrix, InertiaTriple, invert, inertia, det_sign, parse_rational
from .triplet_core import TripletSpec, Polynomial, build_T, build_blocks, build_BK, gamma_matrices
from .extension_classify import ExtensionParams, negative_squares, canonical_extensions
from .weyl_numeric import weyl_M, weyl_limit_scan, friedrichs_divergence_check
from .spectral_scan import ScanConfig, count_negative_eigenvalues, positive_eigenvalues_in

__all__ = [
    'RationalMatrix',
    'InertiaTriple',
    'invert',
    'inertia',
    'det_sign',
    'parse_rational',
    'TripletSpec',
    'Polynomial',
    'build_T',
    'build_blocks',
    'build_BK',
    'gamma_matrices',
    'ExtensionParams',
    'negative_squares',
    'canonical_extensions',
    'weyl_M',
    'weyl_limit_scan',
    'friedrichs_divergence_check',
    'ScanConfig',
    'count_negative_eigenvalues',
    'positive_eigenvalues_in',
]

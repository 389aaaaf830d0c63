"""
Extension Classification Module

Self-adjoint extensions A_{C,D} = A* restricted to ker(D Gamma_1 - C Gamma_0):
- Validation of the parameter pair (C, D)
- The classification matrix C D* - D B_K D*
- Exact count of negative squares (with multiplicity) via inertia
- The canonical Krein and Friedrichs parameter pairs

All matrices are exact rationals; there is no floating path here.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

from .errors import DimensionMismatch, InvalidExtension
from .exact_linalg import RationalMatrix, det_sign, inertia, rank
from .triplet_core import build_BK

log = logging.getLogger(__name__)


class PosdefVerdict(str, Enum):
    POSITIVE_DEFINITE = "positive_definite"
    NOT_POSITIVE_DEFINITE = "not_positive_definite"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class ExtensionParams:
    """Boundary condition D Gamma_1 f = C Gamma_0 f, with C and D both 2n x 2n."""

    C: RationalMatrix
    D: RationalMatrix

    @property
    def dimension(self):
        return self.C.rows

    def to_dict(self):
        return {"C": self.C.to_json(), "D": self.D.to_json()}


@dataclass(frozen=True)
class ClassificationReport:
    kappa: int
    classifier_inertia: object
    nonnegative: bool
    posdef_verdict: PosdefVerdict
    classification_matrix: RationalMatrix

    def to_dict(self):
        return {
            "kappa": self.kappa,
            "inertia": self.classifier_inertia.to_dict(),
            "nonnegative": self.nonnegative,
            "posdef_verdict": self.posdef_verdict.value,
            "classification_matrix": self.classification_matrix.to_json(),
        }


class CanonicalExtensions(NamedTuple):
    krein: ExtensionParams
    friedrichs: ExtensionParams


def _check_shapes(params, spec=None):
    c, d = params.C, params.D
    if not c.is_square or not d.is_square:
        raise DimensionMismatch(f"C and D must be square, got {c.shape} and {d.shape}")
    if c.shape != d.shape:
        raise DimensionMismatch(f"C and D must have the same size, got {c.shape} and {d.shape}")
    if spec is not None and c.rows != spec.dimension:
        raise DimensionMismatch(
            f"C and D must be {spec.dimension}x{spec.dimension} for n={spec.n}, got {c.shape}"
        )


def validate_CD(params, spec=None):
    """
    Check the self-adjointness conditions C D* = D C* and rank [C | D] = 2n.

    Args:
        params: ExtensionParams
        spec: Optional TripletSpec; when given, the size must be 2n

    Returns:
        list: Violated conditions, empty when the pair is admissible

    Raises:
        DimensionMismatch: If C, D are not square of the same size
    """
    _check_shapes(params, spec)
    c, d = params.C, params.D
    violations = []

    if c @ d.T != d @ c.T:
        violations.append("symmetry: C D* != D C*")

    joint_rank = rank(RationalMatrix.from_blocks([[c, d]])) if c.rows else 0
    if joint_rank != c.rows:
        violations.append(f"rank: rank [C | D] = {joint_rank}, expected {c.rows}")

    if violations:
        log.debug("extension parameters rejected: %s", violations)
    return violations


def ensure_valid(params, spec=None):
    """Raise InvalidExtension listing every violated condition."""
    violations = validate_CD(params, spec)
    if violations:
        raise InvalidExtension(violations)
    return params


def classification_matrix(params, spec, bk=None):
    """
    C D* - D B_K D*, whose inertia carries the negative squares of A_{C,D}.

    Raises:
        InvalidExtension: If (C, D) is not admissible
        DimensionMismatch: If the size is not 2n
    """
    ensure_valid(params, spec)
    bk = bk or build_BK(spec)
    c, d = params.C, params.D
    return c @ d.T - d @ bk @ d.T


def negative_squares(params, spec):
    """
    Exact classification of A_{C,D}.

    kappa is the number of negative eigenvalues of the classification matrix,
    counted with multiplicity. The positive-definiteness verdict is only
    decided for exactly invertible D; for singular D it is indeterminate.

    Args:
        params: ExtensionParams
        spec: TripletSpec

    Returns:
        ClassificationReport
    """
    matrix = classification_matrix(params, spec)
    counts = inertia(matrix)

    if det_sign(params.D) == 0:
        verdict = PosdefVerdict.INDETERMINATE
    elif counts.n_pos == counts.dimension:
        verdict = PosdefVerdict.POSITIVE_DEFINITE
    else:
        verdict = PosdefVerdict.NOT_POSITIVE_DEFINITE

    log.debug("classified extension for n=%d: inertia %s, verdict %s", spec.n, counts, verdict.value)
    return ClassificationReport(
        kappa=counts.n_neg,
        classifier_inertia=counts,
        nonnegative=counts.n_neg == 0,
        posdef_verdict=verdict,
        classification_matrix=matrix,
    )


def from_symmetric(b_matrix):
    """Parameters (C, D) = (B, I) of A* restricted to ker(Gamma_1 - B Gamma_0)."""
    return ExtensionParams(RationalMatrix(b_matrix), RationalMatrix.identity(b_matrix.rows))


def canonical_extensions(spec):
    """Krein (C = B_K, D = I) and Friedrichs (C = I, D = 0) parameters."""
    size = spec.dimension
    krein = from_symmetric(build_BK(spec))
    friedrichs = ExtensionParams(RationalMatrix.identity(size), RationalMatrix.zeros(size))
    return CanonicalExtensions(krein, friedrichs)

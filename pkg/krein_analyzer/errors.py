"""
Error Types Module

Exception hierarchy shared by the exact and numerical modules. Library code
raises these; only the command-line layer turns them into exit codes.
"""


class KreinError(Exception):
    """Base class for every error raised by the analyzer."""


class InvalidInput(KreinError, ValueError):
    """Malformed or inconsistent user input (rationals, orders, files)."""


class InvalidInterval(InvalidInput):
    """The interval endpoints do not satisfy a < b."""


class DimensionMismatch(InvalidInput):
    """Matrix shapes are incompatible with the requested operation."""


class InvalidExtension(InvalidInput):
    """A (C, D) pair violates the self-adjointness conditions.

    Attributes:
        violations: List of human-readable descriptions, one per failed condition
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations) or "invalid extension parameters")


class SingularMatrix(KreinError, ArithmeticError):
    """Exact elimination met a column without a nonzero pivot."""


class NotSymmetric(KreinError, ValueError):
    """A matrix expected to be symmetric is not, in exact arithmetic."""


class NonFinite(KreinError, ArithmeticError):
    """A floating-point computation overflowed or produced NaN."""


class NearSingularG0(KreinError, ArithmeticError):
    """Gamma_0 of the solution basis is numerically singular.

    Raised when the spectral parameter sits on (or too close to) an eigenvalue
    of the Dirichlet realization, where the Weyl function has a pole.
    """

    def __init__(self, z, cond):
        self.z = z
        self.cond = cond
        super().__init__(f"G0 is near singular at z={z} (condition number {cond:.3e})")


class InternalDefect(KreinError, RuntimeError):
    """A property that always holds for B_K and its blocks failed; the computation is broken."""

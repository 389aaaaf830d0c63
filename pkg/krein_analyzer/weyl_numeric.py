"""
Weyl Function Module

Floating-point evaluation of the Weyl function M(z) = G1(z) G0(z)^-1:
- Companion first-order system for (-1)^n y^(2n) = z y
- Fundamental (jet transport) matrix by scaling-and-squaring exponential
- Weyl function samples with conditioning diagnostics
- M on the negative half-line by interval doubling
- Limit behaviour: convergence to B_K as x -> 0- and divergence as x -> -inf
- Matrix monotonicity of M on the negative half-line
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
import pandas as pd
import scipy.linalg as la

from .errors import InvalidInput, NearSingularG0, NonFinite
from .triplet_core import TripletSpec, build_BK, gamma_matrices

log = logging.getLogger(__name__)

# G0 (row-equilibrated) condition number above which z is treated as a pole
NEAR_SINGULAR_COND = 1e12

# Relative tolerance for the symmetry of M at real z
SYMMETRY_RTOL = 1e-10

# Relative tolerance for semidefiniteness of M(x2) - M(x1)
MONOTONICITY_TOL = 1e-9


def _spectral_parameter(z):
    """Real z stays a Python float; genuinely complex z stays complex."""
    if isinstance(z, complex):
        return z if z.imag != 0 else float(z.real)
    if isinstance(z, Fraction):
        return float(z)
    try:
        value = complex(z)
    except (TypeError, ValueError):
        raise InvalidInput(f"Spectral parameter must be a number, got {z!r}") from None
    if not np.isfinite(value.real) or not np.isfinite(value.imag):
        raise InvalidInput(f"Spectral parameter must be finite, got {z!r}")
    return value if value.imag != 0 else float(value.real)


@dataclass(frozen=True)
class CompanionSystem:
    """
    First-order form Y' = K Y of (-1)^n y^(2n) = z y on ascending jets.

    K has ones on the superdiagonal and (-1)^n z in the bottom-left corner.
    """

    n: int
    z: complex
    matrix: np.ndarray


def companion_system(n, z):
    z = _spectral_parameter(z)
    size = 2 * n
    dtype = complex if isinstance(z, complex) else float
    matrix = np.zeros((size, size), dtype=dtype)
    matrix[np.arange(size - 1), np.arange(1, size)] = 1.0
    matrix[size - 1, 0] = (-1) ** n * z
    matrix.setflags(write=False)
    return CompanionSystem(n, z, matrix)


@lru_cache(maxsize=None)
def _float_gamma(n):
    """Float copies of Gamma_0 and Gamma_1; they depend on n only."""
    maps = gamma_matrices(TripletSpec(n, 0, 1))
    g0, g1 = maps.gamma0.to_float(), maps.gamma1.to_float()
    g0.setflags(write=False)
    g1.setflags(write=False)
    return g0, g1


def fundamental_matrix(spec, z):
    """
    Jet transport W(z) across (a, b) for solutions of (-1)^n y^(2n) = z y.

    Args:
        spec: TripletSpec
        z: Real or complex spectral parameter

    Returns:
        numpy.ndarray: 2n x 2n matrix mapping the ascending jet at a to the jet at b

    Raises:
        NonFinite: If the exponential overflows
    """
    system = companion_system(spec.n, z)
    with np.errstate(over="ignore", invalid="ignore"):
        transport = la.expm(float(spec.length) * system.matrix)
    if not np.all(np.isfinite(transport)):
        raise NonFinite(
            f"Jet transport overflowed for n={spec.n}, z={system.z}, b-a={spec.length}"
        )
    return transport


def solution_boundary_values(spec, z):
    """
    (G0(z), G1(z)) for the solution basis whose jets at a are the unit vectors.

    Returns:
        tuple: Two 2n x 2n arrays
    """
    transport = fundamental_matrix(spec, z)
    jets = np.vstack([np.eye(spec.dimension), transport])
    g0, g1 = _float_gamma(spec.n)
    return g0 @ jets, g1 @ jets


@dataclass(frozen=True)
class WeylSample:
    z: complex
    G0: np.ndarray
    G1: np.ndarray
    M: np.ndarray
    cond_G0: float

    def symmetry_defect(self):
        """||M - M^T|| / ||M|| in the Frobenius norm."""
        norm = np.linalg.norm(self.M)
        return float(np.linalg.norm(self.M - self.M.T) / norm) if norm else 0.0

    def to_dict(self):
        record = {"cond_G0": float(self.cond_G0)}
        if isinstance(self.z, complex):
            record["z"] = {"re": self.z.real, "im": self.z.imag}
            record["M"] = {"re": self.M.real.tolist(), "im": self.M.imag.tolist()}
        else:
            record["z"] = float(self.z)
            record["M"] = self.M.tolist()
        return record


def weyl_M(spec, z):
    """
    Evaluate the Weyl function at z.

    G0 is row-equilibrated before solving, so the condition estimate reflects
    how close z is to a Dirichlet eigenvalue rather than the growth of the
    solutions.

    Args:
        spec: TripletSpec
        z: Spectral parameter away from the Dirichlet spectrum

    Returns:
        WeylSample

    Raises:
        NearSingularG0: If the equilibrated G0 has condition number above 1e12
        NonFinite: If the transport or the solve overflows
    """
    z = _spectral_parameter(z)
    g0, g1 = solution_boundary_values(spec, z)

    scales = np.abs(g0).max(axis=1)
    if np.any(scales == 0):
        raise NearSingularG0(z, float("inf"))
    g0_scaled = g0 / scales[:, None]
    cond = float(np.linalg.cond(g0_scaled))
    if not np.isfinite(cond) or cond > NEAR_SINGULAR_COND:
        raise NearSingularG0(z, cond)

    weyl = np.linalg.solve(g0_scaled.T, g1.T).T / scales[None, :]
    if not np.all(np.isfinite(weyl)):
        raise NonFinite(f"Weyl function is not finite at z={z}")

    log.debug("M(%s) for n=%d: cond_G0=%.3e", z, spec.n, cond)
    return WeylSample(z, g0, g1, weyl, cond)


def _derivative_orders(n):
    """Derivative order read by each row of Gamma_0 and of Gamma_1."""
    orders0 = np.array(list(range(n)) * 2, dtype=float)
    orders1 = np.array(list(range(2 * n - 1, n - 1, -1)) * 2, dtype=float)
    return orders0, orders1


def _glue(left, right, n):
    """
    Weyl function of two adjacent intervals from the Weyl function of each.

    At the shared endpoint the Dirichlet data agree and the two Gamma_1
    blocks cancel; eliminating that data is a Schur complement.
    """
    a1, b1, e1, c1 = left[:n, :n], left[:n, n:], left[n:, :n], left[n:, n:]
    a2, b2, e2, c2 = right[:n, :n], right[:n, n:], right[n:, :n], right[n:, n:]
    solved = np.linalg.solve(c1 + a2, np.hstack([e1, b2]))
    via_left, via_right = solved[:, :n], solved[:, n:]
    return np.block([
        [a1 - b1 @ via_left, -b1 @ via_right],
        [-e2 @ via_left, c2 - e2 @ via_right],
    ])


def weyl_M_negative(spec, x):
    """
    M(x) for x < 0 by repeated interval doubling.

    The transport across (a, b) loses the decaying solutions once |x| is
    large. Here M is computed on a piece short enough that the transport is
    harmless, then glued to itself and rescaled until the piece covers
    (a, b). On the negative half-line every M is negative definite, so each
    gluing solves a well-conditioned system.

    Args:
        spec: TripletSpec
        x: Negative real spectral parameter

    Returns:
        numpy.ndarray: Symmetric 2n x 2n matrix M(x)
    """
    x = _spectral_parameter(x)
    if isinstance(x, complex) or not x < 0:
        raise InvalidInput(f"Doubling evaluation needs a negative real x, got {x}")
    n = spec.n
    length = float(spec.length)
    z = x * length ** (2 * n)
    rate = (-z) ** (1.0 / (2 * n))
    doublings = math.ceil(math.log2(rate)) if rate > 1 else 0

    weyl = weyl_M(TripletSpec(n, 0, 1), z / 4.0 ** (n * doublings)).M
    orders0, orders1 = _derivative_orders(n)
    up, down = 2.0 ** orders1, 2.0 ** -orders0
    for _ in range(doublings):
        weyl = up[:, None] * _glue(weyl, weyl, n) * down[None, :]
    weyl = (length ** -orders1)[:, None] * weyl * (length ** orders0)[None, :]
    if not np.all(np.isfinite(weyl)):
        raise NonFinite(f"Weyl function is not finite at x={x}")
    log.debug("M(%s) for n=%d by %d doubling(s)", x, n, doublings)
    return (weyl + weyl.T) / 2


def weyl_limit_scan(spec, exponents=range(7)):
    """
    Convergence of M(x) to B_K along x = -10^-k.

    Args:
        spec: TripletSpec
        exponents: Non-negative integers k

    Returns:
        pandas.DataFrame: Columns k, x, error (relative Frobenius), cond_G0
    """
    bk = build_BK(spec).to_float()
    bk_norm = np.linalg.norm(bk)
    rows = []
    for k in exponents:
        x = -(10.0 ** (-int(k)))
        sample = weyl_M(spec, x)
        error = np.linalg.norm(sample.M - bk) / bk_norm
        rows.append({"k": int(k), "x": x, "error": float(error), "cond_G0": sample.cond_G0})
    return pd.DataFrame(rows, columns=["k", "x", "error", "cond_G0"])


@dataclass(frozen=True)
class DivergenceReport:
    table: pd.DataFrame
    truncated: bool

    @property
    def strictly_decreasing(self):
        values = self.table["min_eigenvalue"].to_numpy()
        return bool(np.all(np.diff(values) < 0))


def _min_eigenvalue(matrix):
    return float(np.linalg.eigvalsh((matrix + matrix.T) / 2).min())


def friedrichs_divergence_check(spec, xs):
    """
    Minimum eigenvalue of M(x) along a decreasing negative sample.

    The values decrease without bound because the Dirichlet realization is the
    Friedrichs extension. Sampling stops at the first x whose transport
    overflows, and the report is flagged as truncated.

    Args:
        spec: TripletSpec
        xs: Strictly decreasing negative reals

    Returns:
        DivergenceReport
    """
    xs = [float(x) for x in xs]
    if not xs:
        raise InvalidInput("Divergence check needs at least one sample point")
    if any(x >= 0 for x in xs):
        raise InvalidInput(f"Sample points must be negative, got {xs}")
    if any(later >= earlier for earlier, later in zip(xs, xs[1:])):
        raise InvalidInput(f"Sample points must be strictly decreasing, got {xs}")

    rows = []
    truncated = False
    for x in xs:
        try:
            sample = weyl_M(spec, x)
        except NonFinite:
            log.debug("divergence sample truncated at x=%s", x)
            truncated = True
            break
        rows.append({"x": x, "min_eigenvalue": _min_eigenvalue(sample.M), "cond_G0": sample.cond_G0})
    return DivergenceReport(pd.DataFrame(rows, columns=["x", "min_eigenvalue", "cond_G0"]), truncated)


def monotonicity_margin(spec, x1, x2):
    """
    Smallest eigenvalue of M(x2) - M(x1), relative to ||M(x2)||_2.

    Weyl functions are increasing on the negative half-line, so the margin
    is >= -MONOTONICITY_TOL for x1 < x2 < 0.
    """
    x1, x2 = float(x1), float(x2)
    if not x1 < x2 < 0:
        raise InvalidInput(f"Need x1 < x2 < 0, got x1={x1}, x2={x2}")
    upper = weyl_M(spec, x2).M
    lower = weyl_M(spec, x1).M
    return _min_eigenvalue(upper - lower) / np.linalg.norm(upper, 2)

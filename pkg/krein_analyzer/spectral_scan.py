"""
Spectral Scan Module

Eigenvalues of A_{C,D} by shooting: lambda is an eigenvalue exactly when the
boundary matrix D G1(lambda) - C G0(lambda) is singular, with multiplicity
equal to its nullity.
- Characteristic determinant as (sign, log|det|)
- Negative eigenvalue count on a geometric grid, by bisection of the jumps
  of the eigenvalue counting function
- Exact kernel dimension at lambda = 0
- Positive eigenvalues in a window (checked against the Dirichlet spectrum)

Below zero G0(lambda) is invertible with a determinant of constant sign, so
the scan works with D M(lambda) - C instead of D G1 - C G0, and counts the
eigenvalues below lambda as the negative squares of C D* - D M(lambda) D*.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
import pandas as pd
from scipy.optimize import bisect, minimize_scalar

from .errors import InvalidInput, NonFinite
from .exact_linalg import RationalMatrix, rank
from .extension_classify import ensure_valid
from .triplet_core import gamma_matrices, taylor_transport
from .weyl_numeric import solution_boundary_values, weyl_M_negative

log = logging.getLogger(__name__)

# Default scan floor is -FLOOR_SCALE * (b-a)^(-2n)
FLOOR_SCALE = 1e4

# The negative grid ends at NEAR_ZERO_RATIO * lambda_min
NEAR_ZERO_RATIO = 1e-9

# A |det| dip must be this many decades below both cell ends to count
DIP_DECADES = 6.0

# log|det| used in place of -inf at exact zeros
LOG_DET_FLOOR = -1e4


@dataclass(frozen=True)
class ScanConfig:
    """
    Scan parameters.

    Attributes:
        lambda_min: Negative scan floor, or None for -1e4 * (b-a)^(-2n)
        grid_points: Number of grid points (at least 16)
        bisect_tol: Relative bisection tolerance, in (0, 1e-2)
        nullity_tol: Relative singular-value threshold, in (0, 1e-2)
    """

    lambda_min: Optional[float] = None
    grid_points: int = 600
    bisect_tol: float = 1e-12
    nullity_tol: float = 1e-8

    def __post_init__(self):
        if self.lambda_min is not None and not (np.isfinite(self.lambda_min) and self.lambda_min < 0):
            raise InvalidInput(f"lambda_min must be negative, got {self.lambda_min}")
        if int(self.grid_points) != self.grid_points or self.grid_points < 16:
            raise InvalidInput(f"grid_points must be an integer >= 16, got {self.grid_points}")
        for name in ("bisect_tol", "nullity_tol"):
            value = getattr(self, name)
            if not 0 < value < 1e-2:
                raise InvalidInput(f"{name} must lie in (0, 1e-2), got {value}")

    def floor_for(self, spec):
        if self.lambda_min is not None:
            return float(self.lambda_min)
        return -FLOOR_SCALE * float(spec.length) ** (-2 * spec.n)


class EigenvalueRoot(NamedTuple):
    value: float
    nullity: int


@dataclass(frozen=True)
class ScanReport:
    negative_count: int
    roots: tuple
    kernel_dim_at_zero: int
    lambda_min: float
    warnings: tuple = field(default_factory=tuple)

    def to_dict(self):
        return {
            "negative_count": self.negative_count,
            "roots": [{"lambda": r.value, "nullity": r.nullity} for r in self.roots],
            "kernel_dim_at_zero": self.kernel_dim_at_zero,
            "lambda_min": self.lambda_min,
            "warnings": list(self.warnings),
        }


def boundary_matrix(params, spec, lam):
    """
    D G1(lambda) - C G0(lambda) for admissible (C, D).

    This is the unit-jet form; the scans below zero use D M(lambda) - C.

    Raises:
        NonFinite: For lambda so negative that the transport overflows
    """
    return _CharacteristicFunction(params, spec).matrix(lam)


class _CharacteristicFunction:
    """Float copies of C and D bound to one spec, evaluated along a grid."""

    def __init__(self, params, spec):
        self.spec = spec
        self.c = params.C.to_float()
        self.d = params.D.to_float()
        self._term_norms = (np.linalg.norm(self.d, 2), np.linalg.norm(self.c, 2))
        # Orthonormal basis of range(D); ker D* adds nothing to C D* - D M D*
        left, _, _ = np.linalg.svd(self.d)
        self._range_d = left[:, :rank(params.D)]

    def matrix(self, lam):
        g0, g1 = solution_boundary_values(self.spec, float(lam))
        return self.d @ g1 - self.c @ g0

    def _evaluated(self, lam):
        """Characteristic matrix at lam with the reference scale for its singular values."""
        lam = float(lam)
        d_norm, c_norm = self._term_norms
        if lam < 0:
            weyl = weyl_M_negative(self.spec, lam)
            return self.d @ weyl - self.c, d_norm * np.linalg.norm(weyl, 2) + c_norm
        g0, g1 = solution_boundary_values(self.spec, lam)
        scale = d_norm * np.linalg.norm(g1, 2) + c_norm * np.linalg.norm(g0, 2)
        return self.d @ g1 - self.c @ g0, scale

    def slogdet(self, lam):
        sign, logabs = np.linalg.slogdet(self._evaluated(lam)[0])
        if sign == 0:
            return 0.0, -math.inf
        if not np.isfinite(logabs):
            raise NonFinite(f"Characteristic determinant is not finite at lambda={lam}")
        return float(sign), float(logabs)

    def sign(self, lam):
        return self.slogdet(lam)[0]

    def floored_log(self, lam):
        return max(self.slogdet(lam)[1], LOG_DET_FLOOR)

    def nullity(self, lam, tol):
        matrix, scale = self._evaluated(lam)
        singular_values = np.linalg.svd(matrix, compute_uv=False)
        return int(np.sum(singular_values <= tol * scale))

    def count_below(self, lam):
        """Eigenvalues of A_{C,D} strictly below lam < 0, with multiplicity."""
        if self._range_d.shape[1] == 0:
            return 0
        weyl = weyl_M_negative(self.spec, lam)
        form = self.c @ self.d.T - self.d @ weyl @ self.d.T
        reduced = self._range_d.T @ form @ self._range_d
        return int(np.sum(np.linalg.eigvalsh((reduced + reduced.T) / 2) < 0))


def char_det(params, spec, lam):
    """
    Sign and natural log-magnitude of the characteristic determinant.

    For lambda >= 0 this is det(D G1 - C G0). Below zero it is det(D M - C),
    which differs from it by the factor det G0, nonzero and of one sign there.

    Returns:
        tuple: (sign in {-1.0, 0.0, 1.0}, log|det|); log|det| is -inf at an exact zero
    """
    return _CharacteristicFunction(params, spec).slogdet(lam)


def numerical_nullity(params, spec, lam, tol=1e-8):
    """
    Number of singular values of the characteristic matrix at or below tol
    times its reference scale: ||D|| ||G1|| + ||C|| ||G0|| for lambda >= 0,
    ||D|| ||M|| + ||C|| below zero.
    """
    return _CharacteristicFunction(params, spec).nullity(lam, tol)


def negative_grid(spec, config):
    """Geometric grid from lambda_min up to 1e-9 * lambda_min, ascending."""
    floor = config.floor_for(spec)
    return -np.geomspace(-floor, -floor * NEAR_ZERO_RATIO, int(config.grid_points))


def window_grid(lam_lo, lam_hi, config):
    return np.linspace(lam_lo, lam_hi, int(config.grid_points))


def _evaluate_grid(function, grid, warnings):
    signs = np.full(len(grid), np.nan)
    logs = np.full(len(grid), np.nan)
    for i, lam in enumerate(grid):
        try:
            signs[i], logs[i] = function.slogdet(lam)
        except NonFinite as exc:
            warnings.append(f"grid point lambda={lam:.6g} skipped: {exc}")
    return signs, logs


def _locate_roots(function, grid, config, warnings):
    """Bisect every sign change, then refine interior |det| dips."""
    signs, logs = _evaluate_grid(function, grid, warnings)
    roots = []
    sign_change_cells = set()

    for i, lam in enumerate(grid):
        if signs[i] == 0:
            roots.append((float(lam), True))

    for i in range(len(grid) - 1):
        left, right = signs[i], signs[i + 1]
        if np.isnan(left) or np.isnan(right) or left * right >= 0:
            continue
        sign_change_cells.add(i)
        lo, hi = float(grid[i]), float(grid[i + 1])
        xtol = config.bisect_tol * max(abs(lo), abs(hi))
        roots.append((bisect(function.sign, lo, hi, xtol=xtol), True))

    depth = DIP_DECADES * math.log(10.0)
    for i in range(1, len(grid) - 1):
        window = logs[i - 1:i + 2]
        if np.any(np.isnan(window)) or not (window[1] < window[0] and window[1] < window[2]):
            continue
        if i - 1 in sign_change_cells or i in sign_change_cells or signs[i] == 0:
            continue
        lo, hi = float(grid[i - 1]), float(grid[i + 1])
        xtol = config.bisect_tol * max(abs(lo), abs(hi))
        try:
            result = minimize_scalar(
                function.floored_log, bounds=(lo, hi), method="bounded", options={"xatol": xtol}
            )
        except NonFinite as exc:
            warnings.append(f"refinement near lambda={grid[i]:.6g} failed: {exc}")
            continue
        if min(window[0], window[2]) - result.fun > depth:
            roots.append((float(result.x), False))

    located = []
    for value, from_sign_change in sorted(roots):
        nullity = function.nullity(value, config.nullity_tol)
        if from_sign_change:
            located.append(EigenvalueRoot(value, max(nullity, 1)))
        elif nullity >= 1:
            located.append(EigenvalueRoot(value, nullity))
        else:
            log.debug("rejected |det| dip at lambda=%.12g (numerical nullity 0)", value)
    return located, signs


def _isolate_negative_roots(function, grid, config, warnings):
    """
    Split every jump of the counting function down to bisect_tol.

    A cell holding several eigenvalues is found even when det keeps its
    sign across it; each located root carries the size of its jump.
    """
    counts = [function.count_below(lam) for lam in grid]
    pending = []
    for i in range(len(grid) - 1):
        if counts[i + 1] < counts[i]:
            warnings.append(
                f"eigenvalue count drops from {counts[i]} to {counts[i + 1]} "
                f"between lambda={grid[i]:.6g} and {grid[i + 1]:.6g}"
            )
        elif counts[i + 1] > counts[i]:
            pending.append((float(grid[i]), float(grid[i + 1]), counts[i], counts[i + 1]))

    roots = []
    while pending:
        lo, hi, below_lo, below_hi = pending.pop()
        if hi - lo <= config.bisect_tol * max(abs(lo), abs(hi)):
            value = 0.5 * (lo + hi)
            multiplicity = below_hi - below_lo
            nullity = function.nullity(value, config.nullity_tol)
            if nullity != multiplicity:
                log.debug("root at lambda=%.12g: count jump %d, numerical nullity %d",
                          value, multiplicity, nullity)
            roots.append(EigenvalueRoot(value, multiplicity))
            continue
        mid = 0.5 * (lo + hi)
        below_mid = min(max(function.count_below(mid), below_lo), below_hi)
        if below_mid > below_lo:
            pending.append((lo, mid, below_lo, below_mid))
        if below_hi > below_mid:
            pending.append((mid, hi, below_mid, below_hi))
    return sorted(roots), counts


def kernel_dimension_at_zero(params, spec):
    """
    Exact nullity of D G1(0) - C G0(0).

    At lambda = 0 the jet transport is the rational matrix W(0), so G0(0)
    and G1(0) are exact and the rank is computed without any threshold.
    """
    ensure_valid(params, spec)
    jets = RationalMatrix.from_blocks([[RationalMatrix.identity(spec.dimension)], [taylor_transport(spec)]])
    g0, g1 = gamma_matrices(spec).apply(jets)
    return spec.dimension - rank(params.D @ g1 - params.C @ g0)


def count_negative_eigenvalues(params, spec, config=None):
    """
    Count eigenvalues of A_{C,D} in [lambda_min, 0), with multiplicity.

    Args:
        params: ExtensionParams
        spec: TripletSpec
        config: ScanConfig, defaults applied when None

    Returns:
        ScanReport: Roots below zero, their nullities and any warnings
    """
    config = config or ScanConfig()
    ensure_valid(params, spec)
    function = _CharacteristicFunction(params, spec)
    grid = negative_grid(spec, config)
    warnings = []

    roots, counts = _isolate_negative_roots(function, grid, config, warnings)
    floor = float(grid[0])
    if counts[0] > 0:
        warnings.append(
            f"{counts[0]} eigenvalue(s) lie below lambda_min={floor:.6g}; "
            f"the negative count is a lower bound"
        )

    negatives = tuple(roots)
    report = ScanReport(
        negative_count=sum(r.nullity for r in negatives),
        roots=negatives,
        kernel_dim_at_zero=kernel_dimension_at_zero(params, spec),
        lambda_min=floor,
        warnings=tuple(warnings),
    )
    log.debug(
        "negative scan for n=%d on %d points: %d root(s), count %d",
        spec.n, len(grid), len(negatives), report.negative_count,
    )
    return report


def positive_eigenvalues_in(params, spec, lam_lo, lam_hi, config=None):
    """
    Eigenvalues of A_{C,D} in the open window (lam_lo, lam_hi), 0 < lam_lo.

    Returns:
        list: EigenvalueRoot entries in ascending order
    """
    config = config or ScanConfig()
    lam_lo, lam_hi = float(lam_lo), float(lam_hi)
    if not 0 < lam_lo < lam_hi:
        raise InvalidInput(f"Need 0 < lambda_lo < lambda_hi, got ({lam_lo}, {lam_hi})")
    ensure_valid(params, spec)
    function = _CharacteristicFunction(params, spec)
    warnings = []
    roots, _ = _locate_roots(function, window_grid(lam_lo, lam_hi, config), config, warnings)
    for message in warnings:
        log.warning(message)
    return [r for r in roots if lam_lo < r.value < lam_hi]


def grid_dump(params, spec, grid):
    """
    Characteristic determinant along a grid, for external plotting.

    Returns:
        pandas.DataFrame: Columns lambda, sign, log_abs_det (NaN where evaluation failed)
    """
    function = _CharacteristicFunction(params, spec)
    grid = np.asarray(grid, dtype=float)
    signs, logs = _evaluate_grid(function, grid, [])
    return pd.DataFrame({"lambda": grid, "sign": signs, "log_abs_det": logs})

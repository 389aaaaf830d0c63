"""
Exact Linear Algebra Module

Rational scalars and dense rational matrices, with the exact elimination
routines every exact computation of the analyzer relies on:
- Parsing and formatting of rationals ("p/q", finite decimals)
- Inversion by Gauss-Jordan elimination
- Rank and determinant by Gaussian elimination
- Inertia by symmetric congruence (Sylvester's law of inertia)

Entries are `fractions.Fraction` values held in read-only numpy object arrays,
so every arithmetic result is already reduced with a positive denominator.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
import numbers

import numpy as np

from .errors import DimensionMismatch, InvalidInput, NotSymmetric, SingularMatrix

log = logging.getLogger(__name__)


def parse_rational(value):
    """
    Convert a user-supplied value into an exact rational.

    Accepted: integers, Fractions, and strings holding "p/q" or a decimal
    literal with a finite expansion ("0.25", "-1.5e3"). Binary floats are
    rejected so that exact paths stay exact.

    Args:
        value: int, Fraction or str

    Returns:
        Fraction: The exact value

    Raises:
        InvalidInput: If the value is a float, a bool, or an unparsable string
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InvalidInput(f"Not a rational number: {value!r}")
    if isinstance(value, numbers.Integral):
        return Fraction(int(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise InvalidInput(f"Malformed rational: {value!r}") from None
    if isinstance(value, numbers.Rational):
        return Fraction(value.numerator, value.denominator)
    raise InvalidInput(
        f"Binary floats are not accepted as rationals: {value!r} "
        "(pass a string such as '1/3' or '0.25')"
    )


def format_rational(value):
    """Render a rational as "p/q", or "p" when the denominator is 1."""
    return str(Fraction(value))


_to_fraction = np.frompyfunc(parse_rational, 1, 1)


class RationalMatrix:
    """
    Immutable dense matrix of exact rationals.

    Supports `@`, `+`, `-`, unary minus and scaling by a rational. Equality is
    structural (same shape, equal entries) because entries are canonical.
    """

    __slots__ = ("_data",)

    def __init__(self, entries):
        if isinstance(entries, RationalMatrix):
            array = entries._data
        else:
            try:
                array = np.array(entries, dtype=object)
            except ValueError as exc:
                raise DimensionMismatch(f"Ragged matrix rows: {exc}") from None
            if array.size == 0:
                array = np.empty((0, 0) if array.ndim < 2 else array.shape, dtype=object)
            if array.ndim != 2:
                raise DimensionMismatch(f"Expected a 2-D matrix, got {array.ndim} dimension(s)")
            array = _to_fraction(array).astype(object) if array.size else array
        data = np.array(array, dtype=object, copy=True)
        data.setflags(write=False)
        self._data = data

    # Constructors

    @classmethod
    def identity(cls, n):
        return cls([[Fraction(int(i == j)) for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows, cols=None):
        cols = rows if cols is None else cols
        return cls([[Fraction(0)] * cols for _ in range(rows)])

    @classmethod
    def diagonal(cls, values):
        values = [parse_rational(v) for v in values]
        n = len(values)
        return cls([[values[i] if i == j else Fraction(0) for j in range(n)] for i in range(n)])

    @classmethod
    def exchange(cls, n):
        """Anti-identity (reversal) matrix: ones on the anti-diagonal."""
        return cls([[Fraction(int(i + j == n - 1)) for j in range(n)] for i in range(n)])

    @classmethod
    def from_blocks(cls, blocks):
        """Assemble a block matrix from a nested list of RationalMatrix blocks."""
        return cls(np.block([[block._data for block in row] for row in blocks]))

    @classmethod
    def from_json(cls, obj):
        """
        Parse the {"rows": r, "cols": c, "data": [[...]]} encoding.

        Raises:
            InvalidInput: If fields are missing or the data disagrees with rows/cols
        """
        try:
            rows, cols, data = obj["rows"], obj["cols"], obj["data"]
        except (KeyError, TypeError):
            raise InvalidInput("Matrix must be an object with 'rows', 'cols' and 'data'") from None
        if len(data) != rows or any(len(row) != cols for row in data):
            raise DimensionMismatch(f"Matrix data does not match declared shape {rows}x{cols}")
        if rows == 0:
            return cls.zeros(0, cols)
        return cls(data)

    # Shape and access

    @property
    def shape(self):
        return self._data.shape

    @property
    def rows(self):
        return self._data.shape[0]

    @property
    def cols(self):
        return self._data.shape[1]

    @property
    def is_square(self):
        return self.rows == self.cols

    @property
    def T(self):
        return RationalMatrix(self._data.T)

    def __getitem__(self, index):
        i, j = index
        return self._data[i, j]

    def tolist(self):
        return [list(row) for row in self._data]

    def to_float(self):
        return np.array(self._data, dtype=float)

    def to_json(self):
        return {
            "rows": self.rows,
            "cols": self.cols,
            "data": [[format_rational(v) for v in row] for row in self._data],
        }

    def is_symmetric(self):
        return self.is_square and bool(np.all(self._data == self._data.T))

    def is_zero(self):
        return bool(np.all(self._data == 0))

    # Arithmetic

    def _check_same_shape(self, other, op):
        if self.shape != other.shape:
            raise DimensionMismatch(f"Cannot {op} matrices of shapes {self.shape} and {other.shape}")

    def __matmul__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise DimensionMismatch(f"Cannot multiply {self.shape} by {other.shape}")
        if self.cols == 0:
            return RationalMatrix.zeros(self.rows, other.cols)
        return RationalMatrix(self._data @ other._data)

    def __add__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        self._check_same_shape(other, "add")
        return RationalMatrix(self._data + other._data)

    def __sub__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        self._check_same_shape(other, "subtract")
        return RationalMatrix(self._data - other._data)

    def __neg__(self):
        return RationalMatrix(-self._data)

    def __mul__(self, scalar):
        if isinstance(scalar, RationalMatrix):
            return NotImplemented
        return RationalMatrix(self._data * parse_rational(scalar))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.all(self._data == other._data))

    def __hash__(self):
        return hash((self.shape, tuple(self._data.flat)))

    def __repr__(self):
        body = "; ".join(" ".join(format_rational(v) for v in row) for row in self._data)
        return f"RationalMatrix({self.rows}x{self.cols}: [{body}])"


@dataclass(frozen=True)
class InertiaTriple:
    """Counts of negative, zero and positive eigenvalues, with multiplicity."""

    n_neg: int
    n_zero: int
    n_pos: int

    @property
    def dimension(self):
        return self.n_neg + self.n_zero + self.n_pos

    def to_dict(self):
        return {"n_neg": self.n_neg, "n_zero": self.n_zero, "n_pos": self.n_pos}


def _require_square(matrix, what):
    if not matrix.is_square:
        raise DimensionMismatch(f"{what} requires a square matrix, got {matrix.shape}")


def invert(matrix):
    """
    Invert a square rational matrix by Gauss-Jordan elimination.

    Args:
        matrix: Square, exactly nonsingular RationalMatrix

    Returns:
        RationalMatrix: The exact inverse

    Raises:
        SingularMatrix: If a pivot column has no nonzero entry
    """
    _require_square(matrix, "invert")
    n = matrix.rows
    work = matrix.tolist()
    inverse = RationalMatrix.identity(n).tolist()

    # downward elimination: unit diagonal, zero lower triangle
    for col in range(n):
        pivot = next((r for r in range(col, n) if work[r][col] != 0), None)
        if pivot is None:
            raise SingularMatrix(f"No pivot in column {col + 1} of a {n}x{n} matrix")
        if pivot != col:
            work[col], work[pivot] = work[pivot], work[col]
            inverse[col], inverse[pivot] = inverse[pivot], inverse[col]
        scale = work[col][col]
        work[col] = [v / scale for v in work[col]]
        inverse[col] = [v / scale for v in inverse[col]]
        for r in range(col + 1, n):
            factor = work[r][col]
            if factor:
                work[r] = [a - factor * b for a, b in zip(work[r], work[col])]
                inverse[r] = [a - factor * b for a, b in zip(inverse[r], inverse[col])]

    # upward elimination
    for col in range(n - 1, -1, -1):
        for r in range(col):
            factor = work[r][col]
            if factor:
                work[r] = [a - factor * b for a, b in zip(work[r], work[col])]
                inverse[r] = [a - factor * b for a, b in zip(inverse[r], inverse[col])]

    return RationalMatrix(inverse) if n else RationalMatrix.zeros(0)


def _row_echelon(rows, ncols):
    """Reduce rows in place; returns (rank, number of row swaps, pivots)."""
    rank = 0
    swaps = 0
    pivots = []
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        if pivot != rank:
            rows[rank], rows[pivot] = rows[pivot], rows[rank]
            swaps += 1
        head = rows[rank][col]
        pivots.append(head)
        for r in range(rank + 1, len(rows)):
            factor = rows[r][col] / head
            if factor:
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank, swaps, pivots


def rank(matrix):
    """Exact rank by Gaussian elimination."""
    rows = matrix.tolist()
    return _row_echelon(rows, matrix.cols)[0]


def determinant(matrix):
    """Exact determinant of a square rational matrix."""
    _require_square(matrix, "determinant")
    n = matrix.rows
    rows = matrix.tolist()
    r, swaps, pivots = _row_echelon(rows, n)
    if r < n:
        return Fraction(0)
    result = Fraction(-1 if swaps % 2 else 1)
    for p in pivots:
        result *= p
    return result


def det_sign(matrix):
    """Sign (-1, 0 or +1) of the exact determinant."""
    det = determinant(matrix)
    return (det > 0) - (det < 0)


def _symmetric_swap(work, p, q):
    if p == q:
        return
    work[p], work[q] = work[q], work[p]
    for row in work:
        row[p], row[q] = row[q], row[p]


def inertia(matrix):
    """
    Inertia of a symmetric rational matrix by exact symmetric congruence.

    Each step eliminates either a nonzero diagonal pivot (1x1 block) or, when
    the remaining diagonal is entirely zero, a nonzero off-diagonal pair
    (2x2 block [[0, c], [c, 0]], one negative and one positive eigenvalue).
    The Schur complement left behind is congruent to the trailing block, so
    the counts are those of the original matrix.

    Args:
        matrix: Square, exactly symmetric RationalMatrix

    Returns:
        InertiaTriple: (n_neg, n_zero, n_pos)

    Raises:
        NotSymmetric: If the matrix is not exactly symmetric
    """
    _require_square(matrix, "inertia")
    if not matrix.is_symmetric():
        raise NotSymmetric("inertia is defined here for exactly symmetric matrices only")

    work = matrix.tolist()
    n_neg = n_pos = 0
    while work:
        m = len(work)
        pivot = next((i for i in range(m) if work[i][i] != 0), None)
        if pivot is not None:
            _symmetric_swap(work, 0, pivot)
            d = work[0][0]
            if d > 0:
                n_pos += 1
            else:
                n_neg += 1
            work = [
                [work[r][s] - work[r][0] * work[0][s] / d for s in range(1, m)]
                for r in range(1, m)
            ]
            continue

        pair = next(((i, j) for i in range(m) for j in range(i + 1, m) if work[i][j] != 0), None)
        if pair is None:
            break  # zero block
        i, j = pair
        _symmetric_swap(work, 0, i)
        _symmetric_swap(work, 1, j)
        c = work[0][1]
        n_neg += 1
        n_pos += 1
        work = [
            [work[r][s] - (work[r][0] * work[1][s] + work[r][1] * work[0][s]) / c for s in range(2, m)]
            for r in range(2, m)
        ]

    result = InertiaTriple(n_neg, matrix.rows - n_neg - n_pos, n_pos)
    log.debug("inertia of %dx%d matrix: %s", matrix.rows, matrix.cols, result)
    return result

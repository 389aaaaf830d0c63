"""
Unit tests for the exact linear algebra module.

Tests rational parsing, inversion, rank/determinant and congruence inertia.
"""

import unittest
import random
import sys
import os
from fractions import Fraction

# Add parent directory to path to import modules
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from krein_analyzer.errors import DimensionMismatch, InvalidInput, NotSymmetric, SingularMatrix
from krein_analyzer.exact_linalg import (
    InertiaTriple,
    RationalMatrix,
    det_sign,
    determinant,
    inertia,
    invert,
    parse_rational,
    rank,
)


def random_rational(rng, bound=5):
    return Fraction(rng.randint(-bound, bound), rng.randint(1, 4))


def random_matrix(rng, rows, cols=None):
    cols = rows if cols is None else cols
    return RationalMatrix([[random_rational(rng) for _ in range(cols)] for _ in range(rows)])


def random_symmetric(rng, size):
    entries = [[Fraction(0)] * size for _ in range(size)]
    for i in range(size):
        for j in range(i, size):
            entries[i][j] = entries[j][i] = random_rational(rng)
    return RationalMatrix(entries)


def random_invertible(rng, size):
    while True:
        candidate = random_matrix(rng, size)
        if det_sign(candidate) != 0:
            return candidate


class TestParsing(unittest.TestCase):
    """Test cases for rational parsing and formatting."""

    def test_parse_fraction_string(self):
        """Test that "p/q" strings are parsed exactly and reduced."""
        self.assertEqual(parse_rational("6/4"), Fraction(3, 2))
        self.assertEqual(parse_rational(" -1/3 "), Fraction(-1, 3))

    def test_parse_decimal_string(self):
        """Test that finite decimal literals are converted exactly."""
        self.assertEqual(parse_rational("0.25"), Fraction(1, 4))
        self.assertEqual(parse_rational("-1.5e3"), Fraction(-1500))

    def test_binary_float_rejected(self):
        """Test that binary floats never enter the exact path."""
        with self.assertRaises(InvalidInput):
            parse_rational(0.1)

    def test_malformed_string_rejected(self):
        """Test that garbage and zero denominators are input errors."""
        for text in ("abc", "1/0", "", "1//2"):
            with self.assertRaises(InvalidInput):
                parse_rational(text)

    def test_bool_rejected(self):
        """Test that booleans are not taken for integers."""
        with self.assertRaises(InvalidInput):
            parse_rational(True)

    def test_json_encoding(self):
        """Test the {"rows", "cols", "data"} encoding with "p/q" strings."""
        matrix = RationalMatrix([[Fraction(1, 2), 3], [-2, Fraction(-7, 6)]])
        encoded = matrix.to_json()
        self.assertEqual(encoded, {"rows": 2, "cols": 2, "data": [["1/2", "3"], ["-2", "-7/6"]]})
        self.assertEqual(RationalMatrix.from_json(encoded), matrix)

    def test_json_shape_mismatch(self):
        """Test that data disagreeing with rows/cols is rejected."""
        with self.assertRaises(DimensionMismatch):
            RationalMatrix.from_json({"rows": 2, "cols": 2, "data": [["1", "2"]]})

    def test_ragged_rows_rejected(self):
        """Test that ragged nested lists do not form a matrix."""
        with self.assertRaises(DimensionMismatch):
            RationalMatrix([[1, 2], [3]])


class TestInvert(unittest.TestCase):
    """Test cases for exact inversion."""

    def setUp(self):
        """Set up a seeded generator."""
        self.rng = random.Random(20240501)

    def test_identity(self):
        """Test that the identity is its own inverse."""
        self.assertEqual(invert(RationalMatrix.identity(3)), RationalMatrix.identity(3))

    def test_unit_lower_triangular(self):
        """Test the inverse of [[1,0],[1,1]]."""
        self.assertEqual(invert(RationalMatrix([[1, 0], [1, 1]])), RationalMatrix([[1, 0], [-1, 1]]))

    def test_t2_block_for_n2(self):
        """Test the inverse of [[1/2,1],[1/6,1/2]], whose determinant is 1/12."""
        t2 = RationalMatrix([["1/2", 1], ["1/6", "1/2"]])
        self.assertEqual(determinant(t2), Fraction(1, 12))
        self.assertEqual(invert(t2), RationalMatrix([[6, -12], [-2, 6]]))
        self.assertEqual(t2 @ invert(t2), RationalMatrix.identity(2))

    def test_singular_raises(self):
        """Test that a rank-deficient matrix raises SingularMatrix."""
        with self.assertRaises(SingularMatrix):
            invert(RationalMatrix([[1, 2], [2, 4]]))

    def test_row_swap_needed(self):
        """Test a matrix whose first pivot is zero."""
        matrix = RationalMatrix([[0, 1], [1, 0]])
        self.assertEqual(invert(matrix), matrix)

    def test_double_inverse_random(self):
        """Test invert(invert(M)) == M for random nonsingular matrices."""
        for size in range(1, 7):
            matrix = random_invertible(self.rng, size)
            self.assertEqual(invert(invert(matrix)), matrix)
            self.assertEqual(matrix @ invert(matrix), RationalMatrix.identity(size))


class TestDeterminant(unittest.TestCase):
    """Test cases for rank, determinant and its sign."""

    def test_det_sign_identity(self):
        """Test det_sign(I4) = +1."""
        self.assertEqual(det_sign(RationalMatrix.identity(4)), 1)

    def test_det_sign_rank_one(self):
        """Test det_sign of a rank-one matrix is 0."""
        self.assertEqual(det_sign(RationalMatrix([[1, 2], [2, 4]])), 0)

    def test_det_sign_negative(self):
        """Test that a single row swap gives a negative determinant."""
        self.assertEqual(det_sign(RationalMatrix([[0, 1], [1, 0]])), -1)

    def test_rank(self):
        """Test rank of full, deficient and zero matrices."""
        self.assertEqual(rank(RationalMatrix.identity(3)), 3)
        self.assertEqual(rank(RationalMatrix([[1, 2, 3], [2, 4, 6]])), 1)
        self.assertEqual(rank(RationalMatrix.zeros(2, 3)), 0)

    def test_matrix_shape_errors(self):
        """Test that incompatible products and sums raise DimensionMismatch."""
        with self.assertRaises(DimensionMismatch):
            RationalMatrix.identity(2) @ RationalMatrix.identity(3)
        with self.assertRaises(DimensionMismatch):
            RationalMatrix.identity(2) + RationalMatrix.zeros(2, 3)
        with self.assertRaises(DimensionMismatch):
            determinant(RationalMatrix.zeros(2, 3))


class TestInertia(unittest.TestCase):
    """Test cases for inertia by symmetric congruence."""

    def setUp(self):
        """Set up a seeded generator."""
        self.rng = random.Random(7)

    def test_diagonal(self):
        """Test diag(2, -3) -> (1, 0, 1)."""
        self.assertEqual(inertia(RationalMatrix.diagonal([2, -3])), InertiaTriple(1, 0, 1))

    def test_zero_diagonal_pair(self):
        """Test [[0,1],[1,0]] -> (1, 0, 1) through the 2x2 pivot."""
        self.assertEqual(inertia(RationalMatrix([[0, 1], [1, 0]])), InertiaTriple(1, 0, 1))

    def test_krein_matrix_n1(self):
        """Test [[-1,1],[1,-1]] -> (1, 1, 0)."""
        self.assertEqual(inertia(RationalMatrix([[-1, 1], [1, -1]])), InertiaTriple(1, 1, 0))

    def test_zero_matrix(self):
        """Test that the zero matrix has full nullity."""
        self.assertEqual(inertia(RationalMatrix.zeros(3)), InertiaTriple(0, 3, 0))

    def test_not_symmetric(self):
        """Test that asymmetric input raises NotSymmetric."""
        with self.assertRaises(NotSymmetric):
            inertia(RationalMatrix([[1, 2], [3, 4]]))

    def test_sylvester_law_random(self):
        """Test inertia(G M G^T) = inertia(M) for random symmetric M and invertible G."""
        for trial in range(200):
            size = 1 + trial % 6
            matrix = random_symmetric(self.rng, size)
            congruence = random_invertible(self.rng, size)
            self.assertEqual(inertia(congruence @ matrix @ congruence.T), inertia(matrix))

    def test_counts_and_rank_random(self):
        """Test that counts sum to the dimension and n_zero = dim - rank."""
        for trial in range(60):
            size = 1 + trial % 6
            matrix = random_symmetric(self.rng, size)
            counts = inertia(matrix)
            self.assertEqual(counts.dimension, size)
            self.assertEqual(counts.n_zero, size - rank(matrix))

    def test_negation_swaps_counts(self):
        """Test that inertia(-M) swaps n_neg and n_pos."""
        for trial in range(30):
            matrix = random_symmetric(self.rng, 1 + trial % 5)
            counts, negated = inertia(matrix), inertia(-matrix)
            self.assertEqual((negated.n_neg, negated.n_zero, negated.n_pos),
                             (counts.n_pos, counts.n_zero, counts.n_neg))

    def test_rank_deficient_with_zero_diagonal(self):
        """Test a singular matrix that needs a 2x2 pivot after a zero block."""
        matrix = RationalMatrix([[0, 0, 1], [0, 0, 0], [1, 0, 0]])
        self.assertEqual(inertia(matrix), InertiaTriple(1, 1, 1))


if __name__ == '__main__':
    unittest.main()

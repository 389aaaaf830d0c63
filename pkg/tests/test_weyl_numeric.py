"""
Unit tests for the Weyl function module.

Tests the jet transport against closed forms, M(z) against the coth/sinh
formulas for n = 1, and the limits of M at zero and at minus infinity.
"""

import unittest
import math
import sys
import os

import numpy as np
import numpy.testing as npt

# Add parent directory to path to import modules
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from krein_analyzer.errors import InvalidInput, NearSingularG0, NonFinite
from krein_analyzer.triplet_core import TripletSpec, build_BK
from krein_analyzer.weyl_numeric import (
    MONOTONICITY_TOL,
    SYMMETRY_RTOL,
    companion_system,
    friedrichs_divergence_check,
    fundamental_matrix,
    monotonicity_margin,
    solution_boundary_values,
    weyl_limit_scan,
    weyl_M,
    weyl_M_negative,
)


def closed_form_n1(mu):
    """M(-mu^2) on (0, 1) for n = 1."""
    return np.array([[-mu / math.tanh(mu), mu / math.sinh(mu)],
                     [mu / math.sinh(mu), -mu / math.tanh(mu)]])


class TestFundamentalMatrix(unittest.TestCase):
    """Test cases for the companion system and its exponential."""

    def setUp(self):
        """Set up unit-interval specs."""
        self.spec1 = TripletSpec(1, 0, 1)
        self.spec2 = TripletSpec(2, 0, 1)

    def test_companion_structure(self):
        """Test superdiagonal ones and (-1)^n z in the corner."""
        system = companion_system(2, -3.0)
        expected = np.zeros((4, 4))
        expected[0, 1] = expected[1, 2] = expected[2, 3] = 1.0
        expected[3, 0] = -3.0
        npt.assert_array_equal(system.matrix, expected)

    def test_companion_nilpotent_at_zero(self):
        """Test that K(0) is nilpotent of index 2n."""
        matrix = companion_system(3, 0.0).matrix
        self.assertTrue(np.any(np.linalg.matrix_power(matrix, 5)))
        self.assertFalse(np.any(np.linalg.matrix_power(matrix, 6)))

    def test_zero_n1(self):
        """Test W(0) = [[1,1],[0,1]] for n = 1."""
        npt.assert_allclose(fundamental_matrix(self.spec1, 0), [[1, 1], [0, 1]], atol=1e-15)

    def test_minus_one_n1(self):
        """Test W(-1) = [[cosh 1, sinh 1],[sinh 1, cosh 1]] for n = 1."""
        c, s = math.cosh(1.0), math.sinh(1.0)
        npt.assert_allclose(fundamental_matrix(self.spec1, -1), [[c, s], [s, c]], rtol=1e-13)

    def test_zero_n2(self):
        """Test W(0) entries 1/(j-i)! for n = 2."""
        expected = np.array([[1.0 / math.factorial(j - i) if j >= i else 0.0 for j in range(4)]
                             for i in range(4)])
        npt.assert_allclose(fundamental_matrix(self.spec2, 0), expected, atol=1e-15)

    def test_overflow(self):
        """Test that an overflowing transport raises NonFinite."""
        with self.assertRaises(NonFinite):
            fundamental_matrix(self.spec1, -1e8)


class TestWeylFunction(unittest.TestCase):
    """Test cases for M(z)."""

    def setUp(self):
        """Set up unit-interval specs."""
        self.spec1 = TripletSpec(1, 0, 1)
        self.spec2 = TripletSpec(2, 0, 1)

    def test_minus_one(self):
        """Test M(-1) = [[-coth 1, 1/sinh 1], [1/sinh 1, -coth 1]]."""
        sample = weyl_M(self.spec1, -1)
        npt.assert_allclose(sample.M, closed_form_n1(1.0), rtol=1e-12)
        npt.assert_allclose(sample.M, [[-1.31304, 0.85092], [0.85092, -1.31304]], atol=1e-5)

    def test_minus_pi_squared(self):
        """Test M(-pi^2) against -pi coth pi and pi / sinh pi."""
        sample = weyl_M(self.spec1, -math.pi ** 2)
        npt.assert_allclose(sample.M, [[-3.15334, 0.27203], [0.27203, -3.15334]], atol=1e-5)

    def test_near_zero_matches_bk(self):
        """Test M(-1e-8) = B_K within 1e-6."""
        sample = weyl_M(self.spec1, -1e-8)
        npt.assert_allclose(sample.M, [[-1, 1], [1, -1]], atol=1e-6)

    def test_near_zero_higher_n(self):
        """Test the float path near zero against the exact B_K for n <= 3."""
        for n in (1, 2, 3):
            spec = TripletSpec(n, 0, 1)
            bk = build_BK(spec).to_float()
            error = np.linalg.norm(weyl_M(spec, -1e-8).M - bk) / np.linalg.norm(bk)
            self.assertLess(error, 1e-5, f"n={n}")

    def test_symmetric_for_real_z(self):
        """Test ||M - M^T|| <= 1e-10 ||M|| at real points."""
        for spec in (self.spec1, self.spec2, TripletSpec(3, "-1/2", "1")):
            for z in (-50.0, -1.0, -0.01, 2.0):
                self.assertLessEqual(weyl_M(spec, z).symmetry_defect(), SYMMETRY_RTOL)

    def test_conjugation(self):
        """Test M(conj z) = M(z)^* for complex z."""
        for z in (-1 + 2j, 3 - 0.5j, 40 + 10j):
            upper = weyl_M(self.spec2, z).M
            lower = weyl_M(self.spec2, z.conjugate()).M
            npt.assert_allclose(lower, upper.conj().T, rtol=1e-10, atol=1e-10 * np.linalg.norm(upper))

    def test_dirichlet_eigenvalue_raises(self):
        """Test that z = pi^2 (a Dirichlet eigenvalue) raises NearSingularG0."""
        with self.assertRaises(NearSingularG0) as context:
            weyl_M(self.spec1, math.pi ** 2)
        self.assertGreater(context.exception.cond, 1e12)

    def test_boundary_values_shape(self):
        """Test that G0 and G1 are 2n x 2n."""
        g0, g1 = solution_boundary_values(self.spec2, -2.0)
        self.assertEqual(g0.shape, (4, 4))
        self.assertEqual(g1.shape, (4, 4))

    def test_sample_to_dict(self):
        """Test the JSON-ready record of a real sample."""
        record = weyl_M(self.spec1, -1).to_dict()
        self.assertEqual(record["z"], -1.0)
        self.assertEqual(len(record["M"]), 2)

    def test_rejects_non_number(self):
        """Test that a non-numeric parameter is an input error."""
        with self.assertRaises(InvalidInput):
            weyl_M(self.spec1, "abc")


class TestDoubling(unittest.TestCase):
    """Test cases for M(x) by interval doubling."""

    def setUp(self):
        """Set up unit-interval specs."""
        self.spec1 = TripletSpec(1, 0, 1)
        self.spec2 = TripletSpec(2, 0, 1)

    def test_closed_form_n1(self):
        """Test the doubled M against -mu coth mu and mu / sinh mu, including mu = 100."""
        for mu in (0.5, 1.0, 10.0, 100.0):
            npt.assert_allclose(weyl_M_negative(self.spec1, -mu * mu), closed_form_n1(mu),
                                rtol=1e-10, atol=1e-12)

    def test_agrees_with_direct_solve(self):
        """Test agreement with weyl_M where the direct solve is still accurate."""
        for spec in (self.spec2, TripletSpec(2, "-1/2", "1"), TripletSpec(3, 0, 1)):
            for x in (-0.5, -20.0, -300.0):
                direct = weyl_M(spec, x).M
                npt.assert_allclose(weyl_M_negative(spec, x), direct, rtol=1e-7,
                                    atol=1e-7 * np.linalg.norm(direct, 2))

    def test_finite_past_transport_overflow(self):
        """Test that M(-1e8) stays finite with minimum eigenvalue near -1e4 for n = 1."""
        weyl = weyl_M_negative(self.spec1, -1e8)
        self.assertTrue(np.all(np.isfinite(weyl)))
        npt.assert_allclose(np.linalg.eigvalsh(weyl), [-1e4, -1e4], rtol=1e-10)

    def test_negative_definite(self):
        """Test that M(x) is negative definite for x < 0 with n = 2."""
        for x in (-1e-3, -1.0, -1e3, -1e6):
            self.assertLess(np.linalg.eigvalsh(weyl_M_negative(self.spec2, x)).max(), 0)

    def test_rejects_non_negative(self):
        """Test that x >= 0 and complex x are input errors."""
        for x in (0.0, 2.0, -1 + 1j):
            with self.assertRaises(InvalidInput):
                weyl_M_negative(self.spec1, x)


class TestLimits(unittest.TestCase):
    """Test cases for the limit scan, divergence and monotonicity."""

    def setUp(self):
        """Set up unit-interval specs."""
        self.spec1 = TripletSpec(1, 0, 1)
        self.spec2 = TripletSpec(2, 0, 1)

    def test_limit_scan_convergence(self):
        """Test error(k+1) <= 0.3 error(k) for k = 3, 4, 5 and error(6) <= 1e-4."""
        for spec in (self.spec1, self.spec2):
            table = weyl_limit_scan(spec, range(1, 7))
            errors = table.set_index("k")["error"]
            for k in (3, 4, 5):
                self.assertLessEqual(errors[k + 1], 0.3 * errors[k], f"n={spec.n}, k={k}")
            self.assertLessEqual(errors[6], 1e-4)

    def test_limit_scan_n1_accuracy(self):
        """Test that the n = 1 error at x = -1e-6 is below 1e-5."""
        table = weyl_limit_scan(self.spec1, [6])
        self.assertLessEqual(table["error"].iloc[0], 1e-5)

    def test_limit_scan_includes_k0(self):
        """Test that the k = 0 row (x = -1) is finite."""
        table = weyl_limit_scan(self.spec1, range(0, 3))
        self.assertEqual(list(table.columns), ["k", "x", "error", "cond_G0"])
        self.assertEqual(table["x"].iloc[0], -1.0)
        self.assertTrue(np.isfinite(table["error"]).all())

    def test_divergence_n1(self):
        """Test strictly decreasing minimum eigenvalues, below -25 at x = -1000."""
        report = friedrichs_divergence_check(self.spec1, [-1, -10, -100, -1000])
        self.assertFalse(report.truncated)
        self.assertTrue(report.strictly_decreasing)
        values = report.table["min_eigenvalue"].to_numpy()
        self.assertLess(values[-1], -25)
        npt.assert_allclose(values[2], -10.0 / math.tanh(5.0), rtol=1e-9)

    def test_divergence_truncates(self):
        """Test that overflow truncates the table and sets the flag."""
        report = friedrichs_divergence_check(self.spec1, [-1, -1e8])
        self.assertTrue(report.truncated)
        self.assertEqual(len(report.table), 1)

    def test_divergence_validates_sample(self):
        """Test that non-decreasing or non-negative samples are rejected."""
        with self.assertRaises(InvalidInput):
            friedrichs_divergence_check(self.spec1, [-10, -1])
        with self.assertRaises(InvalidInput):
            friedrichs_divergence_check(self.spec1, [1, -1])

    def test_monotone_pairs(self):
        """Test M(x2) - M(x1) >= -1e-9 ||M(x2)|| for x1 < x2 < 0."""
        pairs = [(-100.0, -10.0), (-10.0, -1.0), (-1.0, -0.01), (-4.0, -3.9)]
        for spec in (self.spec1, self.spec2):
            for x1, x2 in pairs:
                self.assertGreaterEqual(monotonicity_margin(spec, x1, x2), -MONOTONICITY_TOL)

    def test_monotone_requires_order(self):
        """Test that x1 < x2 < 0 is enforced."""
        with self.assertRaises(InvalidInput):
            monotonicity_margin(self.spec1, -1.0, -2.0)


if __name__ == '__main__':
    unittest.main()

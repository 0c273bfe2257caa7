import unittest
from unittest.mock import patch

import numpy as np

from hypam.core_proj import INFINITY, ZERO, CP1Point, ProjPoint
from hypam.curves import (
    RationalCurve,
    Sym2Point,
    boundary_points,
    critical_candidates,
    critical_params,
    dist_to_R,
    gauss,
    gauss_degree_estimate,
    is_everywhere_critical,
    jacobian_ratio,
    line_curve,
    sample_curve_amoeba,
    sigma_R,
    tangent_line,
)
from hypam.errors import InputError, InvalidCurve, SingularParameter

# coefficients on s^(d-k) t^k
GEODESIC_LINE = [[1, 0], [0, 0], [0, 0], [0, 1]]
CYLINDER_LINE = [[1, 0], [1, 0], [0, 0], [0, 1]]
CONIC = [[0, 1, 0], [1, 0, 0], [0, 0, 1], [0, -1, 0]]
TWISTED_CUBIC = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]
CUSP = [[1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 1]]


class TestSym2Point(unittest.TestCase):

    def test_pair_zero_infinity(self):
        """Test that {0, inf} is (0:1:0) and lies in R."""
        p = Sym2Point.from_pair(ZERO, INFINITY)
        self.assertEqual(p, Sym2Point([0, 1, 0]))
        self.assertEqual(sigma_R(p), p)
        self.assertAlmostEqual(dist_to_R(p), 0.0)

    def test_roots_recover_the_pair(self):
        """Test that the roots of the encoding are the two points."""
        z1, z2 = CP1Point.from_complex(1 + 1j), CP1Point.from_complex(-0.5)
        roots = Sym2Point.from_pair(z1, z2).roots()
        self.assertEqual(len(roots), 2)
        self.assertTrue(any(r == z1 for r in roots))
        self.assertTrue(any(r == z2 for r in roots))

    def test_double_point_has_zero_discriminant(self):
        """Test that a repeated point encodes with vanishing discriminant."""
        z = CP1Point.from_complex(0.3 - 2j)
        self.assertAlmostEqual(abs(Sym2Point.from_pair(z, z).discriminant), 0.0)

    def test_antipodal_pairs_lie_in_R(self):
        """Test that {z, -1/conj z} is fixed by sigma_R and a generic pair is not."""
        z = CP1Point.from_complex(0.8 + 0.1j)
        self.assertLess(dist_to_R(Sym2Point.from_pair(z, z.antipode())), 1e-12)
        self.assertGreater(dist_to_R(Sym2Point.from_pair(z, CP1Point.from_complex(2.0))), 1e-3)

    def test_real_structure(self):
        """Test coordinatewise-real points."""
        self.assertTrue(Sym2Point([1, 2, 3]).is_real())
        self.assertFalse(Sym2Point([1, 2j, 3]).is_real())


class TestRationalCurve(unittest.TestCase):

    def test_shape_is_checked(self):
        """Test that a curve needs four components of common length."""
        with self.assertRaises(InvalidCurve):
            RationalCurve([[1, 0], [0, 1], [1, 1]])

    def test_common_root_rejected(self):
        """Test that components sharing the root s = 0 are rejected."""
        with self.assertRaises(InvalidCurve):
            RationalCurve([[1, 0, 0], [0, 1, 0], [0, 1, 0], [1, 1, 0]])

    def test_curve_in_quadric_rejected(self):
        """Test that a curve inside Q is rejected."""
        with self.assertRaises(InvalidCurve):
            RationalCurve([[1, 0], [0, 0], [0, 1], [0, 0]])

    def test_line_curve(self):
        """Test that line_curve evaluates to s p + t q."""
        p, q = ProjPoint([1, 2, 0, 1]), ProjPoint([0, 1j, 1, 0])
        C = line_curve(p, q)
        self.assertEqual(C.degree, 1)
        expected = ProjPoint(0.5 * p.entries + q.entries)
        self.assertEqual(C.point(CP1Point((0.5, 1.0))), expected)

    def test_singular_parameter(self):
        """Test that the cusp at (1:0) has no tangent line."""
        C = RationalCurve(CUSP)
        with self.assertRaises(SingularParameter):
            tangent_line(C, INFINITY)

    def test_boundary_points_of_line(self):
        """Test that the geodesic line reaches the absolute at 0 and infinity."""
        found = boundary_points(RationalCurve(GEODESIC_LINE))
        self.assertEqual(sorted(q.label() for q in found), ["0", "inf"])

    def test_sampling(self):
        """Test that curve samples are seeded and of the requested size."""
        C = RationalCurve(CONIC)
        first = sample_curve_amoeba(C, 20, seed=3)
        self.assertEqual(len(first), 20)
        np.testing.assert_array_equal(first.ball_array(), sample_curve_amoeba(C, 20, seed=3).ball_array())


class TestGaussMaps(unittest.TestCase):

    def test_geodesic_line_gauss_is_constant(self):
        """Test that l2 has gauss value {0, inf} at every parameter."""
        C = RationalCurve(GEODESIC_LINE)
        for z in (0.5, 1j, -3 + 2j):
            self.assertEqual(gauss(C, CP1Point.from_complex(z), "-"), Sym2Point([0, 1, 0]))

    def test_degree_formula(self):
        """Test that the Gauss maps have degree 2d - 2 for the line, conic and cubic."""
        for coeffs, expected in ((CYLINDER_LINE, 0), (CONIC, 2), (TWISTED_CUBIC, 4)):
            C = RationalCurve(coeffs)
            for side in ("-", "+"):
                self.assertEqual(gauss_degree_estimate(C, side), expected)

    def test_bad_side(self):
        """Test that the side must be '-' or '+'."""
        with self.assertRaises(InputError):
            gauss(RationalCurve(CONIC), CP1Point.from_complex(1.0), "x")


class TestCriticality(unittest.TestCase):

    def test_geodesic_line_is_everywhere_critical(self):
        """Test that every grid parameter of l2 is critical and the Jacobian degenerates."""
        C = RationalCurve(GEODESIC_LINE)
        self.assertTrue(is_everywhere_critical(C, grid=32))
        self.assertEqual(len(critical_params(C, grid=32)), 32)
        self.assertLess(jacobian_ratio(C, CP1Point.from_complex(0.4 + 0.3j)), 1e-8)

    def test_cylinder_line_has_no_critical_points(self):
        """Test that l2 B has no critical parameter and a regular Jacobian."""
        C = RationalCurve(CYLINDER_LINE)
        self.assertFalse(is_everywhere_critical(C, grid=32))
        self.assertEqual(critical_params(C, grid=64), [])
        self.assertGreater(jacobian_ratio(C, CP1Point.from_complex(0.4 + 0.3j)), 1e-3)

    def test_detectors_agree_on_random_conics(self):
        """Test that a Gauss value far from R comes with a regular Jacobian."""
        rng = np.random.default_rng(31)
        checked = 0
        for _ in range(30):
            C = RationalCurve(rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3)))
            for _ in range(20):
                param = CP1Point(rng.standard_normal(2) + 1j * rng.standard_normal(2))
                gap = dist_to_R(gauss(C, param, "-"))
                if gap < 0.05:
                    continue
                checked += 1
                self.assertGreater(jacobian_ratio(C, param), 1e-5)
        self.assertGreater(checked, 300)

    def test_candidates_carry_jacobian_ratios(self):
        """Test that every Gauss hit on l2 comes with a degenerate Jacobian."""
        found = critical_candidates(RationalCurve(GEODESIC_LINE), grid=32)
        self.assertEqual(len(found), 32)
        for _, ratio in found:
            self.assertLess(ratio, 1e-4)

    @patch("hypam.curves.jacobian_ratio", return_value=0.5)
    def test_unconfirmed_hits_are_dropped(self, mock_ratio):
        """Test that Gauss hits with a regular Jacobian are not reported critical."""
        C = RationalCurve(GEODESIC_LINE)
        with self.assertLogs("hypam.curves", level="WARNING"):
            self.assertEqual(critical_params(C, grid=16), [])
        self.assertEqual(len(critical_candidates(C, grid=16)), 16)
        self.assertTrue(mock_ratio.called)

    def test_critical_points_have_degenerate_jacobian(self):
        """Test that refined critical parameters of a random conic are Jacobian-critical."""
        rng = np.random.default_rng(5)
        C = RationalCurve(rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3)))
        for param in critical_params(C, grid=128):
            self.assertLess(dist_to_R(gauss(C, param, "-")), 1e-8)
            self.assertLess(jacobian_ratio(C, param), 1e-3)


if __name__ == "__main__":
    unittest.main()

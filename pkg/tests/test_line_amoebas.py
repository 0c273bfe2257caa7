import unittest

import numpy as np

from hypam.core_proj import INFINITY, ZERO, CP1Point, Line, ProjPoint, QuadricPoint, p_real_involution
from hypam.errors import EmptyAmoeba
from hypam.hyperbolic import ORIGIN, AbsPoint, busemann, dist, dist_to_geodesic, kappa
from hypam.line_amoebas import (
    Cylinder,
    EmptyMinusRuling,
    EmptyPlusRuling,
    Geodesic,
    Horosphere,
    axis_distance_spread,
    busemann_range,
    classify_line,
    cylinder_radius_curve,
    is_p_real_line,
    kappa_fiber,
    same_amoeba,
    sample_line_amoeba,
    tangent_line_through,
    translate_line,
    transported,
)


def random_point(rng) -> ProjPoint:
    return ProjPoint(rng.standard_normal(4) + 1j * rng.standard_normal(4))


class TestClassifyLine(unittest.TestCase):

    def setUp(self):
        """The geodesic line l2, the horosphere line l1 and the axis 0-infinity."""
        self.l2 = Line(ProjPoint([1, 0, 0, 0]), ProjPoint([0, 0, 0, 1]))
        self.l1 = Line(ProjPoint([1, 0, 0, 1]), ProjPoint([0, 1, 0, 0]))
        self.axis = (AbsPoint.from_cp1(ZERO), AbsPoint.from_cp1(INFINITY))
        self.rng = np.random.default_rng(17)

    def test_diagonal_line_is_geodesic(self):
        """Test that the diagonal matrices form the geodesic 0-infinity."""
        found = classify_line(self.l2)
        self.assertIsInstance(found, Geodesic)
        self.assertEqual(sorted(found.describe()["endpoints"]), ["0", "inf"])

    def test_unipotent_line_is_horosphere(self):
        """Test that [s:b:0:s] gives the horosphere at infinity through the origin."""
        found = classify_line(self.l1)
        self.assertIsInstance(found, Horosphere)
        self.assertTrue(found.center.cp1.is_infinity())
        self.assertAlmostEqual(busemann(found.center, found.basepoint), 0.0, places=10)

    def test_right_translate_is_cylinder(self):
        """Test that l2 B is a cylinder about 0-infinity of radius dist(kappa(B), axis)."""
        B = ProjPoint([1, 1, 0, 1])
        found = classify_line(translate_line(self.l2, B, side="right"))
        self.assertIsInstance(found, Cylinder)
        self.assertAlmostEqual(found.radius, dist_to_geodesic(kappa(B), self.axis), places=8)
        self.assertAlmostEqual(found.radius, np.arcsinh(1.0), places=8)
        self.assertEqual(sorted(q.label() for q in found.axis), ["0", "inf"])

    def test_rulings_are_empty(self):
        """Test both rulings of Q."""
        plus = classify_line(Line(ProjPoint([1, 0, 0, 0]), ProjPoint([0, 1, 0, 0])))
        self.assertIsInstance(plus, EmptyPlusRuling)
        self.assertEqual(plus.describe(), {"class": "empty_plus_ruling", "point": "inf"})
        minus = classify_line(Line(ProjPoint([1, 0, 0, 0]), ProjPoint([0, 0, 1, 0])))
        self.assertIsInstance(minus, EmptyMinusRuling)

    def test_antipodal_kernels_give_geodesics(self):
        """Test that a line whose kernels are antipodal has radius zero."""
        q1 = CP1Point.from_complex(0.7 + 0.2j)
        line = Line(QuadricPoint(q1, INFINITY).to_proj(), QuadricPoint(q1.antipode(), ZERO).to_proj())
        self.assertIsInstance(classify_line(line), Geodesic)

    def test_tangent_lines_are_horospheres(self):
        """Test that lines tangent to Q at random points have horosphere amoebas."""
        for _ in range(10):
            alpha = CP1Point(self.rng.standard_normal(2) + 1j * self.rng.standard_normal(2))
            beta = CP1Point(self.rng.standard_normal(2) + 1j * self.rng.standard_normal(2))
            z0 = QuadricPoint(alpha, beta).to_proj()
            line = tangent_line_through(z0, self.rng.standard_normal(4) + 1j * self.rng.standard_normal(4))
            found = classify_line(line)
            self.assertIsInstance(found, Horosphere)
            self.assertEqual(found.center, AbsPoint.from_cp1(beta))
            cloud = sample_line_amoeba(line, 32, seed=1)
            self.assertLess(busemann_range(cloud, found.center), 1e-7)

    def test_random_lines_are_cylinders(self):
        """Test that transverse lines have a constant distance to their axis."""
        for k in range(20):
            line = Line(random_point(self.rng), random_point(self.rng))
            found = classify_line(line)
            self.assertIsInstance(found, Cylinder)
            cloud = sample_line_amoeba(line, 64, seed=k)
            self.assertLess(axis_distance_spread(cloud, found.axis), 1e-7)

    def test_radius_increases_away_from_antipode(self):
        """Test that the cylinder radius grows with the distance of q2 from the antipode of q1."""
        sweep = np.arange(0.2, 3.01, 0.2)
        radii = cylinder_radius_curve(CP1Point.from_complex(0.3j), sweep)
        self.assertTrue(all(b > a for a, b in zip(radii, radii[1:])))
        self.assertLess(radii[0], 0.5)
        self.assertGreater(radii[-1], 3.0)
        self.assertAlmostEqual(radii[0], 0.1, places=2)
        self.assertAlmostEqual(radii[-1], 3.341, places=2)


class TestLineSampling(unittest.TestCase):

    def setUp(self):
        """The lines l2 and l1."""
        self.l2 = Line(ProjPoint([1, 0, 0, 0]), ProjPoint([0, 0, 0, 1]))
        self.l1 = Line(ProjPoint([1, 0, 0, 1]), ProjPoint([0, 1, 0, 0]))

    def test_geodesic_samples(self):
        """Test that samples of l2 lie on the geodesic 0-infinity."""
        axis = (AbsPoint.from_cp1(ZERO), AbsPoint.from_cp1(INFINITY))
        cloud = sample_line_amoeba(self.l2, 100, seed=0)
        self.assertEqual(len(cloud), 100)
        self.assertLess(max(dist_to_geodesic(x, axis) for x in cloud.points), 1e-8)

    def test_horosphere_samples(self):
        """Test that samples of l1 lie on the horosphere at infinity through 0."""
        cloud = sample_line_amoeba(self.l1, 100, seed=0)
        self.assertLess(busemann_range(cloud, AbsPoint.from_cp1(INFINITY)), 1e-8)

    def test_sampling_is_seeded(self):
        """Test that one seed gives one cloud."""
        first = sample_line_amoeba(self.l1, 10, seed=4).ball_array()
        second = sample_line_amoeba(self.l1, 10, seed=4).ball_array()
        np.testing.assert_array_equal(first, second)

    def test_ruling_has_no_samples(self):
        """Test that a line in Q cannot be sampled."""
        ruling = Line(ProjPoint([1, 0, 0, 0]), ProjPoint([0, 1, 0, 0]))
        with self.assertRaises(EmptyAmoeba):
            sample_line_amoeba(ruling, 5, seed=0)


class TestLineTransport(unittest.TestCase):

    def setUp(self):
        """Seeded generator."""
        self.rng = np.random.default_rng(23)

    def test_left_translation_moves_the_amoeba(self):
        """Test that A.l has the class of l carried by the isometry of A."""
        lines = [Line(ProjPoint([1, 0, 0, 0]), ProjPoint([0, 0, 0, 1])),
                 Line(ProjPoint([1, 0, 0, 1]), ProjPoint([0, 1, 0, 0])),
                 Line(random_point(self.rng), random_point(self.rng))]
        for line in lines:
            A = random_point(self.rng)
            moved = classify_line(translate_line(line, A))
            self.assertTrue(same_amoeba(moved, transported(classify_line(line), A), atol=1e-6))

    def test_right_unitary_translation_keeps_the_amoeba(self):
        """Test that right multiplication by a unitary does not change the amoeba."""
        line = Line(random_point(self.rng), random_point(self.rng))
        U = ProjPoint([np.cos(0.4), 1j * np.sin(0.4), 1j * np.sin(0.4), np.cos(0.4)])
        self.assertTrue(same_amoeba(classify_line(line), classify_line(translate_line(line, U, "right")),
                                    atol=1e-6))

    def test_p_real_lines(self):
        """Test that l2 is P-real and a random line is not."""
        self.assertTrue(is_p_real_line(Line(ProjPoint([1, 0, 0, 0]), ProjPoint([0, 0, 0, 1]))))
        self.assertFalse(is_p_real_line(Line(random_point(self.rng), random_point(self.rng))))

    def test_p_real_lines_are_geodesics_through_the_origin(self):
        """Test that a line is P-real exactly when its amoeba is a geodesic through the origin."""
        def through_origin(found) -> bool:
            return isinstance(found, Geodesic) and dist_to_geodesic(ORIGIN, found.endpoints) < 1e-6

        for _ in range(50):
            p = random_point(self.rng)
            line = Line(p, p_real_involution(p))
            self.assertTrue(is_p_real_line(line))
            self.assertTrue(through_origin(classify_line(line)))
        for _ in range(50):
            line = Line(random_point(self.rng), random_point(self.rng))
            self.assertFalse(is_p_real_line(line))
            self.assertFalse(through_origin(classify_line(line)))

    def test_kappa_fiber(self):
        """Test that every fiber parameter maps back to the target point."""
        line = Line(random_point(self.rng), random_point(self.rng))
        param = CP1Point.from_complex(0.5 - 0.25j)
        target = kappa(line.point(param))
        found = kappa_fiber(line, target, starts=16, seed=2)
        self.assertGreaterEqual(len(found), 1)
        for p in found:
            self.assertLess(dist(kappa(line.point(p)), target), 1e-6)


if __name__ == "__main__":
    unittest.main()

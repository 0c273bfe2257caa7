import unittest

import numpy as np

from hypam.core_proj import (
    INFINITY,
    ZERO,
    CP1Point,
    Line,
    ProjPoint,
    QKind,
    QuadricPoint,
    binary_roots,
    canonical_vector,
    det,
    from_real_chart,
    fs_distance,
    line_through,
    mobius,
    on_quadric,
    p_real_involution,
    pi_P,
    q_coords,
    real_chart,
    same_point,
)
from hypam.errors import DegenerateSpan, NotOnQuadric, OnRealLocus, ZeroVector


def random_point(rng) -> ProjPoint:
    return ProjPoint(rng.standard_normal(4) + 1j * rng.standard_normal(4))


class TestProjectivePoints(unittest.TestCase):

    def setUp(self):
        """Seeded generator for every randomized check."""
        self.rng = np.random.default_rng(11)

    def test_canonical_vector_is_scale_invariant(self):
        """Test that rescaling by any nonzero complex number gives the same representative."""
        v = self.rng.standard_normal(4) + 1j * self.rng.standard_normal(4)
        for scale in (2.0, -1j, 3.5 * np.exp(0.7j)):
            np.testing.assert_allclose(canonical_vector(v), canonical_vector(scale * v), atol=1e-12)

    def test_canonical_vector_has_real_positive_leading_entry(self):
        """Test that the largest entry of the representative is real and positive."""
        v = canonical_vector([1j, 2 - 2j, 0.5])
        k = int(np.argmax(np.abs(v)))
        self.assertAlmostEqual(v[k].imag, 0.0)
        self.assertGreater(v[k].real, 0.0)
        self.assertAlmostEqual(np.linalg.norm(v), 1.0)

    def test_zero_vector_rejected(self):
        """Test that all-zero coordinates raise ZeroVector."""
        with self.assertRaises(ZeroVector):
            ProjPoint([0, 0, 0, 0])
        with self.assertRaises(ZeroVector):
            CP1Point([0, 0])

    def test_points_are_immutable(self):
        """Test that entries cannot be reassigned."""
        p = ProjPoint([1, 0, 0, 1])
        with self.assertRaises(AttributeError):
            p.entries = np.zeros(4)
        with self.assertRaises(ValueError):
            p.entries[0] = 2.0

    def test_cp1_values(self):
        """Test the reading of (u:v) as u/v on the Riemann sphere."""
        self.assertTrue(INFINITY.is_infinity())
        self.assertEqual(ZERO.label(), "0")
        self.assertEqual(INFINITY.label(), "inf")
        self.assertAlmostEqual(CP1Point.from_complex(2 + 1j).value, 2 + 1j)
        self.assertEqual(CP1Point.from_complex(None), INFINITY)

    def test_antipode(self):
        """Test that the antipode of z is -1/conj(z)."""
        z = 0.3 - 1.2j
        self.assertAlmostEqual(CP1Point.from_complex(z).antipode().value, -1 / np.conj(z))
        self.assertEqual(ZERO.antipode(), INFINITY)

    def test_mobius(self):
        """Test z -> 2z + 1 and the fixed point at infinity."""
        A = ProjPoint([2, 1, 0, 1])
        self.assertAlmostEqual(mobius(A, CP1Point.from_complex(1j)).value, 1 + 2j)
        self.assertEqual(mobius(A, INFINITY), INFINITY)

    def test_fs_distance_range(self):
        """Test the Fubini-Study distance on equal and orthogonal vectors."""
        self.assertAlmostEqual(fs_distance([1, 0], [2j, 0]), 0.0)
        self.assertAlmostEqual(fs_distance([1, 0], [0, 1]), np.pi / 2)

    def test_same_point_up_to_scale(self):
        """Test projective equality of p and a complex multiple of p."""
        p = random_point(self.rng)
        q = ProjPoint(np.exp(1.1j) * 4.0 * p.entries)
        self.assertTrue(same_point(p, q))
        self.assertEqual(p, q)


class TestQuadric(unittest.TestCase):

    def test_rank_one_points_lie_on_quadric(self):
        """Test that (alpha, beta) rebuilds a rank-1 matrix with that kernel and image."""
        alpha = CP1Point.from_complex(0.5 + 1j)
        beta = CP1Point.from_complex(-2.0)
        p = QuadricPoint(alpha, beta).to_proj()
        self.assertTrue(on_quadric(p))
        np.testing.assert_allclose(p.matrix @ alpha.vector, 0.0, atol=1e-12)
        back = q_coords(p)
        self.assertEqual(back.alpha, alpha)
        self.assertEqual(back.beta, beta)

    def test_q_coords_rejects_invertible(self):
        """Test that q_coords raises NotOnQuadric off Q."""
        with self.assertRaises(NotOnQuadric):
            q_coords(ProjPoint([1, 0, 0, 1]))

    def test_binary_roots_with_infinity(self):
        """Test that a vanishing leading coefficient contributes the root (1:0)."""
        roots = binary_roots([0.0, 1.0, -2.0])
        self.assertEqual(len(roots), 2)
        self.assertTrue(roots[0].is_infinity())
        self.assertAlmostEqual(roots[1].value, 2.0)

    def test_binary_roots_of_zero_form(self):
        """Test that the zero form raises ZeroVector."""
        with self.assertRaises(ZeroVector):
            binary_roots([0, 0, 0])


class TestLines(unittest.TestCase):

    def test_geodesic_line_is_transverse(self):
        """Test the line through diag(1,0) and diag(0,1): Q-points at E11 and E22."""
        l = Line(ProjPoint([1, 0, 0, 0]), ProjPoint([0, 0, 0, 1]))
        self.assertIs(l.kind, QKind.TRANSVERSE)
        targets = [ProjPoint([1, 0, 0, 0]), ProjPoint([0, 0, 0, 1])]
        found = [qp.to_proj() for qp in l.qdata.qpoints]
        for target in targets:
            self.assertTrue(any(same_point(target, p) for p in found))

    def test_horosphere_line_is_tangent(self):
        """Test that the line through the identity and E12 is tangent to Q at E12."""
        l = Line(ProjPoint([1, 0, 0, 1]), ProjPoint([0, 1, 0, 0]))
        self.assertIs(l.kind, QKind.TANGENT)
        self.assertTrue(same_point(l.qdata.qpoints[0].to_proj(), ProjPoint([0, 1, 0, 0])))

    def test_rulings(self):
        """Test both rulings of Q: fixed image and fixed kernel."""
        plus = Line(ProjPoint([1, 0, 0, 0]), ProjPoint([0, 1, 0, 0]))
        minus = Line(ProjPoint([1, 0, 0, 0]), ProjPoint([0, 0, 1, 0]))
        self.assertIs(plus.kind, QKind.ON_QUADRIC_PLUS)
        self.assertIs(minus.kind, QKind.ON_QUADRIC_MINUS)

    def test_line_through_ignores_the_basis(self):
        """Test that swapping and rescaling the basis points keeps the kind and the Q-points."""
        rng = np.random.default_rng(4)
        for _ in range(10):
            p, q = random_point(rng), random_point(rng)
            first = line_through(p, q)
            second = line_through(ProjPoint(2j * q.entries), ProjPoint(p.entries + q.entries))
            self.assertIs(first.kind, second.kind)
            for qp in first.qdata.qpoints:
                self.assertTrue(any(same_point(qp.to_proj(), other.to_proj(), eps=1e-7)
                                    for other in second.qdata.qpoints))

    def test_degenerate_span(self):
        """Test that two equal points do not span a line."""
        p = ProjPoint([1, 2, 3, 4])
        with self.assertRaises(DegenerateSpan):
            Line(p, ProjPoint(2j * p.entries))

    def test_line_contains_pencil(self):
        """Test that points of the pencil lie on the line."""
        rng = np.random.default_rng(3)
        p, q = random_point(rng), random_point(rng)
        l = Line(p, q)
        self.assertTrue(l.contains(ProjPoint(p.entries + (0.3 - 2j) * q.entries)))
        self.assertTrue(l.contains(l.point(CP1Point.from_complex(1.7j))))

    def test_random_lines_are_transverse(self):
        """Test that generic lines meet Q in two points, both on the line."""
        rng = np.random.default_rng(5)
        for _ in range(20):
            l = Line(random_point(rng), random_point(rng))
            self.assertIs(l.kind, QKind.TRANSVERSE)
            for qp in l.qdata.qpoints:
                self.assertTrue(l.contains(qp.to_proj(), eps=1e-7))


class TestRealStructure(unittest.TestCase):

    def test_involution_examples(self):
        """Test that unitary matrices are fixed and diag(2,1) is not."""
        for fixed in ([1, 0, 0, 1], [1j, 0, 0, -1j]):
            p = ProjPoint(fixed)
            self.assertTrue(same_point(p_real_involution(p), p))
        p = ProjPoint([2, 0, 0, 1])
        self.assertTrue(same_point(p_real_involution(p), ProjPoint([1, 0, 0, 2])))

    def test_involution_is_an_involution(self):
        """Test that applying the involution twice is the identity."""
        p = random_point(np.random.default_rng(8))
        self.assertTrue(same_point(p_real_involution(p_real_involution(p)), p))

    def test_chart_turns_involution_into_conjugation(self):
        """Test the real chart against the involution and the determinant."""
        p = random_point(np.random.default_rng(9))
        z = real_chart(p)
        w = real_chart(p_real_involution(p))
        # the chart is projective, so compare up to a common phase
        self.assertLess(fs_distance(np.conj(z), w), 1e-10)
        self.assertAlmostEqual(det(p), np.sum(z ** 2) / 4)
        self.assertTrue(same_point(from_real_chart(z), p))

    def test_pi_P_examples(self):
        """Test that pi_P of diag(t, 1/t) lands on the image (1:0) for t > 1."""
        qp = pi_P(ProjPoint([3.0, 0, 0, 1 / 3.0]))
        self.assertTrue(qp.beta.is_infinity())

    def test_pi_P_on_real_locus(self):
        """Test that pi_P is undefined on P-real points."""
        with self.assertRaises(OnRealLocus):
            pi_P(ProjPoint([1, 0, 0, 1]))

    def test_pi_P_lands_on_quadric(self):
        """Test that pi_P returns a point of Q on the P-real line through p."""
        p = random_point(np.random.default_rng(10))
        qp = pi_P(p)
        self.assertTrue(on_quadric(qp.to_proj()))


if __name__ == "__main__":
    unittest.main()

import math
import unittest
import sys
from pathlib import Path

import numpy as np
from hypothesis import given, strategies as st

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from core.errors import DegreeOutOfRange, InvalidInput, PhaseOutOfRange, SymmetryViolation
from core.nlfs import CoeffSequence, nlfs_finite
from core.qsp import (
    PhaseSequence,
    coeffs_to_phases,
    correspondence_check,
    correspondence_deviation,
    phases_to_coeffs,
    qsp_response,
    qsp_response_batch,
    qsp_unitary,
    response_on_abscissae,
    response_real_part,
)
from core.spectral import CircleGrid


def random_phases(seed: int, degree: int, scale: float = 1.0) -> PhaseSequence:
    rng = np.random.default_rng(seed)
    return PhaseSequence(scale * rng.uniform(-1, 1, degree + 1))


class TestPhaseSequence(unittest.TestCase):

    def test_range_checks(self):
        with self.assertRaises(PhaseOutOfRange):
            PhaseSequence([math.pi / 2])
        with self.assertRaises(PhaseOutOfRange):
            PhaseSequence([0.1, float("nan")])
        with self.assertRaises(InvalidInput):
            PhaseSequence([])

    def test_degree_and_padding(self):
        psi = PhaseSequence([0.1, 0.2, 0.3])
        self.assertEqual(psi.degree, 2)
        self.assertEqual(psi[5], 0.0)
        self.assertEqual(psi.padded(5).tolist(), [0.1, 0.2, 0.3, 0.0, 0.0])
        self.assertAlmostEqual(psi.sup_distance(PhaseSequence([0.1])), 0.3)
        self.assertEqual(PhaseSequence.zeros(3).tolist(), [0.0] * 4)


class TestQSPResponse(unittest.TestCase):

    def test_degree_zero(self):
        """Test U_0 = diag(e^(i psi_0), e^(-i psi_0)) for every x"""
        psi = PhaseSequence([0.4])
        for x in (0.0, 0.3, 1.0):
            u = qsp_unitary(psi, 0, x).matrix()
            np.testing.assert_allclose(u, np.diag([np.exp(0.4j), np.exp(-0.4j)]), atol=1e-15)
        self.assertAlmostEqual(qsp_response(psi, 0, 0.7), math.sin(0.4), places=15)

    def test_zero_phases_degree_one(self):
        psi = PhaseSequence.zeros(1)
        for x in np.linspace(0, 1, 7):
            u = qsp_unitary(psi, 1, x)
            self.assertAlmostEqual(u.u00.real, 2 * x ** 2 - 1, places=14)

    def test_zero_phases_have_zero_response(self):
        psi = PhaseSequence.zeros(9)
        for d in (0, 4, 9):
            self.assertAlmostEqual(qsp_response(psi, d, 0.42), 0.0, places=15)

    def test_unitarity(self):
        psi = random_phases(seed=1, degree=64)
        for d in (8, 32, 64):
            for x in (0.0, 0.5, 0.99, 1.0):
                u = qsp_unitary(psi, d, x)
                self.assertLessEqual(u.unitarity_defect(), 1e-12)
                self.assertLessEqual(u.determinant_defect(), 1e-12)

    def test_input_checks(self):
        psi = PhaseSequence([0.1, 0.2, 0.3])
        with self.assertRaises(DegreeOutOfRange):
            qsp_response(psi, 3, 0.5)
        with self.assertRaises(DegreeOutOfRange):
            qsp_response(psi, -1, 0.5)
        with self.assertRaises(InvalidInput):
            qsp_response(psi, 2, 1.5)

    def test_even_in_x(self):
        psi = random_phases(seed=2, degree=6)
        values = response_on_abscissae(psi, 6, np.array([0.3, -0.3]))
        self.assertEqual(values[0], values[1])

    def test_batch_matches_single(self):
        psi = random_phases(seed=3, degree=5)
        xs = np.linspace(0, 1, 11)
        batch = qsp_response_batch(psi, 5, xs)[:, 0, 0].imag
        single = [qsp_response(psi, 5, x) for x in xs]
        np.testing.assert_allclose(batch, single, atol=1e-15)


class TestCoefficientConversion(unittest.TestCase):

    def test_phases_to_coeffs(self):
        F = phases_to_coeffs(PhaseSequence([math.pi / 4]))
        self.assertEqual(F.start, 0)
        self.assertAlmostEqual(abs(F[0] - 1j), 0.0, places=15)

        F = phases_to_coeffs(PhaseSequence([0.1, 0.2]))
        self.assertEqual((F.start, F.stop), (-1, 1))
        self.assertAlmostEqual(F[-1], 1j * math.tan(0.2))
        self.assertAlmostEqual(F[0], 1j * math.tan(0.1))
        self.assertAlmostEqual(F[1], 1j * math.tan(0.2))

        F = phases_to_coeffs(PhaseSequence.zeros(3))
        self.assertEqual(F.l1_norm(), 0.0)

    def test_coeffs_to_phases(self):
        psi = coeffs_to_phases(CoeffSequence(0, [1j]))
        self.assertAlmostEqual(psi[0], math.pi / 4)
        self.assertEqual(coeffs_to_phases(CoeffSequence.empty()).tolist(), [0.0])
        with self.assertRaises(SymmetryViolation):
            coeffs_to_phases(CoeffSequence(0, [0.3]))
        with self.assertRaises(SymmetryViolation):
            coeffs_to_phases(CoeffSequence(0, [0.1j, 0.2j]))

    def test_roundtrip(self):
        psi = random_phases(seed=4, degree=12)
        back = coeffs_to_phases(phases_to_coeffs(psi))
        self.assertLessEqual(psi.sup_distance(back), 1e-15)


class TestCorrespondence(unittest.TestCase):

    def test_trivial_cases(self):
        xs = np.linspace(0, 1, 17)
        zero = PhaseSequence.zeros(5)
        for d in range(6):
            self.assertLessEqual(np.max(correspondence_deviation(zero, d, xs)), 1e-13)
        single = PhaseSequence([0.7])
        self.assertLessEqual(np.max(correspondence_deviation(single, 0, xs)), 1e-13)

    @given(
        st.integers(min_value=0, max_value=2 ** 32 - 1),
        st.integers(min_value=0, max_value=16),
        st.floats(min_value=0.0, max_value=1.0),
    )
    def test_random_phases(self, seed, degree, x):
        psi = random_phases(seed, degree)
        d = np.random.default_rng(seed).integers(0, degree + 1)
        self.assertLessEqual(correspondence_check(psi, int(d), x), 1e-11)

    def test_response_equals_imaginary_part_of_b(self):
        """Test Im u_d(x_j) = Im b(z_j) on the grid, with b from the forward series"""
        psi = random_phases(seed=5, degree=10, scale=0.3)
        grid = CircleGrid(128)
        b = nlfs_finite(phases_to_coeffs(psi), grid).b
        half = grid.size // 2
        response = qsp_response_batch(psi, 10, grid.abscissae[:half + 1])[:, 0, 0].imag
        self.assertLessEqual(np.max(np.abs(response - b.samples[:half + 1].imag)), 1e-11)
        # b is purely imaginary and even: b(z) = b(1/z)
        self.assertLessEqual(np.max(np.abs(b.samples.real)), 1e-13)
        self.assertLessEqual(np.max(np.abs(b.samples - b.samples[grid.reflection])), 1e-13)

    def test_real_part_reading(self):
        psi = random_phases(seed=6, degree=7, scale=0.5)
        for x in (0.0, 0.25, 0.8, 1.0):
            parts = response_real_part(psi, 7, x)
            self.assertAlmostEqual(parts.real_response, parts.a_rotated, places=11)
            self.assertAlmostEqual(parts.imag_response, parts.imag_b, places=11)


if __name__ == '__main__':
    unittest.main()

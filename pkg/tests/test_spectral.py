import unittest
import sys
from pathlib import Path

import numpy as np
from hypothesis import given, strategies as st

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from core.errors import GridError, GridMismatch, NonRealInput
from core.spectral import (
    CircleFunction,
    CircleGrid,
    bandwidth,
    cauchy_project_disk,
    cauchy_project_disk_star,
    from_coeffs,
    hilbert_transform,
    l2_norm,
    mean_value,
    next_power_of_two,
    outer_residual,
    reflect,
    star,
    support_leak,
    to_coeffs,
    wiener_norm,
)


def random_function(grid: CircleGrid, seed: int, band: int = None) -> CircleFunction:
    """Random circle function; coefficients limited to |n| <= band when given."""
    rng = np.random.default_rng(seed)
    coeffs = rng.normal(size=grid.size) + 1j * rng.normal(size=grid.size)
    if band is not None:
        coeffs[np.abs(grid.indices) > band] = 0
    return from_coeffs(grid, coeffs)


class TestCircleGrid(unittest.TestCase):

    def test_rejects_bad_sizes(self):
        """Test that sizes other than powers of two >= 8 are refused"""
        for size in (0, 4, 12, 100, -8):
            with self.assertRaises(GridError):
                CircleGrid(size)
        with self.assertRaises(GridError):
            CircleGrid(8.0)

    def test_nodes_and_angles(self):
        """Test z_j = exp(2 i theta_j) and x_j = cos theta_j"""
        grid = CircleGrid(16)
        np.testing.assert_allclose(grid.nodes, np.exp(2j * grid.angles), atol=1e-15)
        np.testing.assert_allclose(grid.abscissae, np.cos(grid.angles), atol=1e-15)
        self.assertAlmostEqual(grid.abscissae[0], 1.0)
        self.assertAlmostEqual(grid.abscissae[8], 0.0)

    def test_indices_put_nyquist_negative(self):
        grid = CircleGrid(8)
        self.assertEqual(grid.indices.tolist(), [0, 1, 2, 3, -4, -3, -2, -1])

    def test_power_is_exact_root_of_unity(self):
        grid = CircleGrid(32)
        np.testing.assert_array_equal(grid.power(0), np.ones(32))
        np.testing.assert_allclose(grid.power(3), grid.nodes ** 3, atol=1e-14)
        np.testing.assert_allclose(grid.power(-1), np.conj(grid.nodes), atol=1e-15)

    def test_next_power_of_two(self):
        self.assertEqual(next_power_of_two(1), 1)
        self.assertEqual(next_power_of_two(64), 64)
        self.assertEqual(next_power_of_two(65), 128)


class TestFourierCoefficients(unittest.TestCase):

    def test_constant(self):
        """Test that g = 1 has c_0 = 1 and nothing else"""
        grid = CircleGrid(16)
        coeffs = to_coeffs(grid.constant(1.0))
        self.assertAlmostEqual(coeffs[0], 1.0)
        for n in coeffs:
            if n != 0:
                self.assertAlmostEqual(abs(coeffs[n]), 0.0, places=15)

    def test_monomial(self):
        grid = CircleGrid(16)
        coeffs = to_coeffs(grid.monomial(1))
        self.assertAlmostEqual(coeffs[1], 1.0)
        self.assertAlmostEqual(abs(coeffs[0]), 0.0, places=15)

    def test_matches_direct_sum(self):
        """Test against c_n = (1/N) sum_j g(z_j) z_j^(-n)"""
        grid = CircleGrid(16)
        rng = np.random.default_rng(3)
        g = CircleFunction(grid, rng.normal(size=16) + 1j * rng.normal(size=16))
        coeffs = to_coeffs(g)
        for n in range(-8, 8):
            direct = np.mean(g.samples * grid.nodes ** (-n))
            self.assertAlmostEqual(abs(coeffs[n] - direct), 0.0, places=13)

    def test_window_bounds(self):
        coeffs = to_coeffs(CircleGrid(8).constant(1.0))
        self.assertEqual(len(coeffs), 8)
        self.assertEqual(list(coeffs), list(range(-4, 4)))
        with self.assertRaises(KeyError):
            coeffs[4]
        self.assertEqual(coeffs.get(4), 0j)

    def test_roundtrip(self):
        grid = CircleGrid(64)
        g = random_function(grid, seed=1)
        back = from_coeffs(grid, g.coeffs)
        self.assertLessEqual(np.max(np.abs(back.samples - g.samples)), 1e-13 * np.max(np.abs(g.samples)))

    def test_roundtrip_up_to_two_to_the_sixteen(self):
        """Test samples of modulus <= 1 come back within 1e-13 on every grid up to 2^16"""
        rng = np.random.default_rng(5)
        for power in range(3, 17):
            grid = CircleGrid(2 ** power)
            samples = rng.uniform(-0.7, 0.7, grid.size) + 1j * rng.uniform(-0.7, 0.7, grid.size)
            g = CircleFunction(grid, samples)
            back = from_coeffs(grid, to_coeffs(g).array)
            self.assertLessEqual(np.max(np.abs(back.samples - samples)), 1e-13, grid.size)

    def test_from_mapping(self):
        grid = CircleGrid(16)
        g = from_coeffs(grid, {0: 3.0, 1: 1.0, -1: 1.0})
        np.testing.assert_allclose(g.samples, 3 + 2 * np.cos(2 * np.pi * np.arange(16) / 16), atol=1e-14)
        with self.assertRaises(GridMismatch):
            from_coeffs(grid, {8: 1.0})

    def test_wrong_length(self):
        with self.assertRaises(GridMismatch):
            from_coeffs(CircleGrid(16), np.zeros(8))
        with self.assertRaises(GridMismatch):
            CircleFunction(CircleGrid(16), np.zeros(8))


class TestProjections(unittest.TestCase):

    def setUp(self):
        self.grid = CircleGrid(32)

    def test_disk_projection_examples(self):
        """Test P_D on z^-1, z^2 and 3 + z + z^-1"""
        grid = self.grid
        self.assertLessEqual(np.max(np.abs(cauchy_project_disk(grid.monomial(-1)).samples)), 1e-15)
        self.assertLessEqual(
            np.max(np.abs(cauchy_project_disk(grid.monomial(2)).samples - grid.power(2))), 1e-14
        )
        g = from_coeffs(grid, {0: 3.0, 1: 1.0, -1: 1.0})
        expected = 3.0 + grid.nodes
        self.assertLessEqual(np.max(np.abs(cauchy_project_disk(g).samples - expected)), 1e-14)

    def test_disk_star_projection_examples(self):
        grid = self.grid
        self.assertLessEqual(np.max(np.abs(cauchy_project_disk_star(grid.monomial(1)).samples)), 1e-15)
        self.assertLessEqual(
            np.max(np.abs(cauchy_project_disk_star(grid.monomial(-2)).samples - grid.power(-2))), 1e-14
        )

    def test_resolution_of_identity(self):
        """Test P_D g + P_D* g - mean(g) = g"""
        g = random_function(self.grid, seed=7)
        total = cauchy_project_disk(g) + cauchy_project_disk_star(g) - mean_value(g)
        self.assertLessEqual(np.max(np.abs(total.samples - g.samples)), 1e-12)

    def test_idempotent(self):
        g = random_function(self.grid, seed=8)
        once = cauchy_project_disk(g)
        twice = cauchy_project_disk(once)
        self.assertLessEqual(np.max(np.abs(once.samples - twice.samples)), 1e-13)
        once = cauchy_project_disk_star(g)
        twice = cauchy_project_disk_star(once)
        self.assertLessEqual(np.max(np.abs(once.samples - twice.samples)), 1e-13)

    def test_star_identity_without_nyquist(self):
        """Test P_D* g = (P_D g*)* for a bandlimited g"""
        g = random_function(self.grid, seed=9, band=self.grid.size // 4)
        lhs = cauchy_project_disk_star(g)
        rhs = star(cauchy_project_disk(star(g)))
        self.assertLessEqual(np.max(np.abs(lhs.samples - rhs.samples)), 1e-13)

    @given(st.integers(min_value=0, max_value=2 ** 32 - 1))
    def test_projections_are_contractions(self, seed):
        g = random_function(CircleGrid(64), seed)
        self.assertLessEqual(l2_norm(cauchy_project_disk(g)), l2_norm(g) * (1 + 1e-12))
        self.assertLessEqual(l2_norm(cauchy_project_disk_star(g)), l2_norm(g) * (1 + 1e-12))


class TestHilbertTransform(unittest.TestCase):

    def setUp(self):
        self.grid = CircleGrid(64)

    def test_constant_maps_to_zero(self):
        h = hilbert_transform(self.grid.constant(2.5))
        self.assertLessEqual(np.max(np.abs(h.samples)), 1e-15)

    def test_cosine_to_sine(self):
        """Test H(Re z^n) = Im z^n"""
        for n in range(1, 6):
            power = self.grid.power(n)
            h = hilbert_transform(CircleFunction(self.grid, power.real))
            self.assertLessEqual(np.max(np.abs(h.samples - power.imag)), 1e-13)

    def test_real_output_and_isometry(self):
        g = random_function(self.grid, seed=11)
        real = CircleFunction(self.grid, g.samples.real)
        h = hilbert_transform(real)
        self.assertEqual(np.max(np.abs(h.samples.imag)), 0.0)
        self.assertLessEqual(l2_norm(h), l2_norm(real) * (1 + 1e-12))

    def test_square_is_minus_identity_on_mean_zero(self):
        real = CircleFunction(self.grid, random_function(self.grid, seed=12, band=16).samples.real)
        twice = hilbert_transform(hilbert_transform(real))
        expected = -(real.samples - mean_value(real).real)
        self.assertLessEqual(np.max(np.abs(twice.samples - expected)), 1e-12)

    def test_rejects_complex_input(self):
        with self.assertRaises(NonRealInput):
            hilbert_transform(self.grid.monomial(1))


class TestHelpers(unittest.TestCase):

    def setUp(self):
        self.grid = CircleGrid(32)

    def test_mean_value(self):
        self.assertAlmostEqual(mean_value(self.grid.constant(1.0)), 1.0)
        g = self.grid.monomial(1) + 5.0
        self.assertAlmostEqual(abs(mean_value(g) - 5.0), 0.0, places=14)

    def test_star(self):
        s = star(self.grid.constant(1j))
        np.testing.assert_allclose(s.samples, -1j)
        coeffs = to_coeffs(star(self.grid.monomial(1)))
        self.assertAlmostEqual(abs(coeffs[-1] - 1.0), 0.0, places=14)
        g = random_function(self.grid, seed=4)
        self.assertAlmostEqual(l2_norm(star(g)), l2_norm(g), places=12)

    def test_reflect(self):
        reflected = reflect(self.grid.monomial(3))
        self.assertLessEqual(np.max(np.abs(reflected.samples - self.grid.power(-3))), 1e-14)

    def test_norms(self):
        g = self.grid.monomial(2, 3.0) + 4.0
        self.assertAlmostEqual(l2_norm(g), 5.0, places=12)
        self.assertAlmostEqual(wiener_norm(g), 7.0, places=12)

    def test_arithmetic_checks_grid(self):
        with self.assertRaises(GridMismatch):
            self.grid.constant(1.0) + CircleGrid(16).constant(1.0)

    def test_bandwidth_and_leak(self):
        g = from_coeffs(self.grid, {-2: 1.0, 3: 0.5})
        self.assertEqual(bandwidth(g), 3)
        self.assertEqual(bandwidth(self.grid.constant(0.0)), -1)
        self.assertLessEqual(support_leak(g, -2, 3), 1e-15)
        self.assertAlmostEqual(support_leak(g, 0, 3), 1.0, places=14)

    def test_outer_residual(self):
        outer = CircleFunction(self.grid, np.exp(0.3 * np.conj(self.grid.nodes)))
        self.assertLessEqual(outer_residual(outer), 1e-14)
        # a Blaschke factor in 1/z has modulus 1 but a(inf) = 1/2
        w = np.conj(self.grid.nodes)
        blaschke = CircleFunction(self.grid, (0.5 - w) / (1 - 0.5 * w))
        self.assertGreater(outer_residual(blaschke), 0.5)


if __name__ == '__main__':
    unittest.main()

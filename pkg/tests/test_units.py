# tests/test_units.py - Tests for unit conversion, frequency grids and quadrature helpers

import unittest
import os
import sys
import numpy as np

# Add the project root to Python path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from utils.errors import DomainError, UnitError
from utils.numerics import principal_value_integral, gauss_legendre_nodes, sinhc
from utils.units import DEFAULT_UNITS, FrequencyGrid, convert, parse_quantity


class TestConvert(unittest.TestCase):
    """Test cases for convert and parse_quantity"""

    def test_micro_ev_to_rad_ns(self):
        """1 ueV is about 1.519 rad/ns"""
        self.assertAlmostEqual(convert(1.0, "ueV", "rad/ns"), 1.519, places=3)

    def test_ghz_is_cyclic(self):
        """22 GHz means 2 pi x 22 rad/ns"""
        self.assertAlmostEqual(convert(22.0, "GHz", "rad/ns"), 138.23, places=2)
        self.assertEqual(convert(22.0, "GHz_x2pi", "rad/ns"), convert(22.0, "GHz", "rad/ns"))

    def test_round_trip(self):
        """Converting there and back returns the input"""
        for unit in ("ueV", "meV", "GHz", "MHz", "K", "1/ns", "nm"):
            value = convert(convert(3.7, unit, "rad/ns"), "rad/ns", unit)
            self.assertAlmostEqual(value / 3.7, 1.0, delta=1e-12)

    def test_wavelength(self):
        """950 nm maps to 2 pi c / lambda"""
        omega = convert(950.0, "nm", "rad/ns")
        self.assertAlmostEqual(omega / 1.9829e6, 1.0, delta=1e-4)
        self.assertAlmostEqual(DEFAULT_UNITS.omega_to_wavelength(omega), 950.0, places=9)

    def test_unknown_unit(self):
        """Unsupported units raise UnitError"""
        with self.assertRaises(UnitError):
            convert(1.0, "furlong", "rad/ns")

    def test_incompatible_dimensions(self):
        """Time cannot become a frequency"""
        with self.assertRaises(UnitError):
            convert(1.0, "ns", "rad/ns")

    def test_parse_quantity(self):
        """Suffixes are converted, bare numbers are taken in the target unit"""
        self.assertAlmostEqual(parse_quantity("22 GHz", "rad/ns"), 2 * np.pi * 22)
        self.assertEqual(parse_quantity("5.5", "rad/ns"), 5.5)
        self.assertEqual(parse_quantity("inf", "rad/ns"), float("inf"))
        with self.assertRaises(UnitError):
            parse_quantity("ten GHz", "rad/ns")
        with self.assertRaises(UnitError):
            parse_quantity("3 GHz", None)

    def test_negative_wavelength(self):
        with self.assertRaises(DomainError):
            DEFAULT_UNITS.wavelength_to_omega(-1.0)


class TestFrequencyGrid(unittest.TestCase):
    """Test cases for FrequencyGrid"""

    def test_uniform(self):
        grid = FrequencyGrid.uniform(-1.0, 1.0, 11)
        self.assertEqual(len(grid), 11)
        self.assertTrue(grid.contains(0.0))
        self.assertFalse(grid.contains(1.5))

    def test_dense_near(self):
        """Spacing is finest at the center and the span is covered"""
        grid = FrequencyGrid.dense_near(5.0, 0.1, 100.0, 401)
        steps = np.diff(grid.points)
        self.assertAlmostEqual(grid.start, -95.0, places=6)
        self.assertAlmostEqual(grid.stop, 105.0, places=6)
        self.assertLess(steps[200], steps[0])

    def test_rejects_unsorted(self):
        with self.assertRaises(ValueError):
            FrequencyGrid(points=[0.0, 2.0, 1.0])

    def test_shifted(self):
        grid = FrequencyGrid.uniform(0.0, 1.0, 5).shifted(10.0)
        self.assertAlmostEqual(grid.start, 10.0)


class TestNumerics(unittest.TestCase):
    """Test cases for the quadrature helpers"""

    def test_principal_value_linear(self):
        """PV of w / (0 - w) over [-1, 1] is -2"""
        grid = FrequencyGrid.uniform(-1.0, 1.0, 2001)
        self.assertAlmostEqual(principal_value_integral(lambda w: w, 0.0, grid=grid), -2.0, places=8)

    def test_principal_value_symmetric(self):
        """A constant over a symmetric range has zero principal value"""
        grid = FrequencyGrid.uniform(-1.0, 1.0, 2001)
        self.assertAlmostEqual(principal_value_integral(np.ones(2001), 0.0, grid=grid), 0.0, places=10)

    def test_principal_value_callable(self):
        """The adaptive form agrees with the grid form"""
        value = principal_value_integral(lambda w: w, 0.0, limits=(-1.0, 1.0))
        self.assertAlmostEqual(value, -2.0, places=8)

    def test_pole_outside(self):
        grid = FrequencyGrid.uniform(-1.0, 1.0, 11)
        with self.assertRaises(DomainError):
            principal_value_integral(np.ones(11), 2.0, grid=grid)

    def test_gauss_legendre(self):
        """Composite rule integrates a cubic exactly"""
        nodes, weights = gauss_legendre_nodes([0.0, 1.0, 3.0], order=4)
        self.assertAlmostEqual(float(np.sum(weights * nodes ** 3)), 81.0 / 4.0, places=10)

    def test_sinhc(self):
        """sinh(z)/z is 1 at the origin"""
        self.assertAlmostEqual(float(np.real(sinhc(0.0))), 1.0)
        self.assertAlmostEqual(float(np.real(sinhc(1.0))), np.sinh(1.0), places=12)


if __name__ == '__main__':
    unittest.main()

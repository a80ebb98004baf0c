# tests/test_resonance_fluorescence.py - Tests for resonance-fluorescence intensities, g2 and the Mollow triplet

import unittest
import os
import sys
import numpy as np

# Add the project root to Python path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from physics.resonance_fluorescence import (
    DriveParams, intensities, steady_state_population, g2, mollow_spectrum, sideband_positions,
)
from utils.errors import DegenerateInput, DomainError
from utils.units import FrequencyGrid


class TestIntensities(unittest.TestCase):
    """Test cases for intensities and the steady state"""

    def test_saturation_knee(self):
        """Omega_p = gamma / sqrt(8) splits the light evenly at 1/8 each"""
        i = intensities(DriveParams(omega_p=1.0 / np.sqrt(8.0), gamma=1.0))
        self.assertAlmostEqual(i.coherent, 0.125, places=12)
        self.assertAlmostEqual(i.incoherent, 0.125, places=12)

    def test_weak_drive_ratio(self):
        """I_inc / I_coh tends to 2 gamma_dp / gamma"""
        i = intensities(DriveParams(omega_p=1e-4, gamma=1.0, gamma_dp=0.3))
        self.assertAlmostEqual(i.incoherent / i.coherent, 0.6, places=6)

    def test_strong_drive_saturates(self):
        p = DriveParams(omega_p=1e4, gamma=1.0)
        i = intensities(p)
        self.assertLess(i.coherent / i.incoherent, 1e-6)
        self.assertAlmostEqual(steady_state_population(p), 0.5, places=6)

    def test_population_bound(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            p = DriveParams(omega_p=rng.uniform(0, 10), gamma=rng.uniform(0.1, 2), gamma_dp=rng.uniform(0, 2))
            self.assertLessEqual(steady_state_population(p), 0.5)

    def test_no_rates(self):
        with self.assertRaises(DegenerateInput):
            intensities(DriveParams(omega_p=0.0, gamma=0.0))


class TestG2(unittest.TestCase):
    """Test cases for the second-order correlation"""

    def test_antibunching(self):
        for p in (DriveParams(omega_p=5.0, gamma=1.0), DriveParams(omega_p=0.01, gamma=1.0, gamma_dp=0.5)):
            self.assertEqual(g2(p, 0.0), 0.0)

    def test_long_delay(self):
        self.assertAlmostEqual(g2(DriveParams(omega_p=2.0, gamma=1.0), 200.0), 1.0, places=12)

    def test_rabi_overshoot(self):
        """First maximum near pi / mu exceeds one"""
        p = DriveParams(omega_p=5.0, gamma=1.0)
        tau = np.linspace(0.0, 1.0, 10001)
        values = g2(p, tau)
        first = tau[np.argmax(values)]
        self.assertGreater(values.max(), 1.0)
        self.assertAlmostEqual(first / (np.pi / p.mu.real), 1.0, delta=0.1)

    def test_overdamped_non_negative(self):
        p = DriveParams(omega_p=0.01, gamma=1.0)
        self.assertGreater(abs(p.mu.imag), 0.0)
        values = g2(p, np.linspace(0.0, 20.0, 401))
        self.assertTrue(np.all(values >= 0.0))
        self.assertTrue(np.all(np.isreal(values)))

    def test_critical_point_continuous(self):
        """The mu = 0 limit joins the oscillating branch"""
        tau = np.linspace(0.0, 10.0, 101)
        critical = g2(DriveParams(omega_p=0.125, gamma=1.0), tau)
        nearby = g2(DriveParams(omega_p=0.125 + 1e-7, gamma=1.0), tau)
        np.testing.assert_allclose(critical, nearby, atol=1e-5)

    def test_negative_delay(self):
        with self.assertRaises(DomainError):
            g2(DriveParams(omega_p=1.0, gamma=1.0), -1.0)


class TestMollow(unittest.TestCase):
    """Test cases for mollow_spectrum"""

    def test_sidebands_at_twice_rabi(self):
        p = DriveParams(omega_p=10.0, gamma=1.0)
        spectrum = mollow_spectrum(p, FrequencyGrid.uniform(-40.0, 40.0, 8001)).incoherent
        lower, upper = sideband_positions(spectrum)
        self.assertAlmostEqual(upper, 20.0, delta=0.2)
        self.assertAlmostEqual(lower, -20.0, delta=0.2)

    def test_symmetric(self):
        p = DriveParams(omega_p=3.0, gamma=1.0, gamma_dp=0.2)
        density = mollow_spectrum(p, FrequencyGrid.uniform(-30.0, 30.0, 6001)).incoherent.density
        np.testing.assert_allclose(density, density[::-1], rtol=1e-10)

    def test_weak_drive_coherent_dominates(self):
        p = DriveParams(omega_p=0.01, gamma=1.0)
        result = mollow_spectrum(p, FrequencyGrid.uniform(-50.0, 50.0, 20001))
        self.assertGreater(result.coherent_weight / result.incoherent.area(), 50.0)

    def test_frame(self):
        result = mollow_spectrum(DriveParams(omega_p=2.0, gamma=1.0), FrequencyGrid.uniform(-10.0, 10.0, 201))
        frame = result.to_frame()
        self.assertEqual(list(frame.columns), ["delta", "incoherent"])
        self.assertEqual(len(frame), 201)

    def test_overdamped_single_peak(self):
        p = DriveParams(omega_p=0.05, gamma=1.0)
        spectrum = mollow_spectrum(p, FrequencyGrid.uniform(-20.0, 20.0, 4001)).incoherent
        self.assertIsNone(sideband_positions(spectrum))

    def test_splitting_scales_with_drive(self):
        """Sideband offset grows as the square root of the drive power"""
        drives = np.geomspace(5.0, 50.0, 5)
        offsets = []
        for omega_p in drives:
            grid = FrequencyGrid.uniform(-3.0 * omega_p, 3.0 * omega_p, 12001)
            _, upper = sideband_positions(mollow_spectrum(DriveParams(omega_p=omega_p, gamma=1.0), grid).incoherent)
            offsets.append(upper)
        exponent = np.polyfit(np.log(drives ** 2), np.log(offsets), 1)[0]
        self.assertAlmostEqual(exponent, 0.5, delta=0.01)

    def test_no_drive(self):
        with self.assertRaises(DegenerateInput):
            mollow_spectrum(DriveParams(omega_p=0.0, gamma=1.0), FrequencyGrid.uniform(-1.0, 1.0, 11))


if __name__ == '__main__':
    unittest.main()

# tests/test_phonons.py - Tests for LA-phonon coupling, phonon-assisted cavity feeding and IBM spectra

import unittest
import os
import sys
import numpy as np
from scipy import integrate

# Add the project root to Python path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from physics.cavity_jc import JcParams
from physics.phonons import (
    PhononParams, occupation, spectral_density, effective_phonon_density, effective_phonon_dos, huang_rhys,
    phonon_wavelength, phonon_purcell_rate, phonon_purcell_curve, franck_condon_factor, ibm_spectrum,
)
from utils.errors import DomainError, ModelError
from utils.units import DEFAULT_UNITS, FrequencyGrid

MEV = DEFAULT_UNITS.energy_to_omega(1e-3)


def ibm_grid(n=4001):
    return FrequencyGrid.dense_near(0.0, 1.0, 12.0 * MEV, n)


class TestOccupation(unittest.TestCase):
    """Test cases for the Bose-Einstein occupation"""

    def test_one_mev_at_ten_kelvin(self):
        self.assertAlmostEqual(occupation(MEV, 10.0), 0.457, delta=0.005)

    def test_zero_temperature(self):
        self.assertEqual(occupation(MEV, 0.0), 0.0)

    def test_classical_limit(self):
        """k_B T = 100 hbar W gives n close to k_B T / hbar W"""
        temperature = 100.0 * DEFAULT_UNITS.omega_to_energy(MEV) / DEFAULT_UNITS.k_B
        self.assertAlmostEqual(occupation(MEV, temperature) / 100.0, 1.0, delta=0.01)

    def test_zero_frequency(self):
        with self.assertRaises(DomainError):
            occupation(0.0, 4.0)


class TestSpectralDensity(unittest.TestCase):
    """Test cases for J and the effective phonon density"""

    def setUp(self):
        self.p = PhononParams(temperature=10.0)
        self.omega = np.linspace(1.0, 5.0 * self.p.cutoff, 20000)

    def test_vanishes_at_zero(self):
        self.assertEqual(spectral_density(self.p, 0.0), 0.0)

    def test_equal_potentials_cancel(self):
        p = PhononParams(d_e=-5.0, d_g=-5.0)
        self.assertTrue(np.all(spectral_density(p, self.omega) == 0.0))

    def test_cutoff_scales_with_size(self):
        """Doubling the envelope width halves the peak frequency"""
        small = self.omega[np.argmax(spectral_density(PhononParams(), self.omega))]
        large = self.omega[np.argmax(spectral_density(PhononParams(sigma_e=2.74, sigma_g=2.74), self.omega))]
        self.assertAlmostEqual(large / small, 0.5, delta=0.005)

    def test_peak_position(self):
        """J peaks at sqrt(3/2) c_s / sigma, a phonon wavelength of about 7 nm"""
        peak = self.omega[np.argmax(effective_phonon_dos(self.p, self.omega))]
        self.assertAlmostEqual(peak / (np.sqrt(1.5) * self.p.cutoff), 1.0, delta=1e-3)
        self.assertAlmostEqual(phonon_wavelength(peak, self.p), 7.03, delta=0.05)

    def test_dos_independent_of_temperature(self):
        np.testing.assert_array_equal(effective_phonon_dos(PhononParams(temperature=0.0), self.omega),
                                      effective_phonon_dos(PhononParams(temperature=50.0), self.omega))

    def test_detailed_balance(self):
        w = np.array([0.5, 1.0, 2.0]) * MEV
        ratio = effective_phonon_density(self.p, -w) / effective_phonon_density(self.p, w)
        expected = np.exp(-DEFAULT_UNITS.omega_to_energy(w) / (DEFAULT_UNITS.k_B * 10.0))
        np.testing.assert_allclose(ratio, expected, rtol=1e-10)

    def test_no_absorption_at_zero_temperature(self):
        p = PhononParams(temperature=0.0)
        self.assertEqual(effective_phonon_density(p, -MEV), 0.0)
        self.assertGreater(effective_phonon_density(p, MEV), 0.0)
        self.assertEqual(effective_phonon_density(p, 0.0), 0.0)

    def test_huang_rhys(self):
        """Bulk GaAs with 9.8 eV deformation-potential contrast"""
        self.assertAlmostEqual(huang_rhys(PhononParams()), 0.220, delta=0.005)
        self.assertAlmostEqual(franck_condon_factor(PhononParams()), np.exp(-huang_rhys(PhononParams())), places=6)


class TestPhononRate(unittest.TestCase):
    """Test cases for phonon-assisted cavity feeding"""

    def setUp(self):
        self.jc = JcParams(g=10.0, kappa=200.0, gamma_ng=1.0)

    def test_resonant_limit(self):
        """Phi vanishes at zero detuning"""
        result = phonon_purcell_rate(PhononParams(temperature=20.0), self.jc, 0.0)
        self.assertAlmostEqual(result.rate, 1.0 + 4 * 100.0 / 201.0, places=10)
        self.assertFalse(result.valid)

    def test_far_detuned(self):
        result = phonon_purcell_rate(PhononParams(temperature=20.0), self.jc, 1e6)
        self.assertAlmostEqual(result.rate, 1.0, places=6)
        self.assertTrue(result.valid)

    def test_emission_favoured_at_zero_temperature(self):
        p = PhononParams(temperature=0.0)
        delta = 1.0 * MEV
        self.assertGreater(phonon_purcell_rate(p, self.jc, delta).rate, phonon_purcell_rate(p, self.jc, -delta).rate)

    def test_asymmetry_shrinks_with_temperature(self):
        delta = 1.0 * MEV
        gaps = []
        for temperature in (0.0, 40.0):
            p = PhononParams(temperature=temperature)
            gaps.append(phonon_purcell_rate(p, self.jc, delta).rate / phonon_purcell_rate(p, self.jc, -delta).rate)
        self.assertLess(gaps[1], gaps[0])

    def test_curve(self):
        deltas = np.linspace(-2.0, 2.0, 41) * MEV
        frame = phonon_purcell_curve(PhononParams(temperature=10.0), self.jc, deltas)
        self.assertEqual(list(frame.columns), ["delta_rad_ns", "delta_meV", "rate", "valid"])
        self.assertAlmostEqual(frame["delta_meV"].iloc[-1], 2.0, places=9)
        self.assertFalse(frame["valid"].iloc[20])
        single = phonon_purcell_rate(PhononParams(temperature=10.0), self.jc, deltas[5]).rate
        self.assertAlmostEqual(frame["rate"].iloc[5], single, places=12)

    def test_lossless_cavity(self):
        with self.assertRaises(DomainError):
            phonon_purcell_rate(PhononParams(), JcParams(g=1.0, kappa=0.0), MEV)


class TestIbmSpectrum(unittest.TestCase):
    """Test cases for the independent-boson emission spectrum"""

    def test_no_phonons_is_lorentzian(self):
        result = ibm_spectrum(PhononParams(), 1.0, ibm_grid(), spectral=lambda w: np.zeros_like(w))
        self.assertEqual(result.sideband_fraction, 0.0)
        self.assertEqual(result.zpl_weight, 1.0)
        s = result.spectrum
        self.assertAlmostEqual(np.interp(0.5, s.omega, s.density), 0.5, places=3)

    def test_sum_rule(self):
        result = ibm_spectrum(PhononParams(), 1.0, ibm_grid(), normalization="raw")
        self.assertAlmostEqual(result.raw_area / np.pi, 1.0, delta=0.01)
        self.assertAlmostEqual(result.sideband_fraction, 1.0 - result.zpl_weight, delta=0.02)

    def test_frame(self):
        grid = ibm_grid(401)
        frame = ibm_spectrum(PhononParams(temperature=10.0), 1.0, grid).to_frame()
        self.assertEqual(list(frame.columns), ["delta", "delta_meV", "density", "zero_phonon", "sideband"])
        self.assertAlmostEqual(frame["delta_meV"].iloc[-1], 12.0, places=6)

    def test_zero_temperature_emission_side(self):
        """At T = 0 the sideband lies on the low-energy side"""
        grid = ibm_grid()
        result = ibm_spectrum(PhononParams(temperature=0.0), 1.0, grid)
        side = np.where(np.abs(grid.points) > 3.0, result.sideband, 0.0)
        low = integrate.trapezoid(np.where(grid.points < 0, side, 0.0), grid.points)
        high = integrate.trapezoid(np.where(grid.points > 0, side, 0.0), grid.points)
        self.assertLess(abs(high), 0.05 * low)

    def test_sideband_grows_with_temperature(self):
        fractions = [ibm_spectrum(PhononParams(temperature=t), 1.0, ibm_grid()).sideband_fraction
                     for t in (0.0, 10.0, 20.0, 40.0)]
        self.assertTrue(all(a < b for a, b in zip(fractions, fractions[1:])))

    def test_not_super_ohmic(self):
        p = PhononParams()
        with self.assertRaises(ModelError):
            ibm_spectrum(p, 1.0, ibm_grid(), spectral=lambda w: w * np.exp(-w / p.cutoff))

    def test_grid_too_narrow(self):
        with self.assertRaises(DomainError):
            ibm_spectrum(PhononParams(), 1.0, FrequencyGrid.uniform(-MEV, MEV, 101))

    def test_linewidth_positive(self):
        with self.assertRaises(DomainError):
            ibm_spectrum(PhononParams(), 0.0, ibm_grid())


if __name__ == '__main__':
    unittest.main()

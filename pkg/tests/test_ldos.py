# tests/test_ldos.py - Tests for LDOS profiles and Purcell / beta formulas

import unittest
import os
import sys
import tempfile
import numpy as np

# Add the project root to Python path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from physics.ldos import (
    HomogeneousProfile, LorentzianCavity, WaveguideBandEdge, TabulatedProfile,
    CavityParams, WaveguideModeParams, evaluate_purcell, purcell_frame, cavity_fp_max, cavity_fp_res,
    waveguide_fp_max, beta_factor, beta_from_purcell,
)
from utils.errors import DegenerateInput, DomainError
from utils.units import convert

OMEGA_C = convert(950.0, "nm", "rad/ns")


class TestProfiles(unittest.TestCase):
    """Test cases for the Purcell spectra"""

    def test_homogeneous(self):
        self.assertEqual(evaluate_purcell(HomogeneousProfile(), 1.0e6), 1.0)

    def test_lorentzian_resonance_and_half_width(self):
        """F_res on resonance and F_res/2 one half-width away"""
        cav = LorentzianCavity(omega_c=OMEGA_C, q=1e4, fp_res=20.0)
        self.assertAlmostEqual(evaluate_purcell(cav, OMEGA_C), 20.0, places=9)
        self.assertAlmostEqual(evaluate_purcell(cav, OMEGA_C + cav.half_width), 10.0, places=6)
        self.assertAlmostEqual(cav.kappa, OMEGA_C / 1e4)

    def test_lorentzian_background_added(self):
        cav = LorentzianCavity(omega_c=OMEGA_C, q=1e4, fp_res=20.0, background=0.5)
        self.assertAlmostEqual(evaluate_purcell(cav, OMEGA_C), 20.5, places=9)

    def test_lorentzian_vectorized(self):
        cav = LorentzianCavity(omega_c=OMEGA_C, q=1e4, fp_res=20.0)
        values = evaluate_purcell(cav, OMEGA_C + np.array([-1e3, 0.0, 1e3]))
        self.assertEqual(values.shape, (3,))
        self.assertAlmostEqual(values[0], values[2], places=9)

    def test_purcell_frame(self):
        cav = LorentzianCavity(omega_c=OMEGA_C, q=1e4, fp_res=20.0)
        frame = purcell_frame(cav, OMEGA_C + np.array([-10.0, 0.0, 10.0]), OMEGA_C)
        self.assertEqual(list(frame.columns), ["omega", "offset", "purcell"])
        np.testing.assert_allclose(frame["offset"], [-10.0, 0.0, 10.0], atol=1e-6)
        self.assertAlmostEqual(frame["purcell"].iloc[1], 20.0, places=9)

    def test_band_edge(self):
        """Plateau above the edge, roll-off to the background below it"""
        edge = WaveguideBandEdge(fp_peak=10.0, omega_edge=OMEGA_C, rolloff_width=20.0, background=0.1)
        self.assertAlmostEqual(evaluate_purcell(edge, OMEGA_C + 500.0), 10.0)
        self.assertAlmostEqual(evaluate_purcell(edge, OMEGA_C - 500.0), 0.1, places=9)
        self.assertLess(evaluate_purcell(edge, OMEGA_C - 20.0), 10.0)

    def test_band_edge_finite_plateau(self):
        edge = WaveguideBandEdge(fp_peak=10.0, omega_edge=OMEGA_C, rolloff_width=20.0,
                                 background=0.1, plateau_width=100.0)
        self.assertAlmostEqual(evaluate_purcell(edge, OMEGA_C + 50.0), 10.0)
        self.assertAlmostEqual(evaluate_purcell(edge, OMEGA_C + 600.0), 0.1, places=9)

    def test_tabulated_interpolates(self):
        tab = TabulatedProfile(omega=(1.0, 2.0, 3.0), values=(0.0, 2.0, 4.0))
        self.assertAlmostEqual(evaluate_purcell(tab, 2.5), 3.0)
        with self.assertRaises(DomainError):
            evaluate_purcell(tab, 3.5)

    def test_tabulated_rejects_negative(self):
        with self.assertRaises(ValueError):
            TabulatedProfile(omega=(1.0, 2.0), values=(1.0, -1.0))

    def test_tabulated_from_csv(self):
        """Frequency column is converted from the given unit"""
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "ldos.csv")
            with open(path, "w") as handle:
                handle.write("omega_ueV,fp\n1,1.0\n2,3.0\n3,1.0\n")
            tab = TabulatedProfile.from_csv(path, omega_unit="ueV")
        self.assertAlmostEqual(tab.omega[1], convert(2.0, "ueV", "rad/ns"))
        self.assertEqual(tab.values, (1.0, 3.0, 1.0))


class TestPurcellFormulas(unittest.TestCase):
    """Test cases for cavity and waveguide Purcell factors"""

    def test_cavity_fp_max(self):
        """Q = 9.6e4, V = 0.75 gives about 9.73e3"""
        p = CavityParams(omega_c=OMEGA_C, q=9.6e4, v_eff=0.75)
        self.assertAlmostEqual(cavity_fp_max(p) / 9.73e3, 1.0, delta=1e-3)

    def test_cavity_fp_unit(self):
        p = CavityParams(omega_c=OMEGA_C, q=4 * np.pi ** 2 / 3, v_eff=1.0)
        self.assertAlmostEqual(cavity_fp_max(p), 1.0, places=12)

    def test_cavity_fp_res_mismatch(self):
        """Placement and orientation scale the resonant factor"""
        p = CavityParams(omega_c=OMEGA_C, q=1e4, v_eff=1.0, f_r=0.5, alignment=0.5)
        self.assertAlmostEqual(cavity_fp_res(p), 0.25 * cavity_fp_max(p))
        self.assertAlmostEqual(LorentzianCavity.from_cavity(p).fp_res, cavity_fp_res(p))

    def test_waveguide_fp(self):
        """n_g = 300 gives about 61, n_g = 58 about 11.9"""
        self.assertAlmostEqual(waveguide_fp_max(WaveguideModeParams(n_g=300.0), 950.0), 61.4, delta=0.2)
        self.assertAlmostEqual(waveguide_fp_max(WaveguideModeParams(n_g=58.0), 950.0), 11.9, delta=0.05)

    def test_waveguide_scales_with_group_index(self):
        slow = waveguide_fp_max(WaveguideModeParams(n_g=100.0), 950.0)
        fast = waveguide_fp_max(WaveguideModeParams(n_g=50.0), 950.0)
        self.assertAlmostEqual(slow / fast, 2.0)


class TestBeta(unittest.TestCase):
    """Test cases for the beta factor"""

    def test_beta(self):
        self.assertAlmostEqual(beta_factor(9.0, 0.1, 0.0), 0.989, places=3)

    def test_beta_from_purcell(self):
        self.assertAlmostEqual(beta_from_purcell(9.0, 0.1), beta_factor(9.0, 0.1, 0.0))

    def test_beta_degenerate(self):
        with self.assertRaises(DegenerateInput):
            beta_factor(0.0, 0.0, 0.0)

    def test_beta_negative(self):
        with self.assertRaises(DomainError):
            beta_factor(-1.0, 1.0, 0.0)


if __name__ == '__main__':
    unittest.main()

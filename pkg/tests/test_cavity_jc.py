# tests/test_cavity_jc.py - Tests for the dissipative Jaynes-Cummings model

import unittest
import os
import sys
import numpy as np

# Add the project root to Python path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from physics.cavity_jc import (
    JcParams, JcState, cavity_preset, from_ldos, to_ldos, evolve, analytic_rho11, classify_regime,
    rabi_frequency, rabi_splitting, weak_coupling_rate, rho_bar, jc_spectra, dressed_ladder,
)
from physics.ldos import CavityParams, cavity_fp_res
from physics.spectrum import fit_doublet, peak_splitting
from utils.errors import DegenerateInput, DomainError, FitError
from utils.units import FrequencyGrid, convert

OMEGA_C = convert(950.0, "nm", "rad/ns")


def cavity_with(q, fp_res):
    """Cavity whose resonant Purcell factor is fp_res"""
    return CavityParams(omega_c=OMEGA_C, q=q, v_eff=3.0 * q / (4.0 * np.pi ** 2 * fp_res))


class TestParameters(unittest.TestCase):
    """Test cases for the LDOS mapping and the coupling regimes"""

    def test_rabi_frequency_from_q_and_purcell(self):
        """Q = 1e5, F = 100: kappa = 19.83, g^2 = 495.7, |Omega_R| = 43.41"""
        p = from_ldos(cavity_with(1e5, 100.0), 1.0, 1.0)
        self.assertAlmostEqual(p.kappa, 19.83, delta=0.01)
        self.assertAlmostEqual(p.g ** 2, 495.7, delta=0.1)
        self.assertEqual(p.gamma_ng, 0.0)
        self.assertAlmostEqual(abs(rabi_frequency(p)), 43.41, delta=0.02)

    def test_purcell_round_trip(self):
        cav = cavity_with(2e4, 37.0)
        p = from_ldos(cav, 0.8, 0.9)
        self.assertAlmostEqual(4.0 * p.g ** 2 / p.kappa / 0.8, cavity_fp_res(cav), places=9)
        profile, gamma_side = to_ldos(p, OMEGA_C, 0.8)
        self.assertAlmostEqual(profile.fp_res, cavity_fp_res(cav), places=9)
        self.assertAlmostEqual(gamma_side, p.gamma_ng)

    def test_high_q_limit(self):
        """At fixed F_P both g and kappa vanish while 4 g^2 / kappa stays put"""
        low, high = from_ldos(cavity_with(1e6, 50.0), 1.0, 1.0), from_ldos(cavity_with(1e8, 50.0), 1.0, 1.0)
        self.assertLess(high.g, low.g)
        self.assertLess(high.kappa, low.kappa)
        self.assertAlmostEqual(4 * high.g ** 2 / high.kappa, 4 * low.g ** 2 / low.kappa, places=6)

    def test_zero_beta(self):
        with self.assertRaises(DegenerateInput):
            from_ldos(cavity_with(1e4, 10.0), 1.0, 0.0)

    def test_presets(self):
        self.assertEqual(classify_regime(cavity_preset("pc_cavity")), "strong")
        self.assertEqual(classify_regime(cavity_preset("micropillar")), "strong")
        with self.assertRaises(DomainError):
            cavity_preset("teapot")

    def test_regimes(self):
        self.assertEqual(classify_regime(JcParams(g=0.0, kappa=1.0)), "weak")
        self.assertEqual(classify_regime(JcParams(g=0.25, kappa=2.0, gamma_ng=1.0)), "intermediate")
        self.assertEqual(classify_regime(JcParams(g=0.01, kappa=2.0, gamma_ng=1.0)), "weak")
        self.assertEqual(classify_regime(JcParams(g=0.3, kappa=2.0, gamma_ng=1.0)), "strong")

    def test_weak_factor_override(self):
        p = JcParams(g=0.05, kappa=2.0, gamma_ng=1.0)
        self.assertEqual(classify_regime(p), "intermediate")
        self.assertEqual(classify_regime(p, weak_factor=0.5), "weak")

    def test_rabi_splitting_zero_when_not_strong(self):
        self.assertEqual(rabi_splitting(JcParams(g=0.01, kappa=2.0)), 0.0)

    def test_weak_coupling_rate(self):
        p = JcParams(g=1.0, kappa=100.0, gamma_ng=0.5)
        self.assertAlmostEqual(weak_coupling_rate(p), 0.54)
        detuned = JcParams(g=1.0, kappa=100.0, gamma_ng=0.5, delta=50.0)
        self.assertAlmostEqual(weak_coupling_rate(detuned), 0.52)


class TestDynamics(unittest.TestCase):
    """Test cases for evolve and analytic_rho11"""

    def test_uncoupled_emitter(self):
        p = JcParams(g=0.0, kappa=3.0, gamma_ng=1.0)
        traj = evolve(p, JcState(), 5.0, 0.01)
        np.testing.assert_allclose(traj.rho11, np.exp(-traj.t), atol=1e-9)
        self.assertTrue(np.all(traj.rho22 == 0.0))

    def test_lossless_rabi(self):
        p = JcParams(g=1.0, kappa=0.0)
        traj = evolve(p, JcState(), 10.0, 0.01)
        np.testing.assert_allclose(traj.rho11, np.cos(traj.t) ** 2, atol=1e-7)
        self.assertAlmostEqual(float(analytic_rho11(p, 2.0)), np.cos(2.0) ** 2, places=12)

    def test_analytic_matches_integrator(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            p = JcParams(g=rng.uniform(0.0, 20.0), kappa=rng.uniform(0.5, 40.0), gamma_ng=rng.uniform(0.0, 5.0))
            T = 20.0 / (p.gamma_ng + p.kappa)
            traj = evolve(p, JcState(), T, min(0.01 / p.max_rate, T / 200))
            np.testing.assert_allclose(traj.rho11, analytic_rho11(p, traj.t), atol=1e-6)

    def test_analytic_initial_value(self):
        self.assertAlmostEqual(float(analytic_rho11(JcParams(g=3.0, kappa=7.0, gamma_ng=1.0), 0.0)), 1.0)

    def test_analytic_needs_resonance(self):
        with self.assertRaises(DomainError):
            analytic_rho11(JcParams(g=1.0, kappa=1.0, delta=1.0), 1.0)

    def test_weak_coupling_exponential(self):
        p = JcParams(g=1.0, kappa=100.0, gamma_ng=0.5)
        t = np.linspace(1.0, 5.0, 41)
        slope = np.polyfit(t, np.log(analytic_rho11(p, t)), 1)[0]
        self.assertAlmostEqual(-slope / weak_coupling_rate(p), 1.0, delta=0.01)

    def test_microdisk_envelope(self):
        """Damped vacuum Rabi oscillation with envelope rate (gamma_ng + kappa) / 2"""
        p = cavity_preset("microdisk")
        traj = evolve(p, JcState(), 2.0, 0.05 / p.max_rate)
        total = traj.rho11 + traj.rho22
        self.assertTrue(np.any(np.diff(traj.rho11) > 0))
        self.assertTrue(np.all(np.diff(total) <= 1e-12))
        # rho11 + rho22 decays on average at (gamma_ng + kappa) / 2
        slope = np.polyfit(traj.t, np.log(total), 1)[0]
        self.assertAlmostEqual(-slope / (0.5 * (p.gamma_ng + p.kappa)), 1.0, delta=0.05)

    def test_coherence_bound(self):
        p = JcParams(g=5.0, kappa=2.0, gamma_ng=0.5, gamma_dp=1.0, delta=3.0)
        traj = evolve(p, JcState(), 5.0, 0.001)
        self.assertTrue(np.all(np.abs(traj.rho12) ** 2 <= traj.rho11 * traj.rho22 + 1e-9))
        self.assertTrue(np.all(traj.rho11 >= -1e-9))

    def test_step_too_large(self):
        with self.assertRaises(DomainError):
            evolve(JcParams(g=10.0, kappa=1.0), JcState(), 1.0, 0.1)

    def test_state_validation(self):
        with self.assertRaises(ValueError):
            JcState(rho11=0.8, rho22=0.5)
        with self.assertRaises(ValueError):
            JcState(rho11=0.1, rho22=0.1, rho12=0.5)


class TestSpectra(unittest.TestCase):
    """Test cases for jc_spectra"""

    def test_rho_bar_methods_agree(self):
        p = JcParams(g=3.0, kappa=5.0, gamma_ng=1.0, gamma_dp=0.5, delta=2.0)
        a, b = rho_bar(p), rho_bar(p, method="resolvent")
        self.assertAlmostEqual(a.rho11, b.rho11, delta=1e-4)
        self.assertAlmostEqual(a.rho22, b.rho22, delta=1e-4)
        self.assertAlmostEqual(abs(a.rho12 - b.rho12), 0.0, delta=1e-4)

    def test_uncoupled_emitter_line(self):
        """g = 0: emitter Lorentzian of FWHM gamma_ng + 2 gamma_dp, no cavity light"""
        p = JcParams(g=0.0, kappa=1.0, gamma_ng=1.0, gamma_dp=0.5)
        spectra = jc_spectra(p, FrequencyGrid.uniform(-20.0, 20.0, 4001))
        self.assertAlmostEqual(np.interp(1.0, spectra.emitter.omega, spectra.emitter.density), 0.5, places=3)
        self.assertEqual(float(np.max(spectra.cavity.density)), 0.0)

    def test_vacuum_rabi_doublet(self):
        p = from_ldos(cavity_with(1e5, 100.0), 1.0, 1.0)
        spectra = jc_spectra(p)
        self.assertEqual(len(spectra.emitter.peaks()), 2)
        self.assertEqual(len(spectra.cavity.peaks()), 2)
        for spectrum in (spectra.emitter, spectra.cavity):
            self.assertAlmostEqual(fit_doublet(spectrum).splitting / rabi_splitting(p), 1.0, delta=0.01)

    def test_raw_maxima_differ_from_pole_splitting(self):
        """Maxima of overlapping polariton lines are shifted by more than 1%; the pole fit is not"""
        p = from_ldos(cavity_with(1e5, 100.0), 1.0, 1.0)
        spectra = jc_spectra(p)
        self.assertGreater(abs(peak_splitting(spectra.emitter) / rabi_splitting(p) - 1.0), 0.01)
        fitted = fit_doublet(spectra.emitter)
        self.assertAlmostEqual(fitted.splitting / rabi_splitting(p), 1.0, delta=1e-3)
        self.assertLess(fitted.rms, 1e-3)

    def test_doublet_fit_needs_two_peaks(self):
        p = from_ldos(cavity_with(1e4, 20.0), 1.0, 1.0)
        with self.assertRaises(FitError):
            fit_doublet(jc_spectra(p).emitter)

    def test_splitting_tends_to_2g(self):
        p = JcParams(g=50.0, kappa=1.0)
        self.assertAlmostEqual(peak_splitting(jc_spectra(p).emitter) / 100.0, 1.0, delta=0.01)

    def test_detuning_mirror(self):
        grid = FrequencyGrid.uniform(-60.0, 60.0, 2401)
        plus = jc_spectra(JcParams(g=10.0, kappa=4.0, gamma_ng=1.0, delta=8.0), grid)
        minus = jc_spectra(JcParams(g=10.0, kappa=4.0, gamma_ng=1.0, delta=-8.0), grid)
        np.testing.assert_allclose(plus.emitter.density, minus.emitter.density[::-1], atol=1e-8)
        np.testing.assert_allclose(plus.cavity.density, minus.cavity.density[::-1], atol=1e-8)

    def test_non_decaying(self):
        with self.assertRaises(DomainError):
            jc_spectra(JcParams(g=1.0, kappa=0.0, gamma_ng=0.0))


class TestDressedLadder(unittest.TestCase):
    """Test cases for dressed_ladder"""

    def test_sqrt_n_splittings(self):
        ladder = dressed_ladder(2.0, 1000.0, 4)
        splits = [level.splitting for level in ladder.levels]
        self.assertAlmostEqual(splits[0], 4.0)
        self.assertAlmostEqual(splits[1], 4.0 * np.sqrt(2.0))
        self.assertAlmostEqual(splits[3] / splits[0], 2.0)

    def test_anharmonic(self):
        ladder = dressed_ladder(2.0, 1000.0, 2)
        first, second = ladder.levels
        self.assertNotAlmostEqual(second.upper - 2 * first.upper + ladder.ground, 0.0)

    def test_blockade_and_tunneling(self):
        ladder = dressed_ladder(2.0, 1000.0, 1)
        self.assertAlmostEqual(ladder.blockade_frequencies[0], 998.0)
        self.assertAlmostEqual(ladder.blockade_frequencies[1], 1002.0)
        self.assertAlmostEqual(ladder.tunneling_frequencies[0], 1000.0 - np.sqrt(2.0))
        self.assertAlmostEqual(ladder.tunneling_frequencies[1], 1000.0 + np.sqrt(2.0))

    def test_needs_a_manifold(self):
        with self.assertRaises(DomainError):
            dressed_ladder(1.0, 1.0, 0)


if __name__ == '__main__':
    unittest.main()

# physics/phonons.py - LA-phonon coupling of a quantum-dot exciton
"""
Deformation-potential coupling to bulk longitudinal-acoustic phonons with
linear dispersion and Gaussian electron/hole envelopes. The spectral density

    J(W) = W^3 / (4 pi^2 d_m c_s^5 hbar) (D_e exp(-W^2 s_e^2 / 2 c_s^2) - D_g exp(-W^2 s_g^2 / 2 c_s^2))^2

is evaluated in SI units and returned in 1/ns for W in rad/ns.
"""
import logging
from typing import Callable, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field
from scipy import constants as sc
from scipy import integrate

import config
from physics.cavity_jc import JcParams
from physics.spectrum import Spectrum, Normalization, normalize
from utils.errors import DomainError, ModelError
from utils.numerics import gauss_legendre_nodes
from utils.units import DEFAULT_UNITS, FrequencyGrid

logger = logging.getLogger(__name__)

# minimum half-span of an IBM spectrum grid, in eV
_IBM_MIN_SPAN_EV = 10e-3


class PhononParams(BaseModel):
    """Material and wavefunction parameters; defaults describe bulk GaAs"""
    model_config = ConfigDict(frozen=True)

    d_e: float = Field(config.GAAS_D_E, description="Excited-state deformation potential in eV")
    d_g: float = Field(config.GAAS_D_G, description="Ground-state deformation potential in eV")
    c_s: float = Field(config.GAAS_SOUND_SPEED, gt=0, description="LA sound speed in m/s (= nm/ns)")
    d_m: float = Field(config.GAAS_MASS_DENSITY, gt=0, description="Mass density in kg/m^3")
    sigma_e: float = Field(config.QD_SIGMA, gt=0, description="Excited-state envelope width in nm")
    sigma_g: float = Field(config.QD_SIGMA, gt=0, description="Ground-state envelope width in nm")
    temperature: float = Field(0.0, ge=0, description="Temperature in K")

    @property
    def cutoff(self) -> float:
        """c_s / sigma in rad/ns, the scale where J is cut off"""
        return self.c_s / min(self.sigma_e, self.sigma_g)


class PhononRate(BaseModel):
    model_config = ConfigDict(frozen=True)

    rate: float = Field(..., description="Emitter decay rate in 1/ns")
    valid: bool = Field(..., description="|Delta| large enough compared with g")


class IbmSpectrum(BaseModel):
    """Independent-boson emission spectrum against Delta = w - w0"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    spectrum: Spectrum
    zero_phonon: np.ndarray = Field(..., description="Raw zero-phonon line")
    sideband: np.ndarray = Field(..., description="Raw phonon sideband")
    zpl_weight: float = Field(..., description="Franck-Condon factor exp(-phi(0))")
    sideband_fraction: float = Field(..., description="Sideband area beyond 3 zero-phonon linewidths over pi; "
                                                       "zero-phonon tails are not counted")
    raw_area: float = Field(..., description="Integral of the raw spectrum, pi by the sum rule")

    def to_frame(self) -> pd.DataFrame:
        delta = self.spectrum.omega
        return pd.DataFrame({"delta": delta, "delta_meV": DEFAULT_UNITS.omega_to_energy(delta) * 1e3,
                             "density": self.spectrum.density, "zero_phonon": self.zero_phonon,
                             "sideband": self.sideband})


def occupation(omega, temperature: float):
    """
    Bose-Einstein occupation 1 / (exp(hbar W / k_B T) - 1)

    Args:
        omega: Phonon frequency in rad/ns (> 0)
        temperature: Temperature in K

    Returns:
        Occupation with the shape of omega
    """
    omega_arr = np.asarray(omega, dtype=float)
    if np.any(omega_arr <= 0):
        raise DomainError("Phonon occupation diverges at W <= 0")
    if temperature < 0:
        raise DomainError(f"Temperature must be non-negative, got {temperature}")
    if temperature == 0:
        value = np.zeros_like(omega_arr)
    else:
        x = DEFAULT_UNITS.hbar * omega_arr / (DEFAULT_UNITS.k_B * temperature)
        with np.errstate(over="ignore"):
            value = 1.0 / np.expm1(x)
    return float(value) if value.ndim == 0 else value


def spectral_density(p: PhononParams, omega):
    """
    Phonon spectral density J(W) in 1/ns

    Args:
        p: Phonon parameters
        omega: W >= 0 in rad/ns

    Returns:
        J with the shape of omega
    """
    omega_arr = np.asarray(omega, dtype=float)
    if np.any(omega_arr < 0):
        raise DomainError("Spectral density is defined for W >= 0")
    w = omega_arr * 1e9
    c = p.c_s
    sig_e, sig_g = p.sigma_e * 1e-9, p.sigma_g * 1e-9
    form = (p.d_e * np.exp(-(w * sig_e) ** 2 / (2.0 * c * c))
            - p.d_g * np.exp(-(w * sig_g) ** 2 / (2.0 * c * c))) * sc.e
    j_si = w ** 3 * form ** 2 / (4.0 * np.pi ** 2 * p.d_m * c ** 5 * sc.hbar)
    value = j_si * 1e-9
    return float(value) if value.ndim == 0 else value


def effective_phonon_density(p: PhononParams, omega, spectral: Optional[Callable] = None):
    """
    Effective phonon density Phi(W) for a signed detuning W

    W > 0: pi J(W) (n + 1), phonon emission
    W < 0: pi J(|W|) n, phonon absorption
    W = 0: 0

    Args:
        p: Phonon parameters (temperature used for n)
        omega: Signed frequency in rad/ns
        spectral: Alternative J(W); spectral_density(p, .) by default
    """
    spectral = spectral or (lambda w: spectral_density(p, w))
    omega_arr = np.atleast_1d(np.asarray(omega, dtype=float))
    out = np.zeros_like(omega_arr)
    nonzero = omega_arr != 0
    mag = np.abs(omega_arr[nonzero])
    j = np.asarray(spectral(mag), dtype=float)
    n = np.asarray(occupation(mag, p.temperature), dtype=float)
    out[nonzero] = np.pi * j * np.where(omega_arr[nonzero] > 0, n + 1.0, n)
    return float(out[0]) if np.ndim(omega) == 0 else out


def effective_phonon_dos(p: PhononParams, omega):
    """Occupation-free phonon density of states 2 pi J(W), W > 0"""
    omega_arr = np.asarray(omega, dtype=float)
    if np.any(omega_arr <= 0):
        raise DomainError("Effective phonon DOS is defined for W > 0")
    return 2.0 * np.pi * spectral_density(p, omega)


def huang_rhys(p: PhononParams, order: int = 16, panels: int = 400) -> float:
    """Huang-Rhys factor int J(W)/W^2 dW"""
    nodes, weights = gauss_legendre_nodes(np.linspace(0.0, 8.0 * p.cutoff, panels + 1), order)
    return float(np.sum(spectral_density(p, nodes) / nodes ** 2 * weights))


def phonon_wavelength(omega: float, p: PhononParams) -> float:
    """Acoustic wavelength 2 pi c_s / W in nm"""
    if omega <= 0:
        raise DomainError(f"Phonon frequency must be positive, got {omega}")
    return 2.0 * np.pi * p.c_s / omega


def phonon_purcell_rate(p: PhononParams, jc: JcParams, delta, validity_factor: Optional[float] = None) -> PhononRate:
    """
    Phonon-assisted cavity feeding rate for a detuned emitter

        gamma(D) = gamma_ng + 2 g^2 gamma_dis / (gamma_dis^2 + D^2) (1 + Phi(D) / gamma_dis)

    with gamma_dis = (gamma_ng + kappa) / 2. The expression holds for |D| >> g;
    the result is flagged invalid below validity_factor * g
    (config.PHONON_VALIDITY_FACTOR by default).

    Args:
        p: Phonon parameters
        jc: Cavity parameters (jc.delta is ignored)
        delta: Emitter-cavity detuning w0 - w_c in rad/ns

    Returns:
        PhononRate
    """
    factor = config.PHONON_VALIDITY_FACTOR if validity_factor is None else validity_factor
    gamma_dis = 0.5 * (jc.gamma_ng + jc.kappa)
    if gamma_dis <= 0:
        raise DomainError("gamma_ng + kappa must be positive")
    phi = effective_phonon_density(p, delta)
    rate = jc.gamma_ng + 2.0 * jc.g ** 2 * gamma_dis / (gamma_dis ** 2 + delta ** 2) * (1.0 + phi / gamma_dis)
    valid = abs(delta) >= factor * jc.g
    if not valid:
        logger.warning(f"Phonon-assisted rate at detuning {delta:.4g} rad/ns is outside |Delta| >> g (g={jc.g:.4g})")
    return PhononRate(rate=float(rate), valid=bool(valid))


def phonon_purcell_curve(p: PhononParams, jc: JcParams, deltas, validity_factor: Optional[float] = None) -> pd.DataFrame:
    """
    phonon_purcell_rate over a detuning axis, with one warning for the invalid part

    Returns:
        pd.DataFrame with columns delta_rad_ns, delta_meV, rate, valid
    """
    factor = config.PHONON_VALIDITY_FACTOR if validity_factor is None else validity_factor
    deltas = np.asarray(deltas, dtype=float)
    gamma_dis = 0.5 * (jc.gamma_ng + jc.kappa)
    if gamma_dis <= 0:
        raise DomainError("gamma_ng + kappa must be positive")
    phi = effective_phonon_density(p, deltas)
    rate = jc.gamma_ng + 2.0 * jc.g ** 2 * gamma_dis / (gamma_dis ** 2 + deltas ** 2) * (1.0 + phi / gamma_dis)
    valid = np.abs(deltas) >= factor * jc.g
    if not valid.all():
        logger.warning(f"{int((~valid).sum())} of {valid.size} detunings are inside |Delta| < {factor:g} g")
    return pd.DataFrame({"delta_rad_ns": deltas, "delta_meV": DEFAULT_UNITS.omega_to_energy(deltas) * 1e3,
                         "rate": rate, "valid": valid})


def _check_super_ohmic(spectral: Callable, scale: float, temperature: float):
    eps = 1e-3 * scale
    small, large = float(spectral(eps / 10.0)), float(spectral(eps))
    if large <= 0:
        return
    # J/W^2 must vanish at W -> 0; at T > 0 J/W^3 must stay bounded as well
    if (small / (eps / 10.0) ** 2) / (large / eps ** 2) > 0.5:
        raise ModelError("Spectral density is not super-ohmic; the phonon phase diverges")
    if temperature > 0 and (small / (eps / 10.0) ** 3) / (large / eps ** 3) > 2.0:
        raise ModelError("Spectral density grows slower than W^3; the thermal phonon phase diverges")


def phonon_phase(p: PhononParams, t: np.ndarray, spectral: Optional[Callable] = None,
                 order: int = 16, panels: int = 120) -> np.ndarray:
    """
    phi(t) = int dW J(W)/W^2 [coth(hbar W / 2 k_B T) cos W t - i sin W t]

    Args:
        p: Phonon parameters
        t: Times in ns
        spectral: Alternative J(W); spectral_density(p, .) by default
    """
    spectral = spectral or (lambda w: spectral_density(p, w))
    _check_super_ohmic(spectral, p.cutoff, p.temperature)
    nodes, weights = gauss_legendre_nodes(np.linspace(0.0, 8.0 * p.cutoff, panels + 1), order)
    weight = np.asarray(spectral(nodes), dtype=float) / nodes ** 2 * weights
    if p.temperature > 0:
        thermal = 1.0 + 2.0 * occupation(nodes, p.temperature)
    else:
        thermal = np.ones_like(nodes)
    phase = np.outer(np.asarray(t, dtype=float), nodes)
    return (np.cos(phase) * thermal - 1j * np.sin(phase)) @ weight


def franck_condon_factor(p: PhononParams) -> float:
    """Zero-phonon-line weight exp(-phi(0))"""
    return float(np.exp(-phonon_phase(p, np.array([0.0]))[0].real))


def ibm_spectrum(p: PhononParams, gamma_tot: float, grid: FrequencyGrid,
                 normalization: Normalization = "peak", spectral: Optional[Callable] = None) -> IbmSpectrum:
    """
    Independent-boson emission spectrum with a Markovian zero-phonon linewidth

    The spectrum S(D) = Re int_0^inf dt exp(-i D t - gamma_tot t/2) exp(phi(t) - phi(0))
    is split into the zero-phonon line B^2 (gamma/2) / ((gamma/2)^2 + D^2),
    B^2 = exp(-phi(0)), evaluated in closed form, and the sideband
    Re int B^2 (exp(phi(t)) - 1) exp(-i D t - gamma t/2) dt integrated over
    the phonon memory time. D = w - w0, so phonon emission appears at D < 0.

    sideband_fraction is the sideband area at |D| > 3 gamma_tot divided by the
    sum-rule area pi. The Lorentzian tails of the zero-phonon line beyond that
    window are left out, so an uncoupled emitter gives exactly 0.

    Args:
        p: Phonon parameters
        gamma_tot: Zero-phonon linewidth in 1/ns
        grid: Detunings from the zero-phonon line in rad/ns, spanning at least +-10 meV
        normalization: Applied to the returned total spectrum
        spectral: Alternative J(W)

    Returns:
        IbmSpectrum
    """
    if gamma_tot <= 0:
        raise DomainError(f"gamma_tot must be positive, got {gamma_tot}")
    min_span = DEFAULT_UNITS.energy_to_omega(_IBM_MIN_SPAN_EV)
    if grid.start > -min_span * (1 - 1e-9) or grid.stop < min_span * (1 - 1e-9):
        raise DomainError(f"IBM grid must span at least +-{min_span:.6g} rad/ns (10 meV)")

    delta = grid.points
    phi0 = phonon_phase(p, np.array([0.0]), spectral)[0].real
    zpl_weight = float(np.exp(-phi0))
    half = 0.5 * gamma_tot
    zpl = zpl_weight * half / (half ** 2 + delta ** 2)

    t_max = 40.0 / p.cutoff
    dt = min(np.pi / (24.0 * p.cutoff), 0.2 / float(np.max(np.abs(delta))))
    t = np.linspace(0.0, t_max, int(np.ceil(t_max / dt)) + 1)
    memory = zpl_weight * np.expm1(phonon_phase(p, t, spectral)) * np.exp(-half * t)
    kernel = np.exp(-1j * np.outer(delta, t)) * memory[None, :]
    sideband = np.real(integrate.trapezoid(kernel, t, axis=1))
    logger.debug(f"IBM sideband from {t.size} time points, B^2={zpl_weight:.6g}")

    window = np.abs(delta) > 3.0 * gamma_tot
    outside = integrate.trapezoid(np.where(window, sideband, 0.0), delta)
    fraction = float(max(outside, 0.0) / np.pi)
    total = zpl + sideband
    raw_area = float(integrate.trapezoid(total, delta))

    top = float(np.max(np.abs(total)))
    # ringing of the truncated memory integral
    total = np.where((total < 0) & (-total <= 1e-3 * top), 0.0, total)
    return IbmSpectrum(spectrum=normalize(grid, total, normalization), zero_phonon=zpl, sideband=sideband,
                       zpl_weight=zpl_weight, sideband_fraction=fraction, raw_area=raw_area)

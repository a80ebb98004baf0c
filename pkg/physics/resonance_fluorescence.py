# physics/resonance_fluorescence.py - Resonantly driven two-level emitter with pure dephasing
"""
Closed-form steady-state observables of a two-level emitter driven on
resonance (w0 = w_p) with Rabi amplitude Omega_p, radiative rate gamma and
pure-dephasing rate gamma_dp. Intensities are in units of the overall
scattering amplitude I0 = 1; spectra are functions of Delta_p = w - w_p.
"""
import logging
from typing import Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from physics.spectrum import Spectrum, Normalization, normalize
from utils.errors import DegenerateInput, DomainError
from utils.units import FrequencyGrid

logger = logging.getLogger(__name__)


class DriveParams(BaseModel):
    """Resonant drive of a two-level emitter (all rates in 1/ns)"""
    model_config = ConfigDict(frozen=True)

    omega_p: float = Field(..., ge=0, description="Drive amplitude |Omega_p| in rad/ns")
    gamma: float = Field(..., ge=0, description="Radiative decay rate")
    gamma_dp: float = Field(0.0, ge=0, description="Pure dephasing rate")

    @property
    def saturation_denominator(self) -> float:
        return self.gamma ** 2 + 2.0 * self.gamma * self.gamma_dp + 8.0 * self.omega_p ** 2

    @property
    def mu(self) -> complex:
        """Effective Rabi frequency; imaginary in the overdamped regime"""
        return complex(np.sqrt(complex(4.0 * self.omega_p ** 2 - (self.gamma / 4.0 - self.gamma_dp / 2.0) ** 2)))


class Intensities(BaseModel):
    model_config = ConfigDict(frozen=True)

    coherent: float
    incoherent: float

    @property
    def total(self) -> float:
        return self.coherent + self.incoherent


class MollowSpectrum(BaseModel):
    """Coherent delta-line weight at Delta_p = 0 and the incoherent spectrum"""
    model_config = ConfigDict(frozen=True)

    coherent_weight: float
    incoherent: Spectrum

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"delta": self.incoherent.omega, "incoherent": self.incoherent.density})


def _denominator(p: DriveParams) -> float:
    d = p.saturation_denominator
    if d == 0:
        raise DegenerateInput("Drive amplitude and every rate are zero")
    return d


def intensities(p: DriveParams) -> Intensities:
    """
    Coherent and incoherent scattered intensities

    Args:
        p: Drive parameters

    Returns:
        Intensities in units of I0
    """
    d = _denominator(p)
    o2 = p.omega_p ** 2
    return Intensities(coherent=4.0 * p.gamma ** 2 * o2 / d ** 2,
                       incoherent=4.0 * o2 * (2.0 * p.gamma * p.gamma_dp + 8.0 * o2) / d ** 2)


def steady_state_population(p: DriveParams) -> float:
    """n_s = 4 |Omega_p|^2 / (gamma^2 + 2 gamma gamma_dp + 8 |Omega_p|^2), bounded by 1/2"""
    return 4.0 * p.omega_p ** 2 / _denominator(p)


def g2(p: DriveParams, tau) -> np.ndarray:
    """
    Second-order correlation of the scattered light

        1 - exp(-(3 gamma/4 + gamma_dp/2) tau) (cos mu tau + (3 gamma + 2 gamma_dp)/(4 mu) sin mu tau)

    continued to imaginary mu (cosh/sinh) and to its mu = 0 limit.

    Args:
        p: Drive parameters
        tau: Delays >= 0 in ns

    Returns:
        np.ndarray (or float for scalar tau)
    """
    tau_arr = np.asarray(tau, dtype=float)
    if np.any(tau_arr < 0):
        raise DomainError("g2 is defined for tau >= 0")
    decay = 0.75 * p.gamma + 0.5 * p.gamma_dp
    coeff = (3.0 * p.gamma + 2.0 * p.gamma_dp) / 4.0
    mu = p.mu
    scale = max(p.gamma, p.gamma_dp, p.omega_p, 1e-300)

    if abs(mu) < 1e-8 * scale:
        bracket = 1.0 + coeff * tau_arr
    else:
        phase = mu * tau_arr
        bracket = np.real(np.cos(phase) + coeff * np.sin(phase) / mu)
    value = 1.0 - np.exp(-decay * tau_arr) * bracket
    return float(value) if value.ndim == 0 else value


def _incoherent_density(p: DriveParams, delta: np.ndarray) -> np.ndarray:
    n_s = steady_state_population(p)
    o2 = p.omega_p ** 2
    width = p.gamma_dp + 0.5 * p.gamma
    damp = 0.5 * p.gamma_dp + 0.75 * p.gamma
    a = 4.0 * o2 - p.gamma * (0.5 * p.gamma - p.gamma_dp)
    b = -(4.0 * o2 * (2.0 * p.gamma_dp - 5.0 * p.gamma) + 2.0 * p.gamma * p.gamma_dp ** 2
          - 2.0 * p.gamma ** 2 * p.gamma_dp + 0.5 * p.gamma ** 3)
    mu = p.mu

    central = 0.5 * n_s * width / (delta ** 2 + width ** 2)
    prefactor = n_s ** 2 / (4.0 * o2)
    if abs(mu) < 1e-8 * max(p.gamma, p.gamma_dp, p.omega_p):
        # the two sideband poles merge
        z = 1j * delta + damp
        sidebands = prefactor * np.real(a / z + b / (4.0 * z ** 2))
        magnitude = np.abs(central) + prefactor * (np.abs(a / z) + np.abs(b / (4.0 * z ** 2)))
    else:
        upper = (0.5 * a + b / (8j * mu)) / (1j * (delta - mu) + damp)
        lower = (0.5 * a - b / (8j * mu)) / (1j * (delta + mu) + damp)
        sidebands = prefactor * np.real(upper + lower)
        magnitude = np.abs(central) + prefactor * (np.abs(upper) + np.abs(lower))

    density = central + sidebands
    # cancellation between the terms leaves round-off of either sign
    density[(density < 0) & (-density < 1e-9 * magnitude)] = 0.0
    return density


def mollow_spectrum(p: DriveParams, grid: FrequencyGrid, normalization: Normalization = "raw") -> MollowSpectrum:
    """
    Resonance-fluorescence spectrum split into the coherent line and the incoherent triplet

    Args:
        p: Drive parameters (Omega_p > 0)
        grid: Detunings Delta_p = w - w_p in rad/ns
        normalization: Applied to the incoherent part; 'raw' keeps it commensurate
            with the coherent weight

    Returns:
        MollowSpectrum
    """
    if p.omega_p == 0:
        raise DegenerateInput("No scattering without drive (Omega_p = 0)")
    n_s = steady_state_population(p)
    weight = n_s ** 2 * p.gamma ** 2 / (4.0 * p.omega_p ** 2)
    density = _incoherent_density(p, grid.points)
    logger.debug(f"Mollow spectrum: n_s={n_s:.6g}, mu={p.mu:.6g}, coherent weight={weight:.6g}")
    return MollowSpectrum(coherent_weight=weight, incoherent=normalize(grid, density, normalization))


def sideband_positions(spectrum: Spectrum, min_offset: Optional[float] = None) -> Optional[Tuple[float, float]]:
    """
    Outermost pair of spectral peaks on either side of Delta_p = 0

    Args:
        spectrum: Incoherent Mollow spectrum
        min_offset: Peaks closer than this to zero are ignored (default: 2 grid steps)

    Returns:
        (lower, upper) detunings, or None when no sidebands are resolved
    """
    peaks = spectrum.peaks()
    if min_offset is None:
        min_offset = 2.0 * float(np.min(np.diff(spectrum.omega)))
    lower = peaks[peaks < -min_offset]
    upper = peaks[peaks > min_offset]
    if lower.size == 0 or upper.size == 0:
        return None
    return float(lower[0]), float(upper[-1])

# physics/waveguide.py - Emitters coupled to a one-dimensional waveguide
import logging
import math
from typing import Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from physics.ldos import beta_factor
from utils.errors import DomainError
from utils.units import FrequencyGrid

logger = logging.getLogger(__name__)

beta_from_rates = beta_factor


class ScatterParams(BaseModel):
    """Single-photon scattering off an emitter in a waveguide (rates in 1/ns)"""
    model_config = ConfigDict(frozen=True)

    beta: float = Field(..., ge=0, le=1, description="Fraction of decays into the waveguide mode")
    gamma: float = Field(..., gt=0, description="Total emitter decay rate")
    gamma_dp: float = Field(0.0, ge=0, description="Pure dephasing rate")
    delta: float = Field(0.0, description="Photon-emitter detuning in rad/ns")


class ScatterResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    transmission: float
    reflection: float
    loss: float


class DipolePair(BaseModel):
    """Two identical emitters coupled through a shared waveguide mode"""
    model_config = ConfigDict(frozen=True)

    gamma: float = Field(..., ge=0, description="Single-emitter decay rate")
    coupling_magnitude: float = Field(..., ge=0, description="Amplitude of the waveguide-mediated rate")
    k: float = Field(..., gt=0, description="Propagation constant in rad/nm")
    r_ab: float = Field(..., ge=0, description="Emitter separation in nm")
    phi: float = Field(0.0, description="Phase set by the dipole projections, rad")

    @model_validator(mode="after")
    def _bounded_coupling(self):
        if self.coupling_magnitude > self.gamma * (1 + 1e-12):
            raise ValueError(f"coupling_magnitude {self.coupling_magnitude} exceeds gamma {self.gamma}")
        return self


class DipoleRates(BaseModel):
    model_config = ConfigDict(frozen=True)

    gamma_ab: float = Field(..., description="Signed cross-decay rate")
    gamma_plus: float = Field(..., description="Symmetric-state decay rate")
    gamma_minus: float = Field(..., description="Antisymmetric-state decay rate")


class EfficiencyBudget(BaseModel):
    model_config = ConfigDict(frozen=True)

    eta_gen: float = Field(..., ge=0, le=1, description="Generation efficiency")
    beta: float = Field(..., ge=0, le=1, description="Collection into the guided mode")
    eta_det: float = Field(..., ge=0, le=1, description="Detection efficiency")


def transmission_reflection(p: ScatterParams) -> ScatterResult:
    """
    Transmission, reflection and loss of a narrow-band single photon

    On resonance:
        T = 1/(1 + gamma/2gamma_dp) + (1 - beta)^2 / (1 + 2gamma_dp/gamma)
        R = beta^2 / (1 + 2gamma_dp/gamma)
    Off resonance (gamma_dp = 0 only) the coherent amplitudes
    r = -beta gamma (gamma + 2i Delta) / (gamma^2 + 4 Delta^2), t = 1 + r are used.

    Args:
        p: Scattering parameters

    Returns:
        ScatterResult
    """
    if p.gamma_dp == 0:
        r = -p.beta * p.gamma * (p.gamma + 2j * p.delta) / (p.gamma ** 2 + 4.0 * p.delta ** 2)
        transmission, reflection = abs(1.0 + r) ** 2, abs(r) ** 2
        loss = 2.0 * p.beta * (1.0 - p.beta) * p.gamma ** 2 / (p.gamma ** 2 + 4.0 * p.delta ** 2)
    else:
        if p.delta != 0:
            raise DomainError("Detuned scattering is only available without pure dephasing")
        ratio = 2.0 * p.gamma_dp / p.gamma
        transmission = 1.0 / (1.0 + 1.0 / ratio) + (1.0 - p.beta) ** 2 / (1.0 + ratio)
        reflection = p.beta ** 2 / (1.0 + ratio)
        loss = 2.0 * p.beta * (1.0 - p.beta) / (1.0 + ratio)
    return ScatterResult(transmission=float(transmission), reflection=float(reflection), loss=float(loss))


def transmission_reflection_spectrum(beta: float, gamma: float, grid: FrequencyGrid) -> pd.DataFrame:
    """T, R and loss against detuning for a dephasing-free emitter"""
    rows = [transmission_reflection(ScatterParams(beta=beta, gamma=gamma, delta=float(d))) for d in grid.points]
    return pd.DataFrame({
        "delta_rad_ns": grid.points,
        "T": [r.transmission for r in rows],
        "R": [r.reflection for r in rows],
        "loss": [r.loss for r in rows],
    })


def g2_transmitted(p: ScatterParams, tau):
    """
    Second-order correlation of the transmitted field on resonance

        g2_T(tau) = exp(-gamma tau) (beta^2/(1 - beta)^2 - exp(gamma tau / 2))^2

    Args:
        p: Scattering parameters with gamma_dp = 0, delta = 0 and beta < 1
        tau: Delays >= 0 in ns

    Returns:
        float or np.ndarray
    """
    if p.gamma_dp != 0 or p.delta != 0:
        raise DomainError("Transmitted g2 is only available on resonance without pure dephasing")
    if p.beta >= 1:
        raise DomainError("Transmitted g2 diverges at beta = 1")
    tau_arr = np.asarray(tau, dtype=float)
    if np.any(tau_arr < 0):
        raise DomainError("g2 is defined for tau >= 0")
    ratio = p.beta ** 2 / (1.0 - p.beta) ** 2
    # expanded form stays finite for large gamma tau
    value = (ratio ** 2 * np.exp(-p.gamma * tau_arr) - 2.0 * ratio * np.exp(-0.5 * p.gamma * tau_arr)
             + 1.0)
    return float(value) if value.ndim == 0 else value


def dipole_dipole_rate(pair: DipolePair) -> DipoleRates:
    """gamma_AB = |c| cos(k r_AB + phi) and the collective rates gamma +- gamma_AB"""
    gamma_ab = pair.coupling_magnitude * np.cos(pair.k * pair.r_ab + pair.phi)
    return DipoleRates(gamma_ab=float(gamma_ab), gamma_plus=float(pair.gamma + gamma_ab),
                       gamma_minus=float(max(pair.gamma - gamma_ab, 0.0)))


def damped_dipole_range(pair: DipolePair, l_ext: float, r_ab=None):
    """
    Cross-decay rate with the field amplitude attenuated over the separation

    Args:
        pair: Emitter pair
        l_ext: Extinction length in nm (> 0, may be inf)
        r_ab: Separations in nm; pair.r_ab when omitted

    Returns:
        gamma_AB(r) * exp(-r / 2 l_ext)
    """
    if not l_ext > 0:
        raise DomainError(f"Extinction length must be positive, got {l_ext}")
    r = np.asarray(pair.r_ab if r_ab is None else r_ab, dtype=float)
    value = pair.coupling_magnitude * np.cos(pair.k * r + pair.phi) * np.exp(-r / (2.0 * l_ext))
    return float(value) if value.ndim == 0 else value


def extinction_length(l_back: float, l_leak: float = float("inf")) -> float:
    """1/l_ext = 1/l_back + 1/l_leak"""
    if l_back <= 0 or l_leak <= 0:
        raise DomainError("Backscattering and leakage lengths must be positive")
    if math.isinf(l_leak):
        return l_back
    if math.isinf(l_back):
        return l_leak
    return 1.0 / (1.0 / l_back + 1.0 / l_leak)


def total_efficiency(b: EfficiencyBudget) -> float:
    """eta_tot = eta_det * beta * eta_gen"""
    return b.eta_det * b.beta * b.eta_gen


def measured_efficiency(detected_rate: float, repetition_rate: float, dead_time_loss: Optional[float] = None) -> float:
    """
    Overall source efficiency from a detected count rate

    Args:
        detected_rate: Detected photons per second
        repetition_rate: Excitation pulses per second
        dead_time_loss: Optional fraction of counts lost to detector dead time

    Returns:
        float in [0, 1]
    """
    if repetition_rate <= 0 or detected_rate < 0:
        raise DomainError("Rates must be positive")
    rate = detected_rate / (1.0 - dead_time_loss) if dead_time_loss else detected_rate
    if rate > repetition_rate:
        raise DomainError("More photons detected than excitation pulses")
    return rate / repetition_rate

# physics/emitter_dynamics.py - Non-Markovian spontaneous emission in an arbitrary LDOS
"""
The excited-state amplitude obeys

    dc/dt = -(gamma_bg / 2) c(t) - int_0^t K(t - t') c(t') dt'

with the LDOS split into a Markovian background (gamma_bg) and a deviation
dF(w) = F_P(w) - background that enters the memory kernel

    K(tau) = (gamma_hom / 2 pi) int dF(w) W(w) exp(i (w0 - w) tau) dw.

W(w) = w / w0 when EmitterConfig.omega_weighted is set and 1 otherwise. With
W = 1 a Lorentzian cavity reproduces the Jaynes-Cummings model exactly.
"""
import math
import logging
from typing import Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import integrate

import config
from physics.ldos import (LdosProfile, HomogeneousProfile, LorentzianCavity, evaluate_purcell)
from physics.spectrum import Spectrum, Normalization, normalize
from utils.errors import DomainError, StepSizeError
from utils.numerics import fourier_panel_integral, principal_value_integral, richardson
from utils.units import FrequencyGrid

logger = logging.getLogger(__name__)

# Lamb-shift quadrature grid limits for numerically integrated profiles
_LAMB_MIN_POINTS = 4001
_LAMB_MAX_POINTS = 200001


class EmitterConfig(BaseModel):
    """Two-level emitter and the frequency band where its LDOS is resolved"""
    model_config = ConfigDict(frozen=True)

    omega0: float = Field(..., gt=0, description="Transition frequency in rad/ns")
    gamma_hom: float = Field(..., gt=0, description="Radiative rate in the homogeneous reference medium (1/ns)")
    band: Tuple[float, float] = Field(..., description="(w_min, w_max) in rad/ns over which the LDOS is resolved")
    gamma_side: float = Field(0.0, ge=0, description="Markovian decay into channels outside the profile (1/ns)")
    omega_weighted: bool = Field(False, description="Keep the w/w0 factor of the coupling constant")

    @model_validator(mode="after")
    def _band_contains_transition(self):
        lo, hi = self.band
        if not 0 < lo < hi:
            raise ValueError(f"band must satisfy 0 < w_min < w_max, got {self.band}")
        if not lo <= self.omega0 <= hi:
            raise ValueError(f"transition frequency {self.omega0} outside band {self.band}")
        return self

    @classmethod
    def around(cls, omega0: float, gamma_hom: float, half_width: float, **kwargs) -> "EmitterConfig":
        """Config with a band centred on the transition"""
        return cls(omega0=omega0, gamma_hom=gamma_hom, band=(omega0 - half_width, omega0 + half_width), **kwargs)

    def weight(self, omega):
        omega = np.asarray(omega, dtype=float)
        return omega / self.omega0 if self.omega_weighted else np.ones_like(omega)


class MemoryKernel(BaseModel):
    """Kernel K(tau) on a uniform grid together with its Markovian background rate"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    dt: float = Field(..., gt=0)
    values: np.ndarray = Field(..., description="Complex K(j dt), j = 0..n-1, in 1/ns^2")
    background_rate: float = Field(..., ge=0, description="gamma_bg in 1/ns")
    band_warning: bool = Field(False, description="Band narrower than 10 emitter linewidths")

    @property
    def taus(self) -> np.ndarray:
        return self.dt * np.arange(self.values.size)

    @property
    def tau_max(self) -> float:
        return self.dt * (self.values.size - 1)


class AmplitudeTrajectory(BaseModel):
    """Excited-state amplitude c_e(t) and the cumulative emitted flux"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    t: np.ndarray
    c: np.ndarray
    flux: np.ndarray = Field(..., description="Probability emitted up to t")

    @property
    def population(self) -> np.ndarray:
        return np.abs(self.c) ** 2

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"t_ns": self.t, "re_ce": self.c.real, "im_ce": self.c.imag,
                             "population": self.population})


def _check_in_band(cfg: EmitterConfig, omega, what: str = "frequency"):
    lo, hi = cfg.band
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < lo) or np.any(omega > hi):
        raise DomainError(f"{what} outside emitter band [{lo}, {hi}]")


def background_rate(profile: LdosProfile, cfg: EmitterConfig) -> float:
    """Markovian rate gamma_hom * background * W(w0) + gamma_side"""
    return float(cfg.gamma_hom * profile.background * cfg.weight(cfg.omega0) + cfg.gamma_side)


def ww_rate(profile: LdosProfile, cfg: EmitterConfig) -> float:
    """
    Wigner-Weisskopf radiative rate gamma_hom * F_P(w0)

    Args:
        profile: LDOS profile
        cfg: Emitter

    Returns:
        float: Rate in 1/ns
    """
    return float(cfg.gamma_hom * evaluate_purcell(profile, cfg.omega0) * cfg.weight(cfg.omega0))


def total_rate(profile: LdosProfile, cfg: EmitterConfig) -> float:
    return ww_rate(profile, cfg) + cfg.gamma_side


def markov_decay(profile: LdosProfile, cfg: EmitterConfig, t: np.ndarray) -> np.ndarray:
    """Excited-state population exp(-(gamma_WW + gamma_side) t)"""
    return np.exp(-total_rate(profile, cfg) * np.asarray(t, dtype=float))


def build_kernel(profile: LdosProfile, cfg: EmitterConfig, dt: float, tau_max: float) -> MemoryKernel:
    """
    Memory kernel of the LDOS deviation from its background

    Homogeneous profiles give K = 0, Lorentzian cavities use the exact
    transform gamma_hom F_res (kappa/4) exp(-kappa tau/2) exp(i (w0 - w_c) tau),
    other profiles are integrated over the band with panel Gauss-Legendre
    quadrature.

    Args:
        profile: LDOS profile
        cfg: Emitter
        dt: Kernel time step in ns
        tau_max: Kernel length in ns (>= 10 dt)

    Returns:
        MemoryKernel
    """
    if dt <= 0:
        raise DomainError(f"dt must be positive, got {dt}")
    if tau_max < 10 * dt:
        raise DomainError(f"tau_max={tau_max} must be at least 10 dt={10 * dt}")

    n = int(round(tau_max / dt)) + 1
    taus = dt * np.arange(n)
    gamma_bg = background_rate(profile, cfg)

    if isinstance(profile, HomogeneousProfile):
        return MemoryKernel(dt=dt, values=np.zeros(n, dtype=complex), background_rate=gamma_bg)

    lo, hi = cfg.band
    linewidth = total_rate(profile, cfg)
    band_warning = (hi - lo) < 10.0 * linewidth
    if band_warning:
        logger.warning(f"Band width {hi - lo:.4g} rad/ns is below 10 emitter linewidths ({linewidth:.4g} 1/ns); "
                       f"the kernel may truncate the reservoir memory")

    if isinstance(profile, LorentzianCavity):
        kappa = profile.kappa
        amplitude = cfg.gamma_hom * profile.fp_res * kappa / 4.0
        if cfg.omega_weighted:
            amplitude = amplitude * (profile.omega_c - 0.5j * kappa) / cfg.omega0
        values = amplitude * np.exp((-0.5 * kappa + 1j * (cfg.omega0 - profile.omega_c)) * taus)
        return MemoryKernel(dt=dt, values=values.astype(complex), background_rate=gamma_bg,
                            band_warning=band_warning)

    def integrand(omega):
        delta = evaluate_purcell(profile, omega) - profile.background
        return cfg.gamma_hom / (2.0 * np.pi) * delta * cfg.weight(omega)

    n_initial = max(8, int(math.ceil((hi - lo) * taus[-1] / np.pi)))
    breaks = np.concatenate([np.linspace(lo, hi, n_initial + 1),
                             [w for w in profile.features() if lo < w < hi]])
    values = fourier_panel_integral(integrand, breaks, taus, cfg.omega0,
                                    rtol=config.KERNEL_RTOL, max_panels=config.KERNEL_MAX_PANELS)
    logger.debug(f"Built numerical kernel with {n} lags, K(0)={values[0]:.6g}")
    return MemoryKernel(dt=dt, values=values, background_rate=gamma_bg, band_warning=band_warning)


def _march(kernel_values: np.ndarray, gamma_bg: float, dt: float, n_steps: int):
    """
    Trapezoidal product integration of the Volterra equation with the
    background decay integrated exactly. The corrector equation is linear and
    solved in closed form, so each step is the fixed point of the Heun
    predictor-corrector iteration.
    """
    k = np.zeros(n_steps + 1, dtype=complex)
    take = min(n_steps + 1, kernel_values.size)
    k[:take] = kernel_values[:take]

    c = np.zeros(n_steps + 1, dtype=complex)
    memory = np.zeros(n_steps + 1, dtype=complex)
    c[0] = 1.0
    decay = math.exp(-0.5 * gamma_bg * dt)
    denom = 1.0 + 0.25 * dt * dt * k[0]
    half_dt = 0.5 * dt

    for n in range(n_steps):
        partial = 0.5 * k[n + 1] * c[0]
        if n > 0:
            partial += np.dot(k[n:0:-1], c[1:n + 1])
        partial *= dt
        c_next = (decay * c[n] - half_dt * decay * memory[n] - half_dt * partial) / denom
        if abs(c_next) > 1.0 + 1e-6:
            raise StepSizeError(f"|c_e| = {abs(c_next):.6g} > 1 at t = {(n + 1) * dt:.6g} ns; reduce dt (now {dt})")
        c[n + 1] = c_next
        memory[n + 1] = partial + half_dt * k[0] * c_next
    return c, memory


def solve_volterra(kernel: MemoryKernel, cfg: EmitterConfig, T: float, dt: float,
                   extrapolate: bool = False) -> AmplitudeTrajectory:
    """
    Integrate dc/dt = -(gamma_bg/2) c - int_0^t K(t-t') c(t') dt' with c(0) = 1

    The scheme is second order in dt and symmetric, so with extrapolate=True
    a second pass at dt/2 is combined by Richardson extrapolation. The kernel
    is treated as zero beyond its last lag.

    Args:
        kernel: Memory kernel; dt must be an integer multiple of kernel.dt
            (an even multiple when extrapolating)
        cfg: Emitter (used for logging context)
        T: Final time in ns
        dt: Time step in ns
        extrapolate: Apply Richardson extrapolation

    Returns:
        AmplitudeTrajectory on the grid 0, dt, ..., T
    """
    if T <= 0 or dt <= 0:
        raise DomainError(f"T and dt must be positive, got T={T}, dt={dt}")
    stride_f = dt / kernel.dt
    stride = int(round(stride_f))
    if stride < 1 or abs(stride_f - stride) > 1e-9 * stride_f:
        raise DomainError(f"dt={dt} is not an integer multiple of the kernel step {kernel.dt}")
    if extrapolate and stride % 2:
        raise DomainError("Extrapolation needs dt to be an even multiple of the kernel step")

    n_steps = int(round(T / dt))
    gamma_bg = kernel.background_rate
    logger.debug(f"Volterra march: {n_steps} steps of {dt} ns (w0={cfg.omega0:.6g}), extrapolate={extrapolate}")

    c, memory = _march(kernel.values[::stride], gamma_bg, dt, n_steps)
    if extrapolate:
        half = stride // 2
        c_fine, memory_fine = _march(kernel.values[::half], gamma_bg, 0.5 * dt, 2 * n_steps)
        c = richardson(c, c_fine[::2])
        memory = richardson(memory, memory_fine[::2])

    t = dt * np.arange(n_steps + 1)
    emitted = gamma_bg * np.abs(c) ** 2 + 2.0 * np.real(np.conj(c) * memory)
    flux = integrate.cumulative_trapezoid(emitted, t, initial=0.0)
    return AmplitudeTrajectory(t=t, c=c, flux=flux)


def _lorentzian_lamb_shift(profile: LorentzianCavity, cfg: EmitterConfig, omega: np.ndarray) -> np.ndarray:
    if not cfg.omega_weighted:
        g2 = cfg.gamma_hom * profile.fp_res * profile.kappa / 4.0
        x = omega - profile.omega_c
        return g2 * x / (x ** 2 + 0.25 * profile.kappa ** 2)

    # half-line integral with the w/w0 weight, in units of w_c
    b = 1.0 / (2.0 * profile.q)
    w = omega / profile.omega_c
    s = w - 1.0
    arc = 0.5 * np.pi + np.arctan(1.0 / b)
    lorentz = b * b / (s * s + b * b)
    integral = w * lorentz * (np.log(w) - 0.5 * np.log1p(b * b)) + (s - b * b) / b * lorentz * arc
    return cfg.gamma_hom * profile.fp_res * profile.omega_c / (2.0 * np.pi * cfg.omega0) * integral


def _lamb_grid(profile: LdosProfile, cfg: EmitterConfig) -> FrequencyGrid:
    lo, hi = cfg.band
    scale = getattr(profile, "rolloff_width", None) or (hi - lo)
    n = int(np.clip(40.0 * (hi - lo) / scale, _LAMB_MIN_POINTS, _LAMB_MAX_POINTS))
    points = np.linspace(lo, hi, n)
    extra = [w for w in profile.features() if lo < w < hi]
    if extra:
        points = np.unique(np.concatenate([points, extra]))
    return FrequencyGrid(points=points)


def lamb_shift_curve(profile: LdosProfile, cfg: EmitterConfig, omegas: Union[FrequencyGrid, np.ndarray]) -> np.ndarray:
    """
    Lamb shift relative to the homogeneous background at every frequency in omegas

    Args:
        profile: LDOS profile
        cfg: Emitter
        omegas: Frequencies inside cfg.band

    Returns:
        np.ndarray: Delta_L in rad/ns
    """
    if isinstance(omegas, FrequencyGrid):
        omegas = omegas.points
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    _check_in_band(cfg, omegas, "Lamb-shift frequency")

    if isinstance(profile, HomogeneousProfile):
        return np.zeros_like(omegas)
    if isinstance(profile, LorentzianCavity):
        return _lorentzian_lamb_shift(profile, cfg, omegas)

    grid = _lamb_grid(profile, cfg)
    lo, hi = cfg.band
    values = (cfg.gamma_hom / (2.0 * np.pi) * (evaluate_purcell(profile, grid.points) - profile.background)
              * cfg.weight(grid.points))
    out = np.empty_like(omegas)
    for i, omega in enumerate(omegas):
        # the band edges themselves carry a log singularity; nudge inside
        pole = min(max(omega, lo + 1e-9 * (hi - lo)), hi - 1e-9 * (hi - lo))
        out[i] = principal_value_integral(values, pole, grid=grid)
    return out


def lamb_shift_frame(profile: LdosProfile, cfg: EmitterConfig, grid: FrequencyGrid) -> pd.DataFrame:
    """Lamb-shift curve with frequencies and offsets from the transition"""
    return pd.DataFrame({"omega": grid.points, "offset": grid.points - cfg.omega0,
                         "lamb_shift": lamb_shift_curve(profile, cfg, grid)})


def lamb_shift(profile: LdosProfile, cfg: EmitterConfig, omega: float) -> float:
    """
    Lamb shift Delta_L(omega) relative to the homogeneous background

    Args:
        profile: LDOS profile
        cfg: Emitter
        omega: Frequency inside the band

    Returns:
        float: Shift in rad/ns
    """
    return float(lamb_shift_curve(profile, cfg, [omega])[0])


def emission_spectrum(profile: LdosProfile, cfg: EmitterConfig, grid: FrequencyGrid,
                      normalization: Normalization = "peak") -> Spectrum:
    """
    Emission spectrum to all orders in the coupling,

        S(W) ~ 1 / ([W - w0 - Delta_L(W)]^2 + (gamma(W)/2)^2),
        gamma(W) = gamma_hom F_P(W) W(W) + gamma_side.

    Args:
        profile: LDOS profile
        cfg: Emitter
        grid: Frequencies (inside cfg.band)
        normalization: 'peak' (default), 'area' or 'raw'

    Returns:
        Spectrum
    """
    omega = grid.points
    _check_in_band(cfg, omega, "spectrum grid")
    shift = lamb_shift_curve(profile, cfg, omega)
    gamma = cfg.gamma_hom * evaluate_purcell(profile, omega) * cfg.weight(omega) + cfg.gamma_side
    density = 1.0 / ((omega - cfg.omega0 - shift) ** 2 + 0.25 * gamma ** 2)
    return normalize(grid, density, normalization)

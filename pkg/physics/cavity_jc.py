# physics/cavity_jc.py - Dissipative Jaynes-Cummings model in the single-excitation sector
"""
Basis |1> = |e,0>, |2> = |g,1_c>, |3> = |g,0>. The frame rotates at the
cavity frequency, so the emitter carries the detuning Delta = w0 - w_c.
Spectra are returned against the offset from the mean frequency
(w0 + w_c)/2, which makes +Delta and -Delta mirror images.

Internally a state is the real 8-vector

    [rho11, rho22, Re rho12, Im rho12, Re rho13, Im rho13, Re rho23, Im rho23]

and every equation of motion is linear, dx/dt = A x.
"""
import math
import logging
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy import linalg

import config
from physics.ldos import CavityParams, LorentzianCavity, cavity_fp_res
from physics.spectrum import Spectrum, Normalization, normalize
from utils.errors import DomainError, DegenerateInput, StepSizeError
from utils.numerics import sinhc
from utils.units import FrequencyGrid

logger = logging.getLogger(__name__)

Regime = Literal["weak", "intermediate", "strong"]

_TWO_PI = 2.0 * np.pi
_INVARIANT_TOL = 1e-6
_CHUNK = 256

# g/2pi, kappa/2pi, gamma/2pi in GHz and Q of representative devices
CAVITY_PRESETS: Dict[str, Dict[str, float]] = {
    "micropillar": {"g_ghz": 4.0, "kappa_ghz": 5.0, "gamma_ghz": 4.0, "q": 6.0e4},
    "pc_cavity": {"g_ghz": 22.0, "kappa_ghz": 11.0, "gamma_ghz": 0.1, "q": 3.0e4},
    "nanobeam": {"g_ghz": 27.0, "kappa_ghz": 13.0, "gamma_ghz": 3.0, "q": 3.0e4},
    "microdisk": {"g_ghz": 3.0, "kappa_ghz": 1.0, "gamma_ghz": 0.6, "q": 4.0e5},
}


class JcParams(BaseModel):
    """Rates in 1/ns, detuning Delta = w0 - w_c in rad/ns"""
    model_config = ConfigDict(frozen=True)

    g: float = Field(..., ge=0, description="Emitter-cavity coupling")
    kappa: float = Field(..., ge=0, description="Cavity energy loss rate")
    gamma_ng: float = Field(0.0, ge=0, description="Emission out of the cavity mode")
    gamma_dp: float = Field(0.0, ge=0, description="Pure dephasing rate")
    delta: float = Field(0.0, description="Emitter-cavity detuning w0 - w_c")

    @property
    def max_rate(self) -> float:
        return max(self.g, self.kappa, self.gamma_ng, self.gamma_dp, abs(self.delta))


class JcState(BaseModel):
    """Single-excitation density-matrix entries"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    rho11: float = Field(1.0, ge=0, le=1, description="Emitter population")
    rho22: float = Field(0.0, ge=0, le=1, description="Cavity photon number")
    rho12: complex = Field(0j, description="Photon-assisted polarization <a^dag sigma_->")
    rho13: complex = Field(0j, description="<sigma_->")
    rho23: complex = Field(0j, description="<a>")

    @field_validator("rho12", "rho13", "rho23", mode="before")
    @classmethod
    def _as_complex(cls, value):
        return complex(value)

    @model_validator(mode="after")
    def _physical(self):
        if self.rho11 + self.rho22 > 1 + 1e-12:
            raise ValueError("rho11 + rho22 must not exceed 1")
        if abs(self.rho12) ** 2 > self.rho11 * self.rho22 + 1e-12:
            raise ValueError("|rho12|^2 must not exceed rho11 rho22")
        return self

    def to_vector(self) -> np.ndarray:
        return np.array([self.rho11, self.rho22, self.rho12.real, self.rho12.imag,
                         self.rho13.real, self.rho13.imag, self.rho23.real, self.rho23.imag])


class JcTrajectory(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    t: np.ndarray
    states: np.ndarray = Field(..., description="(n, 8) real state vectors")

    @property
    def rho11(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def rho22(self) -> np.ndarray:
        return self.states[:, 1]

    @property
    def rho12(self) -> np.ndarray:
        return self.states[:, 2] + 1j * self.states[:, 3]

    @property
    def rho13(self) -> np.ndarray:
        return self.states[:, 4] + 1j * self.states[:, 5]

    @property
    def rho23(self) -> np.ndarray:
        return self.states[:, 6] + 1j * self.states[:, 7]

    def state(self, index: int) -> JcState:
        x = self.states[index]
        return JcState(rho11=min(max(x[0], 0.0), 1.0), rho22=min(max(x[1], 0.0), 1.0),
                       rho12=complex(x[2], x[3]), rho13=complex(x[4], x[5]), rho23=complex(x[6], x[7]))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"t_ns": self.t, "rho11": self.rho11, "rho22": self.rho22,
                             "re_rho12": self.states[:, 2], "im_rho12": self.states[:, 3]})


class RhoBar(BaseModel):
    """Time-integrated matrix elements int_0^inf rho_ij(t) dt"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    rho11: float
    rho22: float
    rho12: complex

    @field_validator("rho12", mode="before")
    @classmethod
    def _as_complex(cls, value):
        return complex(value)

    @property
    def rho21(self) -> complex:
        return self.rho12.conjugate()


class JcSpectra(BaseModel):
    model_config = ConfigDict(frozen=True)

    emitter: Spectrum
    cavity: Spectrum

    def to_frame(self) -> pd.DataFrame:
        """Offsets from the mean frequency with both spectra"""
        return pd.DataFrame({"offset": self.emitter.omega, "emitter": self.emitter.density,
                             "cavity": self.cavity.density})


class DressedLevel(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    upper: float = Field(..., description="E_{+,n} in rad/ns")
    lower: float = Field(..., description="E_{-,n} in rad/ns")

    @property
    def splitting(self) -> float:
        return self.upper - self.lower


class DressedLadder(BaseModel):
    """Dressed-state energies plus the laser frequencies for blockade and tunnelling"""
    model_config = ConfigDict(frozen=True)

    ground: float
    levels: List[DressedLevel]
    blockade_frequencies: Tuple[float, float] = Field(..., description="Laser at E_{-,1}, E_{+,1} above ground")
    tunneling_frequencies: Tuple[float, float] = Field(..., description="Laser at half of E_{-,2}, E_{+,2}")


def cavity_preset(name: str) -> JcParams:
    """
    Representative device parameters (on resonance, no pure dephasing)

    Args:
        name: 'micropillar', 'pc_cavity', 'nanobeam' or 'microdisk'
    """
    if name not in CAVITY_PRESETS:
        raise DomainError(f"Unknown cavity preset '{name}'; choose from {', '.join(CAVITY_PRESETS)}")
    entry = CAVITY_PRESETS[name]
    return JcParams(g=_TWO_PI * entry["g_ghz"], kappa=_TWO_PI * entry["kappa_ghz"],
                    gamma_ng=_TWO_PI * entry["gamma_ghz"])


def from_ldos(cavity: CavityParams, gamma_hom: float, beta: float) -> JcParams:
    """
    Jaynes-Cummings parameters of an emitter described by a Lorentzian LDOS

        g = sqrt(F_P gamma_hom w / 4Q),  kappa = w / Q,  gamma_ng = gamma_hom F_P (1/beta - 1)

    Args:
        cavity: Cavity mode and emitter placement
        gamma_hom: Radiative rate in the homogeneous medium
        beta: Fraction of emission into the cavity mode, (0, 1]

    Returns:
        JcParams on resonance
    """
    if beta == 0:
        raise DegenerateInput("beta = 0 leaves no coupling to the cavity")
    if not 0 < beta <= 1:
        raise DomainError(f"beta must lie in (0, 1], got {beta}")
    if gamma_hom <= 0:
        raise DomainError(f"gamma_hom must be positive, got {gamma_hom}")
    fp = cavity_fp_res(cavity)
    return JcParams(g=math.sqrt(fp * gamma_hom * cavity.omega_c / (4.0 * cavity.q)),
                    kappa=cavity.omega_c / cavity.q,
                    gamma_ng=gamma_hom * fp * (1.0 / beta - 1.0))


def to_ldos(p: JcParams, omega_c: float, gamma_hom: float) -> Tuple[LorentzianCavity, float]:
    """
    Lorentzian LDOS reproducing the Jaynes-Cummings coupling

    Returns:
        Tuple of (profile with Q = w_c/kappa and F_res = 4g^2/(kappa gamma_hom), gamma_side = gamma_ng)
    """
    if p.kappa <= 0:
        raise DegenerateInput("A lossless cavity has no Lorentzian LDOS")
    if gamma_hom <= 0:
        raise DomainError(f"gamma_hom must be positive, got {gamma_hom}")
    profile = LorentzianCavity(omega_c=omega_c, q=omega_c / p.kappa, fp_res=4.0 * p.g ** 2 / (p.kappa * gamma_hom))
    return profile, p.gamma_ng


def generator(p: JcParams) -> np.ndarray:
    """8x8 real generator A of dx/dt = A x"""
    g, d = p.g, p.delta
    gam = 0.5 * (p.gamma_ng + p.kappa) + p.gamma_dp
    gam13 = 0.5 * p.gamma_ng + p.gamma_dp
    half_k = 0.5 * p.kappa
    a = np.zeros((8, 8))
    a[0, 0], a[0, 3] = -p.gamma_ng, -2.0 * g
    a[1, 1], a[1, 3] = -p.kappa, 2.0 * g
    a[2, 2], a[2, 3] = -gam, d
    a[3, 0], a[3, 1], a[3, 2], a[3, 3] = g, -g, -d, -gam
    a[4, 4], a[4, 5], a[4, 7] = -gam13, d, g
    a[5, 4], a[5, 5], a[5, 6] = -d, -gam13, -g
    a[6, 5], a[6, 6] = g, -half_k
    a[7, 4], a[7, 7] = -g, -half_k
    return a


def _step_matrix(a: np.ndarray, dt: float, method: str) -> np.ndarray:
    if method == "expm":
        return linalg.expm(a * dt)
    if method != "rk4":
        raise DomainError(f"Unknown integration method '{method}'")
    h = a * dt
    h2 = h @ h
    h3 = h2 @ h
    return np.eye(a.shape[0]) + h + h2 / 2.0 + h3 / 6.0 + (h3 @ h) / 24.0


def _check_invariants(states: np.ndarray, t: np.ndarray, previous_trace: float):
    rho11, rho22 = states[:, 0], states[:, 1]
    bad = np.flatnonzero((rho11 < -_INVARIANT_TOL) | (rho22 < -_INVARIANT_TOL))
    if bad.size:
        raise StepSizeError(f"Negative population at t = {t[bad[0]]:.6g} ns; reduce dt")
    trace = np.concatenate([[previous_trace], rho11 + rho22])
    grew = np.flatnonzero(np.diff(trace) > _INVARIANT_TOL)
    if grew.size:
        raise StepSizeError(f"rho11 + rho22 increased at t = {t[grew[0]]:.6g} ns; reduce dt")
    coherence = states[:, 2] ** 2 + states[:, 3] ** 2
    bad = np.flatnonzero(coherence > rho11 * rho22 + _INVARIANT_TOL)
    if bad.size:
        raise StepSizeError(f"|rho12|^2 exceeds rho11 rho22 at t = {t[bad[0]]:.6g} ns; reduce dt")


def evolve(p: JcParams, init: JcState, T: float, dt: float, method: str = "rk4") -> JcTrajectory:
    """
    Integrate the single-excitation master equation

    The generator is constant, so the fixed-step RK4 update is a fixed matrix
    and the trajectory is propagated in blocks of matrix powers. method='expm'
    uses the exact propagator instead.

    Args:
        p: Model parameters
        init: Initial state
        T: Final time in ns
        dt: Step in ns, at most 0.05 / max rate
        method: 'rk4' or 'expm'

    Returns:
        JcTrajectory on 0, dt, ..., T
    """
    if T <= 0 or dt <= 0:
        raise DomainError(f"T and dt must be positive, got T={T}, dt={dt}")
    if p.max_rate > 0 and dt > 0.05 / p.max_rate * (1 + 1e-12):
        raise DomainError(f"dt={dt} exceeds 0.05 / max rate = {0.05 / p.max_rate:.6g} ns")

    n_steps = int(round(T / dt))
    step = _step_matrix(generator(p), dt, method)
    powers = np.empty((_CHUNK, 8, 8))
    powers[0] = np.eye(8)
    for k in range(1, _CHUNK):
        powers[k] = step @ powers[k - 1]
    jump = step @ powers[-1]

    t = dt * np.arange(n_steps + 1)
    states = np.empty((n_steps + 1, 8))
    x = init.to_vector()
    trace = x[0] + x[1]
    for start in range(0, n_steps + 1, _CHUNK):
        count = min(_CHUNK, n_steps + 1 - start)
        block = powers[:count] @ x
        _check_invariants(block, t[start:start + count], trace)
        states[start:start + count] = block
        trace = block[-1, 0] + block[-1, 1]
        x = jump @ x
    logger.debug(f"Jaynes-Cummings {method} propagation: {n_steps} steps of {dt:.4g} ns")
    return JcTrajectory(t=t, states=states)


def analytic_rho11(p: JcParams, t) -> np.ndarray:
    """
    Emitter population for Delta = 0 and gamma_dp = 0 with the emitter initially excited

    rho11 = |c_e|^2 with c_e = exp(-(g_ng + kappa) t/4) (cosh s t - (g_ng - kappa)/4 sinh(s t)/s)
    and s = sqrt((g_ng - kappa)^2/16 - g^2), continued to imaginary s.

    Args:
        p: Model parameters (delta and gamma_dp must vanish)
        t: Times in ns
    """
    if p.delta != 0 or p.gamma_dp != 0:
        raise DomainError("analytic_rho11 needs Delta = 0 and gamma_dp = 0")
    t = np.asarray(t, dtype=float)
    diff = p.gamma_ng - p.kappa
    s = np.sqrt(complex(diff ** 2 / 16.0 - p.g ** 2))
    st = s * t
    amplitude = np.exp(-0.25 * (p.gamma_ng + p.kappa) * t) * (np.cosh(st) - 0.25 * diff * t * sinhc(st))
    value = np.abs(amplitude) ** 2
    return float(value) if np.ndim(value) == 0 else value


def rabi_frequency(p: JcParams) -> complex:
    """Omega_R = sqrt((g_ng - kappa)^2/4 - 4 g^2); imaginary in strong coupling"""
    return complex(np.sqrt(complex((p.gamma_ng - p.kappa) ** 2 / 4.0 - 4.0 * p.g ** 2)))


def classify_regime(p: JcParams, weak_factor: Optional[float] = None) -> Regime:
    """
    Coupling regime from g against |gamma_ng - kappa| / 4

    strong if g exceeds the threshold, weak if g is below weak_factor times it
    (config.WEAK_COUPLING_FACTOR by default), intermediate otherwise.
    """
    factor = config.WEAK_COUPLING_FACTOR if weak_factor is None else weak_factor
    threshold = abs(p.gamma_ng - p.kappa) / 4.0
    if p.g == 0:
        return "weak"
    if p.g > threshold:
        return "strong"
    if p.g < factor * threshold:
        return "weak"
    return "intermediate"


def rabi_splitting(p: JcParams) -> float:
    """|Omega_R| in the strong-coupling regime, 0 otherwise"""
    return abs(rabi_frequency(p)) if classify_regime(p) == "strong" else 0.0


def weak_coupling_rate(p: JcParams) -> float:
    """Emitter decay rate gamma_ng + 4 g^2 kappa / (kappa^2 + 4 Delta^2) for g << kappa"""
    if p.kappa == 0 and p.delta == 0:
        raise DegenerateInput("Weak-coupling rate undefined for a lossless resonant cavity")
    return p.gamma_ng + 4.0 * p.g ** 2 * p.kappa / (p.kappa ** 2 + 4.0 * p.delta ** 2)


def _slowest_rate(a: np.ndarray) -> float:
    eig = np.linalg.eigvals(a)
    return float(np.min(-eig.real))


def rho_bar(p: JcParams, init: Optional[JcState] = None, method: str = "trajectory",
            dt: Optional[float] = None) -> RhoBar:
    """
    Time-integrated entries rho_bar_ij = int_0^inf rho_ij(t) dt

    'trajectory' integrates the RK4 solution with the trapezoidal rule until
    every entry is below config.RHO_TAIL_CUTOFF and adds the exponential tail
    x(T) / lambda_slow; 'resolvent' returns -A^-1 x0.

    Args:
        p: Model parameters; the system must decay
        init: Initial state (emitter excited by default)
        method: 'trajectory' or 'resolvent'
        dt: Step for the trajectory method (0.02 / max rate by default)
    """
    init = init or JcState()
    a = generator(p)[:4, :4]
    if p.kappa + p.gamma_ng <= 0:
        raise DomainError("kappa + gamma_ng must be positive for the system to decay")
    slow = _slowest_rate(a)
    if slow <= 0:
        raise DomainError("The excitation does not decay for these parameters")
    x0 = init.to_vector()[:4]

    if method == "resolvent":
        total = -np.linalg.solve(a, x0)
    elif method == "trajectory":
        dt = dt or 0.02 / p.max_rate
        step = _step_matrix(a, dt, "rk4")
        powers = [np.eye(4)]
        for _ in range(1, _CHUNK):
            powers.append(step @ powers[-1])
        powers = np.array(powers)
        jump = step @ powers[-1]
        total = np.zeros(4)
        x = x0
        cutoff = config.RHO_TAIL_CUTOFF
        max_blocks = int(math.ceil(50.0 * math.log(1.0 / cutoff) / (slow * dt * _CHUNK))) + 1
        for block_index in range(max_blocks):
            block = np.concatenate([powers @ x, [jump @ x]])
            total += dt * (0.5 * block[0] + block[1:-1].sum(axis=0) + 0.5 * block[-1])
            x = block[-1]
            if np.max(np.abs(x)) < cutoff:
                break
        total += x / slow
        logger.debug(f"rho_bar from {block_index + 1} blocks of {_CHUNK} steps, tail {np.max(np.abs(x)):.3g}")
    else:
        raise DomainError(f"Unknown rho_bar method '{method}'")
    return RhoBar(rho11=total[0], rho22=total[1], rho12=complex(total[2], total[3]))


def default_spectrum_grid(p: JcParams, n: int = 4001) -> FrequencyGrid:
    """Grid of offsets from the mean frequency wide enough for both polariton branches"""
    width = 0.5 * (p.kappa + p.gamma_ng) + p.gamma_dp
    span = 2.0 * abs(rabi_frequency(p)) + abs(p.delta) + 20.0 * max(width, 1e-9)
    return FrequencyGrid.dense_near(0.0, max(width, 1e-9), span, n)


def jc_spectra(p: JcParams, grid: Optional[FrequencyGrid] = None, init: Optional[JcState] = None,
               normalization: Normalization = "peak", method: str = "trajectory") -> JcSpectra:
    """
    Emitter and cavity emission spectra from the quantum-regression theorem

    The correlators (<x^dag sigma_->, <x^dag a>) evolve with
    M = [[-(i Delta + gamma_ng/2 + gamma_dp), -i g], [-i g, -kappa/2]], so

        S_em  = Re[(-(M + i w)^-1 (rho_bar11, rho_bar21))_sigma]
        S_cav = Re[(-(M + i w)^-1 (rho_bar12, rho_bar22))_a]

    with w measured in the cavity frame.

    Args:
        p: Model parameters
        grid: Offsets from the mean frequency (w0 + w_c)/2 in rad/ns
        init: Initial state (emitter excited by default)
        normalization: 'peak' (default), 'area' or 'raw'
        method: How rho_bar is obtained, see rho_bar

    Returns:
        JcSpectra
    """
    if grid is None:
        grid = default_spectrum_grid(p)
    rb = rho_bar(p, init, method)
    m = np.array([[-(1j * p.delta + 0.5 * p.gamma_ng + p.gamma_dp), -1j * p.g],
                  [-1j * p.g, -0.5 * p.kappa]])
    omega = grid.points + 0.5 * p.delta
    shifted = m[None, :, :] + 1j * omega[:, None, None] * np.eye(2)[None, :, :]

    source = np.array([[rb.rho11, rb.rho21], [rb.rho12, rb.rho22]], dtype=complex).T
    solved = np.linalg.solve(shifted, np.broadcast_to(source, (omega.size, 2, 2)))
    s_em = -solved[:, 0, 0].real
    s_cav = -solved[:, 1, 1].real

    spectra = {}
    for name, density in (("emitter", s_em), ("cavity", s_cav)):
        top = float(np.max(np.abs(density))) if density.size else 0.0
        # truncation error of rho_bar can leave tiny negative tails
        density = np.where((density < 0) & (-density <= 1e-6 * top), 0.0, density)
        spectra[name] = normalize(grid, density, normalization)
    return JcSpectra(**spectra)


def dressed_ladder(g: float, omega: float, n_max: int) -> DressedLadder:
    """
    Resonant, lossless dressed states E_{+-,n} = (n + 1/2) w +- Omega_n / 2, Omega_n = 2 g sqrt(n)

    Args:
        g: Coupling in rad/ns
        omega: Common emitter and cavity frequency in rad/ns
        n_max: Highest manifold, >= 1
    """
    if n_max < 1:
        raise DomainError(f"n_max must be at least 1, got {n_max}")
    ground = 0.5 * omega
    levels = [DressedLevel(n=n, upper=(n + 0.5) * omega + g * math.sqrt(n), lower=(n + 0.5) * omega - g * math.sqrt(n))
              for n in range(1, n_max + 1)]
    first = levels[0]
    blockade = (first.lower - ground, first.upper - ground)
    if n_max >= 2:
        second = levels[1]
    else:
        second = DressedLevel(n=2, upper=2.5 * omega + g * math.sqrt(2.0), lower=2.5 * omega - g * math.sqrt(2.0))
    tunneling = (0.5 * (second.lower - ground), 0.5 * (second.upper - ground))
    return DressedLadder(ground=ground, levels=levels, blockade_frequencies=blockade, tunneling_frequencies=tunneling)

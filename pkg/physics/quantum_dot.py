# physics/quantum_dot.py - Quantum-dot exciton phenomenology and decay-curve fitting
"""
Bright/dark exciton decay, quantum efficiency, oscillator strength and
coherence relations. Rates in 1/ns, times in ns, energies in eV.

The bright (b) and dark (d) exciton populations follow

    d rho_b/dt = -(g_rad + g_nrad + g_db) rho_b + g_db rho_d
    d rho_d/dt =  g_db rho_b - (g_nrad + g_db) rho_d

which makes rho_b(t) a bi-exponential A_f exp(-g_f t) + A_s exp(-g_s t).
"""
import math
import logging
from typing import Dict, Literal, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy import constants as sc
from scipy import linalg, optimize

import config
from utils.errors import DomainError, DegenerateInput, FitError
from utils.data_loader import load_decay_curve

logger = logging.getLogger(__name__)

FIT_PARAMETERS = ("gamma_rad", "gamma_nrad", "gamma_db", "scale")
MIN_FIT_POINTS = 50


class ExcitonRates(BaseModel):
    """Bright-exciton radiative, shared non-radiative, spin-flip and pure-dephasing rates (1/ns)"""
    model_config = ConfigDict(frozen=True)

    gamma_rad: float = Field(..., ge=0, description="Bright-exciton radiative rate")
    gamma_nrad: float = Field(0.0, ge=0, description="Non-radiative rate, same for bright and dark")
    gamma_db: float = Field(0.0, ge=0, description="Dark <-> bright spin-flip rate")
    gamma_dp: float = Field(0.0, ge=0, description="Pure dephasing rate")


class BiexpRates(BaseModel):
    """Fast/slow rates and amplitudes of the bright-state decay"""
    model_config = ConfigDict(frozen=True)

    gamma_fast: float
    gamma_slow: float
    amp_fast: float
    amp_slow: float


class DecayCurve(BaseModel):
    """Time-resolved photoluminescence histogram"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    t: np.ndarray = Field(..., description="Strictly increasing times in ns")
    counts: np.ndarray = Field(..., description="Counts or intensity, >= 0")
    poisson_noise: bool = Field(False, description="Counts carry shot noise")

    @field_validator("t", "counts", mode="before")
    @classmethod
    def _as_array(cls, value):
        array = np.array(value, dtype=float)
        if array.ndim != 1:
            raise ValueError("decay curve columns must be one-dimensional")
        array.setflags(write=False)
        return array

    @model_validator(mode="after")
    def _check(self):
        if self.t.size != self.counts.size:
            raise ValueError("t and counts differ in length")
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("decay curve times must be strictly increasing")
        if np.any(self.counts < 0):
            raise ValueError("decay curve counts must be non-negative")
        return self

    @classmethod
    def from_csv(cls, path: str, poisson_noise: bool = True) -> "DecayCurve":
        df = load_decay_curve(path)
        return cls(t=df['t_ns'].to_numpy(), counts=df['counts'].to_numpy(), poisson_noise=poisson_noise)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"t_ns": self.t, "counts": self.counts})


class OscillatorParams(BaseModel):
    """Inputs of the strong- and weak-confinement oscillator strength formulas"""
    model_config = ConfigDict(frozen=True)

    e_p: float = Field(..., gt=0, description="Kane energy E_P in eV")
    hbar_omega: float = Field(..., gt=0, description="Transition energy in eV")
    overlap: float = Field(1.0, ge=0, le=1, description="|<F_v|F_c>|^2")
    size: Optional[float] = Field(None, gt=0, description="Lateral size L in nm (weak confinement)")
    a0: Optional[float] = Field(None, gt=0, description="Exciton Bohr radius in nm (weak confinement)")


class BiexpFit(BaseModel):
    """Result of fit_biexp"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    rates: ExcitonRates
    scale: float
    covariance: np.ndarray = Field(..., description="4x4 covariance of (gamma_rad, gamma_nrad, gamma_db, scale)")
    stderr: Dict[str, float]
    at_bound: Dict[str, bool]
    cost: float = Field(..., description="Half the weighted sum of squared residuals")
    nfev: int

    @property
    def estimates(self) -> Dict[str, float]:
        return {"gamma_rad": self.rates.gamma_rad, "gamma_nrad": self.rates.gamma_nrad,
                "gamma_db": self.rates.gamma_db, "scale": self.scale}

    def to_frame(self) -> pd.DataFrame:
        """Fit report rows (parameter, estimate, stderr, at_bound)"""
        est = self.estimates
        return pd.DataFrame({"parameter": list(FIT_PARAMETERS),
                             "estimate": [est[k] for k in FIT_PARAMETERS],
                             "stderr": [self.stderr[k] for k in FIT_PARAMETERS],
                             "at_bound": [self.at_bound[k] for k in FIT_PARAMETERS]})


def _check_initial(rho_b0: float, rho_d0: float):
    if not (0 <= rho_b0 <= 1 and 0 <= rho_d0 <= 1):
        raise DomainError(f"Initial populations must lie in [0, 1], got {rho_b0}, {rho_d0}")
    if rho_b0 + rho_d0 > 1 + 1e-12:
        raise DomainError(f"rho_b0 + rho_d0 = {rho_b0 + rho_d0} exceeds 1")


def biexp_rates(r: ExcitonRates, rho_b0: float = 0.5, rho_d0: float = 0.5) -> BiexpRates:
    """
    Fast and slow decay rates and their amplitudes

    Args:
        r: Exciton rates
        rho_b0: Initial bright population
        rho_d0: Initial dark population

    Returns:
        BiexpRates
    """
    _check_initial(rho_b0, rho_d0)
    mean = 0.5 * r.gamma_rad + r.gamma_nrad + r.gamma_db
    root = math.sqrt(0.25 * r.gamma_rad ** 2 + r.gamma_db ** 2)
    g_fast, g_slow = mean + root, mean - root
    if root == 0.0:
        return BiexpRates(gamma_fast=g_fast, gamma_slow=g_slow, amp_fast=rho_b0, amp_slow=0.0)
    # A_f + A_s = rho_b0 and the initial slope fixes A_f
    bright_out = r.gamma_rad + r.gamma_nrad + r.gamma_db
    amp_fast = ((bright_out - g_slow) * rho_b0 - r.gamma_db * rho_d0) / (g_fast - g_slow)
    return BiexpRates(gamma_fast=g_fast, gamma_slow=g_slow, amp_fast=amp_fast, amp_slow=rho_b0 - amp_fast)


def biexp_decay(r: ExcitonRates, rho_b0: float, rho_d0: float, t) -> np.ndarray:
    """
    Bright-state population A_f exp(-g_f t) + A_s exp(-g_s t)

    Args:
        r: Exciton rates
        rho_b0: Initial bright population
        rho_d0: Initial dark population
        t: Times in ns

    Returns:
        np.ndarray: rho_b(t)
    """
    b = biexp_rates(r, rho_b0, rho_d0)
    t = np.asarray(t, dtype=float)
    return b.amp_fast * np.exp(-b.gamma_fast * t) + b.amp_slow * np.exp(-b.gamma_slow * t)


def rate_matrix(r: ExcitonRates) -> np.ndarray:
    return np.array([[-(r.gamma_rad + r.gamma_nrad + r.gamma_db), r.gamma_db],
                     [r.gamma_db, -(r.gamma_nrad + r.gamma_db)]])


def three_level_populations(r: ExcitonRates, rho_b0: float, rho_d0: float, t) -> Tuple[np.ndarray, np.ndarray]:
    """
    Bright and dark populations from the matrix exponential of the rate equations

    Returns:
        Tuple of (rho_b, rho_d) arrays
    """
    _check_initial(rho_b0, rho_d0)
    m = rate_matrix(r)
    x0 = np.array([rho_b0, rho_d0])
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.array([linalg.expm(m * ti) @ x0 for ti in t])
    return out[:, 0], out[:, 1]


def synthetic_decay_curve(r: ExcitonRates, t, peak_counts: float = 1e4, rho_b0: float = 0.5,
                          rho_d0: float = 0.5, seed: Optional[int] = None) -> DecayCurve:
    """
    Decay histogram whose first bin holds peak_counts; Poisson noise when a seed is given

    Args:
        r: Exciton rates
        t: Times in ns
        peak_counts: Expected counts at t = 0
        rho_b0: Initial bright population
        rho_d0: Initial dark population
        seed: Seed for the noise generator; None gives the noiseless curve
    """
    t = np.asarray(t, dtype=float)
    expected = peak_counts * biexp_decay(r, rho_b0, rho_d0, t) / rho_b0
    if seed is None:
        return DecayCurve(t=t, counts=expected, poisson_noise=False)
    rng = np.random.default_rng(seed)
    return DecayCurve(t=t, counts=rng.poisson(expected).astype(float), poisson_noise=True)


def _span_guess(t: np.ndarray) -> ExcitonRates:
    guess = max(5.0 / max(t[-1] - t[0], 1e-12), 1e-3)
    return ExcitonRates(gamma_rad=guess, gamma_nrad=0.1 * guess, gamma_db=0.1 * guess)


def _log_linear(t: np.ndarray, counts: np.ndarray) -> Tuple[float, float]:
    """Rate and t = 0 amplitude of a Poisson-weighted straight-line fit to log(counts)"""
    slope, intercept = np.polyfit(t, np.log(counts), 1, w=np.sqrt(counts))
    return float(-slope), float(np.exp(intercept))


def initial_guess(curve: DecayCurve, rho_b0: float = 0.5, rho_d0: float = 0.5,
                  min_counts: float = 10.0) -> ExcitonRates:
    """
    Exciton rates peeled from a decay curve

    The slow rate and amplitude come from a log-linear fit of the later half
    of the curve, the fast pair from the early counts left after the slow
    exponential is subtracted. The two rates and the initial slope of rho_b
    are then inverted through

        g_f + g_s = g_rad + 2 (g_nrad + g_db)
        g_f g_s   = (g_rad + g_nrad + g_db)(g_nrad + g_db) - g_db^2
        slope(0)  = (g_rad + g_nrad + g_db) - g_db rho_d0 / rho_b0

    Args:
        curve: Decay curve
        rho_b0: Initial bright population (> 0)
        rho_d0: Initial dark population
        min_counts: Bins below this count are ignored

    Returns:
        ExcitonRates

    Raises:
        DegenerateInput: the curve has too few populated bins or no fast component
    """
    _check_initial(rho_b0, rho_d0)
    if rho_b0 == 0:
        raise DegenerateInput("Peeling needs a non-zero initial bright population")
    t, counts = curve.t, curve.counts
    usable = counts >= min_counts
    if usable.sum() < 10:
        raise DegenerateInput(f"Fewer than 10 bins hold {min_counts} counts or more")
    t_mid = 0.5 * (t[0] + t[np.flatnonzero(usable)[-1]])

    tail = usable & (t >= t_mid)
    if tail.sum() < 5:
        raise DegenerateInput("Too few populated bins in the decay tail")
    g_slow, a_slow = _log_linear(t[tail], counts[tail])
    rest = counts - a_slow * np.exp(-g_slow * t)
    head = (t < t_mid) & (rest >= min_counts)
    if head.sum() < 3:
        raise DegenerateInput("No fast component above the slow exponential")
    g_fast, a_fast = _log_linear(t[head], rest[head])
    if not g_fast > g_slow > 0:
        raise DegenerateInput(f"Peeled rates {g_fast:.3g}, {g_slow:.3g} are not ordered fast > slow > 0")

    s, p = g_fast + g_slow, g_fast * g_slow
    k = (g_fast * a_fast + g_slow * a_slow) / (a_fast + a_slow)
    q = rho_d0 / rho_b0
    if q == 0:
        out_rates = [k]
    else:
        # (q^2 + 1) w^2 - (q^2 s + 2k) w + q^2 p + k^2 = 0 for w = g_rad + g_nrad + g_db
        roots = np.roots([q * q + 1.0, -(q * q * s + 2.0 * k), q * q * p + k * k])
        out_rates = [float(w.real) for w in roots if abs(w.imag) <= 1e-9 * abs(w)] or [float(roots[0].real)]

    candidates = []
    for w in out_rates:
        u = s - w
        d = math.sqrt(max(w * u - p, 0.0)) if q == 0 else (w - k) / q
        candidates.append((w - u, u - d, d))
    # the root whose most negative rate is least negative
    r, n, d = max(candidates, key=min)
    floor = 1e-3 * g_slow
    guess = ExcitonRates(gamma_rad=max(r, floor), gamma_nrad=max(n, floor), gamma_db=max(d, floor))
    logger.debug(f"Peeled guess: gamma_rad={guess.gamma_rad:.4g}, gamma_nrad={guess.gamma_nrad:.4g}, "
                 f"gamma_db={guess.gamma_db:.4g} 1/ns")
    return guess


def fit_biexp(curve: DecayCurve, init: Optional[ExcitonRates] = None, rho_b0: float = 0.5, rho_d0: float = 0.5,
              max_nfev: Optional[int] = None) -> BiexpFit:
    """
    Weighted least-squares fit of scale * rho_b(t) to a decay curve

    Levenberg-Marquardt runs on log-parameters so every rate stays positive.
    It is started from init (when given) and from the rates peeled off the
    curve by initial_guess; the lower-cost result goes on to a bounded
    trust-region pass in linear parameters that polishes it, supplies the
    Jacobian for the covariance and lets a rate settle on zero.
    Weights are 1 / sqrt(max(counts, 1)).

    Args:
        curve: Decay curve, at least 50 points
        init: Optional initial guess (its gamma_dp is carried through unchanged)
        rho_b0: Fixed initial bright population
        rho_d0: Fixed initial dark population
        max_nfev: Evaluation cap per start and stage (config.FIT_MAX_NFEV by default)

    Returns:
        BiexpFit
    """
    if curve.t.size < MIN_FIT_POINTS:
        raise DomainError(f"Decay curve has {curve.t.size} points, at least {MIN_FIT_POINTS} needed")
    if not np.any(curve.counts > 0):
        raise DegenerateInput("Decay curve contains no counts")
    _check_initial(rho_b0, rho_d0)

    max_nfev = max_nfev or config.FIT_MAX_NFEV
    t, counts = curve.t, curve.counts
    weights = 1.0 / np.sqrt(np.maximum(counts, 1.0))

    def model(x):
        rates = ExcitonRates(gamma_rad=x[0], gamma_nrad=x[1], gamma_db=x[2])
        return x[3] * biexp_decay(rates, rho_b0, rho_d0, t)

    def residuals(x):
        return (model(x) - counts) * weights

    guesses = [init] if init is not None else []
    try:
        guesses.append(initial_guess(curve, rho_b0, rho_d0))
    except DegenerateInput as e:
        logger.debug(f"No peeled guess: {e}")
    if not guesses:
        guesses.append(_span_guess(t))

    log_fit, nfev = None, 0
    for guess in guesses:
        floor = 1e-6 * max(guess.gamma_rad, 1e-3)
        start = np.array([max(guess.gamma_rad, floor), max(guess.gamma_nrad, floor), max(guess.gamma_db, floor),
                          float(np.max(counts)) / rho_b0])
        trial = optimize.least_squares(lambda y: residuals(np.exp(y)), np.log(start), method="lm",
                                       xtol=1e-14, ftol=1e-14, gtol=1e-14, max_nfev=max_nfev)
        nfev += trial.nfev
        logger.debug(f"LM stage: status={trial.status}, cost={trial.cost:.6g}, nfev={trial.nfev}")
        if np.isfinite(trial.cost) and (log_fit is None or trial.cost < log_fit.cost):
            log_fit = trial
    if log_fit is None:
        raise FitError(f"Levenberg-Marquardt diverged from all {len(guesses)} starting points")

    polish = optimize.least_squares(residuals, np.exp(log_fit.x), method="trf", bounds=(0.0, np.inf),
                                    xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=max_nfev)
    if polish.status == 0:
        raise FitError(f"Bounded refinement did not converge within {max_nfev} evaluations",
                       residual=float(min(polish.cost, log_fit.cost)))
    x = polish.x
    covariance = np.linalg.pinv(polish.jac.T @ polish.jac)
    stderr = np.sqrt(np.clip(np.diag(covariance), 0.0, None))

    at_bound = {name: bool(polish.active_mask[i] != 0 or x[i] <= 1e-9 * max(x[0], 1e-12))
                for i, name in enumerate(FIT_PARAMETERS)}
    for name, flagged in at_bound.items():
        if flagged:
            logger.warning(f"Fit parameter {name} is at its lower bound")

    rates = ExcitonRates(gamma_rad=x[0], gamma_nrad=x[1], gamma_db=x[2],
                         gamma_dp=init.gamma_dp if init is not None else 0.0)
    g_slow = biexp_rates(rates, rho_b0, rho_d0).gamma_slow
    if g_slow > 0 and t[-1] - t[0] < 3.0 / g_slow:
        logger.warning(f"Curve spans {t[-1] - t[0]:.3g} ns, less than 3 slow lifetimes ({3.0 / g_slow:.3g} ns)")

    fit = BiexpFit(rates=rates, scale=float(x[3]), covariance=covariance,
                   stderr={name: float(s) for name, s in zip(FIT_PARAMETERS, stderr)},
                   at_bound=at_bound, cost=float(polish.cost),
                   nfev=int(nfev + polish.nfev))
    logger.info(f"Bi-exponential fit converged: gamma_rad={x[0]:.6g}, gamma_nrad={x[1]:.6g}, "
                f"gamma_db={x[2]:.6g} 1/ns")
    return fit


def quantum_efficiency(gamma_rad_hom: float, gamma_nrad: float, gamma_rad_local: Optional[float] = None) -> float:
    """
    Quantum efficiency gamma_rad / (gamma_rad + gamma_nrad)

    Args:
        gamma_rad_hom: Radiative rate in the homogeneous medium
        gamma_nrad: Non-radiative rate
        gamma_rad_local: Radiative rate in the actual environment; gives the
            effective quantum efficiency when set

    Returns:
        float: eta (or eta_eff)
    """
    gamma_rad = gamma_rad_hom if gamma_rad_local is None else gamma_rad_local
    if min(gamma_rad, gamma_nrad) < 0:
        raise DomainError(f"Rates must be non-negative, got {gamma_rad}, {gamma_nrad}")
    total = gamma_rad + gamma_nrad
    if total == 0:
        raise DegenerateInput("Quantum efficiency undefined for zero total rate")
    return gamma_rad / total


def effective_quantum_efficiency(gamma_rad_hom: float, gamma_nrad: float, purcell: float) -> float:
    """Quantum efficiency with the radiative rate enhanced by a Purcell factor"""
    if purcell < 0:
        raise DomainError(f"Purcell factor must be non-negative, got {purcell}")
    return quantum_efficiency(gamma_rad_hom, gamma_nrad, purcell * gamma_rad_hom)


def oscillator_strength(p: OscillatorParams, regime: Literal["strong", "weak"]) -> float:
    """
    Dimensionless oscillator strength

    strong confinement: f = (E_P / hbar w) |<F_v|F_c>|^2
    weak confinement:   f = 8 (E_P / hbar w) (L / a0)^2

    Args:
        p: Oscillator parameters
        regime: 'strong' or 'weak'
    """
    ratio = p.e_p / p.hbar_omega
    if regime == "strong":
        return ratio * p.overlap
    if regime == "weak":
        if p.size is None or p.a0 is None:
            raise DomainError("Weak-confinement oscillator strength needs size and a0")
        return 8.0 * ratio * (p.size / p.a0) ** 2
    raise DomainError(f"Unknown confinement regime '{regime}'")


def exciton_bohr_radius(eps_r: float, m_e: float, m_h: float) -> float:
    """
    Exciton Bohr radius a0 = 4 pi eps0 eps_r hbar^2 / (q^2 m0 m) in nm

    Args:
        eps_r: Relative permittivity
        m_e: Electron effective mass in units of m0
        m_h: Hole effective mass in units of m0
    """
    if min(eps_r, m_e, m_h) <= 0:
        raise DomainError("eps_r and the effective masses must be positive")
    reduced = m_e * m_h / (m_e + m_h)
    a0 = 4.0 * np.pi * sc.epsilon_0 * eps_r * sc.hbar ** 2 / (sc.e ** 2 * sc.m_e * reduced)
    return a0 * 1e9


class Coherence(BaseModel):
    model_config = ConfigDict(frozen=True)

    t2: float = Field(..., description="Total coherence time in ns")
    indistinguishability: float = Field(..., description="I = T2 / 2 T1")


def coherence(t1: float, t2_star: float = float("inf")) -> Coherence:
    """
    Total coherence time 1/T2 = 1/2T1 + 1/T2* and indistinguishability T2/2T1

    Args:
        t1: Population lifetime in ns
        t2_star: Pure-dephasing time in ns (inf for no dephasing)
    """
    if t1 <= 0 or t2_star <= 0:
        raise DomainError(f"T1 and T2* must be positive, got {t1}, {t2_star}")
    t2 = 1.0 / (0.5 / t1 + 1.0 / t2_star)
    return Coherence(t2=t2, indistinguishability=t2 / (2.0 * t1))


def indistinguishability(gamma_tot: float, gamma_dp: float) -> float:
    """I = gamma_tot / (gamma_tot + 2 gamma_dp)"""
    if gamma_tot <= 0 or gamma_dp < 0:
        raise DomainError(f"Need gamma_tot > 0 and gamma_dp >= 0, got {gamma_tot}, {gamma_dp}")
    return gamma_tot / (gamma_tot + 2.0 * gamma_dp)

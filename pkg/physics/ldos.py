# physics/ldos.py - Relative LDOS (Purcell) profiles and Purcell / beta-factor formulas
"""
An LDOS profile is the Purcell spectrum F_P(w) = rho(w) / rho_hom(w) seen by
a dipole. Four variants are supported: homogeneous reference, Lorentzian
cavity, phenomenological waveguide band edge and tabulated data.

Every profile also carries a `background`: the part of F_P treated in the
Markov approximation by the emitter dynamics. Only F_P - background enters
the memory kernel and the Lamb shift.
"""
import logging
from typing import Annotated, List, Literal, Optional, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from utils.errors import DomainError, DegenerateInput
from utils.data_loader import load_tabulated_ldos
from utils.units import convert

logger = logging.getLogger(__name__)


class HomogeneousProfile(BaseModel):
    """Homogeneous reference medium; F_P = 1 everywhere"""
    model_config = ConfigDict(frozen=True)

    kind: Literal["homogeneous"] = "homogeneous"
    n: float = Field(1.0, gt=0, description="Refractive index of the reference medium")

    @property
    def background(self) -> float:
        return 1.0

    def purcell(self, omega):
        return np.ones_like(np.asarray(omega, dtype=float))

    def validity_band(self) -> Optional[Tuple[float, float]]:
        return None

    def features(self) -> List[float]:
        return []


class LorentzianCavity(BaseModel):
    """Single cavity mode: F_P(w) = F_res (w_c^2/4Q^2) / ((w_c - w)^2 + w_c^2/4Q^2)"""
    model_config = ConfigDict(frozen=True)

    kind: Literal["lorentzian"] = "lorentzian"
    omega_c: float = Field(..., gt=0, description="Cavity resonance in rad/ns")
    q: float = Field(..., gt=0, description="Quality factor")
    fp_res: float = Field(..., ge=0, description="Purcell factor on resonance")
    background: float = Field(0.0, ge=0, description="Markovian background relative LDOS")

    @property
    def kappa(self) -> float:
        """Cavity energy loss rate w_c / Q"""
        return self.omega_c / self.q

    @property
    def half_width(self) -> float:
        return 0.5 * self.kappa

    def purcell(self, omega):
        omega = np.asarray(omega, dtype=float)
        hw2 = self.half_width ** 2
        return self.background + self.fp_res * hw2 / ((self.omega_c - omega) ** 2 + hw2)

    def validity_band(self) -> Optional[Tuple[float, float]]:
        return None

    def features(self) -> List[float]:
        hw = self.half_width
        return [self.omega_c + k * hw for k in (-10, -3, -1, 0, 1, 3, 10)]

    @classmethod
    def from_cavity(cls, params: "CavityParams", background: float = 0.0) -> "LorentzianCavity":
        """Profile of an emitter placed according to params.f_r and params.alignment"""
        return cls(omega_c=params.omega_c, q=params.q, fp_res=cavity_fp_res(params), background=background)


class WaveguideBandEdge(BaseModel):
    """
    Phenomenological slow-light band edge: a plateau of height F_peak starting
    at omega_edge, Gaussian roll-off of width rolloff_width below the edge
    (disorder-smoothed cut-off) and, if the plateau is finite, the same roll-off
    above its upper end.
    """
    model_config = ConfigDict(frozen=True)

    kind: Literal["band_edge"] = "band_edge"
    fp_peak: float = Field(..., gt=0, description="Purcell factor on the plateau (finite)")
    omega_edge: float = Field(..., gt=0, description="Band-edge frequency in rad/ns")
    rolloff_width: float = Field(..., gt=0, description="Gaussian roll-off width in rad/ns")
    background: float = Field(0.1, ge=0, description="Relative LDOS of the non-guided modes")
    plateau_width: float = Field(float("inf"), ge=0, description="Width of the slow-light plateau in rad/ns")

    def shape(self, omega):
        omega = np.asarray(omega, dtype=float)
        top = self.omega_edge + self.plateau_width
        below = np.exp(-0.5 * ((omega - self.omega_edge) / self.rolloff_width) ** 2)
        above = np.exp(-0.5 * ((omega - top) / self.rolloff_width) ** 2) if np.isfinite(top) else 1.0
        return np.where(omega < self.omega_edge, below, np.where(omega > top, above, 1.0))

    def purcell(self, omega):
        return self.background + (self.fp_peak - self.background) * self.shape(omega)

    def validity_band(self) -> Optional[Tuple[float, float]]:
        return None

    def features(self) -> List[float]:
        w = self.rolloff_width
        points = [self.omega_edge + k * w for k in (-8, -4, -2, -1, 0)]
        if np.isfinite(self.plateau_width):
            top = self.omega_edge + self.plateau_width
            points += [top + k * w for k in (0, 1, 2, 4, 8)]
        return points


class TabulatedProfile(BaseModel):
    """Purcell spectrum sampled on a grid; linear interpolation, no extrapolation"""
    model_config = ConfigDict(frozen=True)

    kind: Literal["tabulated"] = "tabulated"
    omega: Tuple[float, ...] = Field(..., description="Strictly increasing grid in rad/ns")
    values: Tuple[float, ...] = Field(..., description="F_P on the grid, >= 0")
    background: float = Field(0.0, ge=0, description="Markovian background relative LDOS")

    @field_validator("omega")
    @classmethod
    def _increasing(cls, value):
        if len(value) < 2 or np.any(np.diff(value) <= 0):
            raise ValueError("tabulated grid must be strictly increasing with at least 2 points")
        return value

    @model_validator(mode="after")
    def _matching(self):
        if len(self.values) != len(self.omega):
            raise ValueError("tabulated values and grid differ in length")
        if min(self.values) < 0:
            raise ValueError("tabulated Purcell factors must be non-negative")
        return self

    def purcell(self, omega):
        omega = np.asarray(omega, dtype=float)
        lo, hi = self.omega[0], self.omega[-1]
        if np.any(omega < lo) or np.any(omega > hi):
            raise DomainError(f"Frequency outside tabulated LDOS grid [{lo}, {hi}]")
        return np.interp(omega, self.omega, self.values)

    def validity_band(self) -> Optional[Tuple[float, float]]:
        return (self.omega[0], self.omega[-1])

    def features(self) -> List[float]:
        return list(self.omega)

    @classmethod
    def from_csv(cls, path: str, omega_unit: str = "rad/ns", background: float = 0.0) -> "TabulatedProfile":
        """
        Load a two-column CSV (frequency, F_P)

        Args:
            path: CSV path
            omega_unit: Unit of the first column ('rad/ns', 'ueV', 'meV', ...)
            background: Markovian background relative LDOS
        """
        df = load_tabulated_ldos(path)
        omega = [convert(w, omega_unit, "rad/ns") for w in df['omega']]
        logger.info(f"Loaded tabulated LDOS with {len(omega)} points from {path}")
        return cls(omega=tuple(omega), values=tuple(df['purcell']), background=background)


LdosProfile = Annotated[Union[HomogeneousProfile, LorentzianCavity, WaveguideBandEdge, TabulatedProfile],
                        Field(discriminator="kind")]


class CavityParams(BaseModel):
    """Cavity mode parameters; V_eff in units of (lambda/n)^3"""
    model_config = ConfigDict(frozen=True)

    omega_c: float = Field(..., gt=0, description="Cavity resonance in rad/ns")
    q: float = Field(..., gt=0, description="Quality factor")
    v_eff: float = Field(..., gt=0, description="Effective mode volume in (lambda/n)^3")
    n: float = Field(3.5, gt=0, description="Refractive index")
    f_r: float = Field(1.0, ge=0, le=1, description="Spatial mismatch |E(r)|^2/|E_max|^2")
    alignment: float = Field(1.0, ge=0, le=1, description="|e_c . e_d|^2")


class WaveguideModeParams(BaseModel):
    """Guided mode parameters; V_eff per unit cell in units of a (lambda/n)^2"""
    model_config = ConfigDict(frozen=True)

    n: float = Field(3.5, gt=0, description="Refractive index")
    n_g: float = Field(..., ge=1, description="Group index c/v_g")
    v_eff_per_cell: float = Field(1.0 / 3.0, gt=0, description="V_eff / a in units of (lambda/n)^2")
    f_r: float = Field(1.0, ge=0, le=1, description="Spatial mismatch")
    alignment: float = Field(1.0, ge=0, le=1, description="|e_k . e_d|^2")


def evaluate_purcell(profile: LdosProfile, omega):
    """
    Purcell factor F_P(omega) of a profile

    Args:
        profile: Any LDOS profile
        omega: Angular frequency (scalar or array) in rad/ns

    Returns:
        F_P with the shape of omega
    """
    value = profile.purcell(omega)
    return float(value) if np.ndim(value) == 0 else value


def purcell_frame(profile: LdosProfile, omega: np.ndarray, reference: float) -> pd.DataFrame:
    """Purcell factor against frequency and offset from a reference frequency"""
    omega = np.asarray(omega, dtype=float)
    return pd.DataFrame({"omega": omega, "offset": omega - reference, "purcell": evaluate_purcell(profile, omega)})


def cavity_fp_max(p: CavityParams) -> float:
    """Optimum Purcell factor 3 Q / (4 pi^2 V_eff) for an ideally placed, aligned dipole"""
    return 3.0 * p.q / (4.0 * np.pi ** 2 * p.v_eff)


def cavity_fp_res(p: CavityParams) -> float:
    """On-resonance Purcell factor including placement and orientation"""
    return cavity_fp_max(p) * p.f_r * p.alignment


def waveguide_fp_max(p: WaveguideModeParams, wavelength_nm: float) -> float:
    """
    Maximum waveguide Purcell factor (3/(4 pi n)) ((lambda^2/n^2)/(V_eff/a)) n_g

    With V_eff/a given in units of (lambda/n)^2 the wavelength cancels; it is
    kept in the signature to state the operating point.

    Args:
        p: Guided mode parameters
        wavelength_nm: Vacuum wavelength in nm

    Returns:
        float: F_P^max
    """
    if wavelength_nm <= 0:
        raise DomainError(f"Wavelength must be positive, got {wavelength_nm}")
    lam_n2 = (wavelength_nm / p.n) ** 2
    v_eff_over_a = p.v_eff_per_cell * lam_n2
    return 3.0 / (4.0 * np.pi * p.n) * (lam_n2 / v_eff_over_a) * p.n_g


def waveguide_fp(p: WaveguideModeParams, wavelength_nm: float) -> float:
    """Waveguide Purcell factor of an off-ideal dipole"""
    return waveguide_fp_max(p, wavelength_nm) * p.f_r * p.alignment


def beta_factor(gamma_wg: float, gamma_ng: float, gamma_nrad: float) -> float:
    """
    Fraction of decays that emit into the preferred mode

    Args:
        gamma_wg: Rate into the waveguide (or cavity) mode
        gamma_ng: Rate into all other optical modes
        gamma_nrad: Intrinsic non-radiative rate

    Returns:
        float: beta in [0, 1]
    """
    rates = (gamma_wg, gamma_ng, gamma_nrad)
    if min(rates) < 0:
        raise DomainError(f"Rates must be non-negative, got {rates}")
    total = sum(rates)
    if total == 0:
        raise DegenerateInput("beta factor undefined when every rate is zero")
    return gamma_wg / total


def beta_from_purcell(fp_wg: float, fp_ng: float, nrad_over_hom: float = 0.0) -> float:
    """beta from Purcell factors of the guided and non-guided channels (rates in units of gamma_hom)"""
    return beta_factor(fp_wg, fp_ng, nrad_over_hom)

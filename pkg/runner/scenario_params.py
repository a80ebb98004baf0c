# runner/scenario_params.py - Typed parameter blocks for each scenario kind
"""
Every scenario kind has a pydantic model describing its [params] section.
Numeric fields that carry a physical dimension declare their internal unit
through `quantity(...)`; the config parser converts suffixed values such as
"22 GHz_x2pi" or "10 K" into that unit. Values are stored in internal units.
"""
import math
from typing import Dict, Literal, Optional, Type

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

import config
from physics.cavity_jc import JcParams, JcState, cavity_preset
from physics.emitter_dynamics import EmitterConfig
from physics.ldos import (HomogeneousProfile, LorentzianCavity, WaveguideBandEdge, TabulatedProfile,
                          CavityParams, WaveguideModeParams)
from physics.phonons import PhononParams
from physics.resonance_fluorescence import DriveParams
from physics.spectrum import Normalization
from utils.units import DEFAULT_UNITS, FrequencyGrid

# 950 nm transition
DEFAULT_OMEGA0 = DEFAULT_UNITS.wavelength_to_omega(950.0)


def quantity(default, unit: str, **kwargs):
    """Field whose value is expressed in `unit` (suffixed values are converted)"""
    return Field(default, json_schema_extra={"unit": unit}, **kwargs)


def field_unit(model: Type[BaseModel], name: str) -> Optional[str]:
    extra = model.model_fields[name].json_schema_extra
    return extra.get("unit") if isinstance(extra, dict) else None


class ParamsBlock(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class EmitterBlock(ParamsBlock):
    """Two-level emitter in one of the LDOS profiles"""
    profile: Literal["homogeneous", "lorentzian", "band_edge", "tabulated"] = "homogeneous"
    omega0: float = quantity(DEFAULT_OMEGA0, "rad/ns", gt=0, description="Transition frequency (or wavelength in nm)")
    gamma_hom: float = quantity(1.0, "1/ns", gt=0, description="Homogeneous-medium radiative rate")
    gamma_side: float = quantity(0.0, "1/ns", ge=0, description="Markovian decay outside the profile")
    half_width: float = quantity(1000.0, "rad/ns", gt=0, description="Half width of the resolved band")
    omega_weighted: bool = False
    background: Optional[float] = Field(None, ge=0, description="Markovian background; profile default if unset")
    # lorentzian
    q: float = Field(1.0e4, gt=0, description="Cavity quality factor")
    fp_res: float = Field(10.0, ge=0, description="Purcell factor on resonance")
    cavity_detuning: float = quantity(0.0, "rad/ns", description="w_c - w0")
    # band_edge
    fp_peak: float = Field(10.0, gt=0, description="Plateau Purcell factor")
    edge_detuning: float = quantity(-50.0, "rad/ns", description="w_edge - w0")
    rolloff_width: float = quantity(20.0, "rad/ns", gt=0)
    plateau_width: float = quantity(math.inf, "rad/ns", ge=0)
    # tabulated
    ldos_csv: Optional[str] = Field(None, description="Two-column CSV (frequency, F_P)")
    ldos_unit: str = Field("rad/ns", description="Unit of the CSV frequency column")

    @model_validator(mode="after")
    def _profile_inputs(self):
        if self.profile == "tabulated" and not self.ldos_csv:
            raise ValueError("profile 'tabulated' needs ldos_csv")
        if self.half_width >= self.omega0:
            raise ValueError("half_width must be smaller than omega0")
        return self

    def ldos_profile(self):
        extra = {} if self.background is None else {"background": self.background}
        if self.profile == "lorentzian":
            return LorentzianCavity(omega_c=self.omega0 + self.cavity_detuning, q=self.q, fp_res=self.fp_res, **extra)
        if self.profile == "band_edge":
            return WaveguideBandEdge(fp_peak=self.fp_peak, omega_edge=self.omega0 + self.edge_detuning,
                                     rolloff_width=self.rolloff_width, plateau_width=self.plateau_width, **extra)
        if self.profile == "tabulated":
            return TabulatedProfile.from_csv(self.ldos_csv, self.ldos_unit, **extra)
        return HomogeneousProfile()

    def emitter(self) -> EmitterConfig:
        return EmitterConfig.around(self.omega0, self.gamma_hom, self.half_width,
                                    gamma_side=self.gamma_side, omega_weighted=self.omega_weighted)


class DecayParams(EmitterBlock):
    t_max: float = quantity(10.0, "ns", gt=0)
    dt: float = quantity(0.005, "ns", gt=0)
    tau_max: Optional[float] = quantity(None, "ns", gt=0, description="Kernel memory; t_max if unset")
    extrapolate: bool = False


class SpectrumParams(EmitterBlock):
    n_points: int = Field(2001, ge=3)
    span: Optional[float] = quantity(None, "rad/ns", gt=0, description="Grid half width; half_width if unset")
    normalization: Normalization = "peak"

    @model_validator(mode="after")
    def _span_in_band(self):
        if self.span is not None and self.span > self.half_width:
            raise ValueError("span must not exceed half_width")
        return self

    def grid(self) -> FrequencyGrid:
        span = self.span or self.half_width
        return FrequencyGrid.uniform(self.omega0 - span, self.omega0 + span, self.n_points)


class LambParams(SpectrumParams):
    pass


class LdosParams(SpectrumParams):
    pass


class PurcellParams(ParamsBlock):
    geometry: Literal["cavity", "waveguide"] = "cavity"
    wavelength: float = quantity(950.0, "nm", gt=0)
    n: float = Field(3.5, gt=0)
    q: float = Field(1.0e4, gt=0)
    v_eff: float = Field(1.0, gt=0, description="Mode volume in (lambda/n)^3")
    n_g: float = Field(50.0, ge=1)
    v_eff_per_cell: float = Field(1.0 / 3.0, gt=0)
    f_r: float = Field(1.0, ge=0, le=1)
    alignment: float = Field(1.0, ge=0, le=1)

    def cavity(self) -> CavityParams:
        return CavityParams(omega_c=DEFAULT_UNITS.wavelength_to_omega(self.wavelength), q=self.q,
                            v_eff=self.v_eff, n=self.n, f_r=self.f_r, alignment=self.alignment)

    def waveguide(self) -> WaveguideModeParams:
        return WaveguideModeParams(n=self.n, n_g=self.n_g, v_eff_per_cell=self.v_eff_per_cell,
                                   f_r=self.f_r, alignment=self.alignment)


class DriveBlock(ParamsBlock):
    omega_p: float = quantity(1.0, "rad/ns", ge=0, description="Drive amplitude")
    gamma: float = quantity(1.0, "1/ns", ge=0)
    gamma_dp: float = quantity(0.0, "1/ns", ge=0)

    def drive(self) -> DriveParams:
        return DriveParams(omega_p=self.omega_p, gamma=self.gamma, gamma_dp=self.gamma_dp)


class MollowParams(DriveBlock):
    n_points: int = Field(4001, ge=3)
    span: Optional[float] = quantity(None, "rad/ns", gt=0)
    normalization: Normalization = "raw"

    def grid(self) -> FrequencyGrid:
        span = self.span or 4.0 * self.omega_p + 10.0 * (self.gamma + self.gamma_dp)
        return FrequencyGrid.uniform(-span, span, self.n_points)


class G2Params(DriveBlock):
    tau_max: float = quantity(10.0, "ns", gt=0)
    n_points: int = Field(1001, ge=2)


class JcBlock(ParamsBlock):
    """Cavity QED parameters: a preset, (g, kappa) directly, or (q, fp_res) of a Lorentzian LDOS"""
    preset: Optional[Literal["micropillar", "pc_cavity", "nanobeam", "microdisk"]] = None
    g: Optional[float] = quantity(None, "rad/ns", ge=0)
    kappa: Optional[float] = quantity(None, "1/ns", ge=0)
    q: Optional[float] = Field(None, gt=0)
    fp_res: Optional[float] = Field(None, ge=0)
    wavelength: float = quantity(950.0, "nm", gt=0)
    gamma_hom: float = quantity(1.0, "1/ns", gt=0)
    gamma_ng: Optional[float] = quantity(None, "1/ns", ge=0, description="gamma_hom for (q, fp_res), else 0")
    gamma_dp: float = quantity(0.0, "1/ns", ge=0)
    delta: float = quantity(0.0, "rad/ns", description="w0 - w_c")

    @model_validator(mode="after")
    def _one_source(self):
        sources = [self.preset is not None, self.g is not None or self.kappa is not None,
                   self.q is not None or self.fp_res is not None]
        if sum(sources) != 1:
            raise ValueError("give exactly one of: preset, (g, kappa), (q, fp_res)")
        if sources[1] and (self.g is None or self.kappa is None):
            raise ValueError("g and kappa must be given together")
        if sources[2] and (self.q is None or self.fp_res is None):
            raise ValueError("q and fp_res must be given together")
        return self

    def jc_params(self) -> JcParams:
        if self.preset is not None:
            base = cavity_preset(self.preset)
            return base.model_copy(update={"gamma_dp": self.gamma_dp, "delta": self.delta,
                                           **({} if self.gamma_ng is None else {"gamma_ng": self.gamma_ng})})
        if self.g is not None:
            return JcParams(g=self.g, kappa=self.kappa, gamma_ng=self.gamma_ng or 0.0,
                            gamma_dp=self.gamma_dp, delta=self.delta)
        kappa = DEFAULT_UNITS.wavelength_to_omega(self.wavelength) / self.q
        gamma_ng = self.gamma_hom if self.gamma_ng is None else self.gamma_ng
        return JcParams(g=math.sqrt(self.fp_res * self.gamma_hom * kappa / 4.0), kappa=kappa,
                        gamma_ng=gamma_ng, gamma_dp=self.gamma_dp, delta=self.delta)


class JcEvolveParams(JcBlock):
    t_max: float = quantity(1.0, "ns", gt=0)
    dt: Optional[float] = quantity(None, "ns", gt=0, description="0.02 / max rate if unset")
    method: Literal["rk4", "expm"] = "rk4"
    initial: Literal["emitter", "cavity"] = "emitter"

    def initial_state(self) -> JcState:
        return JcState() if self.initial == "emitter" else JcState(rho11=0.0, rho22=1.0)


class JcSpectraParams(JcBlock):
    n_points: int = Field(4001, ge=3)
    span: Optional[float] = quantity(None, "rad/ns", gt=0)
    normalization: Normalization = "peak"
    method: Literal["trajectory", "resolvent"] = "trajectory"

    def grid(self, p: JcParams) -> Optional[FrequencyGrid]:
        if self.span is None:
            return None
        width = max(0.5 * (p.kappa + p.gamma_ng) + p.gamma_dp, 1e-9)
        return FrequencyGrid.dense_near(0.0, width, self.span, self.n_points)


class PhononBlock(ParamsBlock):
    d_e: float = quantity(config.GAAS_D_E, "eV")
    d_g: float = quantity(config.GAAS_D_G, "eV")
    c_s: float = quantity(config.GAAS_SOUND_SPEED, "m/s", gt=0)
    d_m: float = quantity(config.GAAS_MASS_DENSITY, "kg/m3", gt=0)
    sigma_e: float = quantity(config.QD_SIGMA, "nm", gt=0)
    sigma_g: float = quantity(config.QD_SIGMA, "nm", gt=0)
    temperature: float = quantity(0.0, "K", ge=0)

    def phonons(self) -> PhononParams:
        return PhononParams(d_e=self.d_e, d_g=self.d_g, c_s=self.c_s, d_m=self.d_m,
                            sigma_e=self.sigma_e, sigma_g=self.sigma_g, temperature=self.temperature)


class PhononRateParams(PhononBlock):
    g: float = quantity(..., "rad/ns", ge=0)
    kappa: float = quantity(..., "1/ns", ge=0)
    gamma_ng: float = quantity(1.0, "1/ns", ge=0)
    delta_min: float = quantity(DEFAULT_UNITS.energy_to_omega(-2e-3), "rad/ns")
    delta_max: float = quantity(DEFAULT_UNITS.energy_to_omega(2e-3), "rad/ns")
    n_points: int = Field(401, ge=2)

    @model_validator(mode="after")
    def _ordered(self):
        if self.delta_max <= self.delta_min:
            raise ValueError("delta_max must exceed delta_min")
        return self

    def jc_params(self) -> JcParams:
        return JcParams(g=self.g, kappa=self.kappa, gamma_ng=self.gamma_ng)

    def detunings(self) -> np.ndarray:
        return np.linspace(self.delta_min, self.delta_max, self.n_points)


class IbmParams(PhononBlock):
    gamma_tot: float = quantity(1.0, "1/ns", gt=0)
    span: float = quantity(DEFAULT_UNITS.energy_to_omega(12e-3), "rad/ns", gt=0)
    n_points: int = Field(4001, ge=3)
    normalization: Normalization = "peak"

    def grid(self) -> FrequencyGrid:
        return FrequencyGrid.dense_near(0.0, self.gamma_tot, self.span, self.n_points)


class ScatterBlock(ParamsBlock):
    beta: float = Field(..., ge=0, le=1)
    gamma: float = quantity(1.0, "1/ns", gt=0)
    gamma_dp: float = quantity(0.0, "1/ns", ge=0)
    delta: float = quantity(0.0, "rad/ns")


class G2TransmittedParams(ScatterBlock):
    tau_max: float = quantity(10.0, "ns", gt=0)
    n_points: int = Field(1001, ge=2)


class DipolePairParams(ParamsBlock):
    gamma: float = quantity(1.0, "1/ns", ge=0)
    coupling_magnitude: float = quantity(1.0, "1/ns", ge=0)
    k: float = Field(..., gt=0, description="Propagation constant in rad/nm")
    r_ab: float = quantity(0.0, "nm", ge=0)
    phi: float = quantity(0.0, "rad")
    l_ext: float = quantity(math.inf, "nm", gt=0)
    r_max: Optional[float] = quantity(None, "nm", gt=0, description="Range of the gamma_AB(r) curve; 10 wavelengths if unset")
    n_points: int = Field(1001, ge=2)


class FitBiexpParams(ParamsBlock):
    curve_csv: str
    rho_b0: float = Field(0.5, ge=0, le=1)
    rho_d0: float = Field(0.5, ge=0, le=1)
    gamma_rad: Optional[float] = quantity(None, "1/ns", gt=0,
                                          description="Initial guess; peeled from the curve when unset")
    gamma_nrad: float = quantity(0.1, "1/ns", ge=0, description="Initial guess, used with gamma_rad")
    gamma_db: float = quantity(0.1, "1/ns", ge=0, description="Initial guess, used with gamma_rad")


class EfficiencyParams(ParamsBlock):
    eta_gen: float = Field(1.0, ge=0, le=1)
    beta: float = Field(1.0, ge=0, le=1)
    eta_det: float = Field(1.0, ge=0, le=1)
    detected_rate: Optional[float] = quantity(None, "MHz", ge=0)
    repetition_rate: Optional[float] = quantity(None, "MHz", gt=0)


PARAMS_BY_KIND: Dict[str, Type[ParamsBlock]] = {
    "decay": DecayParams,
    "spectrum": SpectrumParams,
    "lamb": LambParams,
    "ldos": LdosParams,
    "purcell": PurcellParams,
    "mollow": MollowParams,
    "g2": G2Params,
    "jc-evolve": JcEvolveParams,
    "jc-spectra": JcSpectraParams,
    "phonon-rate": PhononRateParams,
    "ibm-spectrum": IbmParams,
    "scatter": ScatterBlock,
    "g2-transmitted": G2TransmittedParams,
    "dipole-pair": DipolePairParams,
    "fit-biexp": FitBiexpParams,
    "efficiency": EfficiencyParams,
}

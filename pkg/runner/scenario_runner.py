# runner/scenario_runner.py - Execute scenarios and write result CSVs
import os
import time
import math
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError

import config
from physics import cavity_jc, emitter_dynamics, ldos, phonons, quantum_dot, resonance_fluorescence, waveguide
from physics.spectrum import fit_doublet, peak_splitting
from runner import scenario_params as sp
from runner.plotting import plot
from runner.scenario_config import ScenarioConfig
from utils.data_loader import write_csv_atomic
from utils.errors import ConfigError, FitError, PlotError, QednpError

logger = logging.getLogger(__name__)


class PointResult(BaseModel):
    """Outcome of one scenario point"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    table: Optional[pd.DataFrame] = None
    scalars: Dict[str, Any] = Field(default_factory=dict)
    warnings: List[str] = Field(default_factory=list)
    header: List[str] = Field(default_factory=list, description="Extra comment lines for the point CSV")


class OutputFile(BaseModel):
    path: str
    rows: int


class PointFailure(BaseModel):
    index: int
    value: Optional[float] = None
    error: str


class RunReport(BaseModel):
    """Files, warnings and failed points of one run"""
    scenario_id: str
    kind: str
    wall_time: float = Field(..., description="Seconds")
    outputs: List[OutputFile] = Field(default_factory=list)
    plots: List[str] = Field(default_factory=list)
    warnings: List[str] = Field(default_factory=list)
    failures: List[PointFailure] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def exit_code(self) -> int:
        return 0 if self.ok else 4

    def summary_lines(self) -> List[str]:
        lines = [f"Scenario '{self.scenario_id}' ({self.kind}) finished in {self.wall_time:.2f} s"]
        lines += [f"  wrote {f.path} ({f.rows} rows)" for f in self.outputs]
        lines += [f"  plot {p}" for p in self.plots]
        lines += [f"  warning: {w}" for w in self.warnings]
        lines += [f"  FAILED point {f.index} ({f.value}): {f.error}" for f in self.failures]
        return lines


def _run_decay(p: sp.DecayParams) -> PointResult:
    profile, cfg = p.ldos_profile(), p.emitter()
    kernel_dt = 0.5 * p.dt if p.extrapolate else p.dt
    kernel = emitter_dynamics.build_kernel(profile, cfg, kernel_dt, p.tau_max or p.t_max)
    trajectory = emitter_dynamics.solve_volterra(kernel, cfg, p.t_max, p.dt, extrapolate=p.extrapolate)
    table = trajectory.to_frame()
    table["markov"] = emitter_dynamics.markov_decay(profile, cfg, trajectory.t)
    warnings = ["LDOS band narrower than 10 emitter linewidths"] if kernel.band_warning else []
    return PointResult(table=table, warnings=warnings, scalars={
        "ww_rate": emitter_dynamics.ww_rate(profile, cfg),
        "total_rate": emitter_dynamics.total_rate(profile, cfg),
        "final_population": float(trajectory.population[-1]),
        "emitted": float(trajectory.flux[-1]),
    })


def _run_spectrum(p: sp.SpectrumParams) -> PointResult:
    profile, cfg = p.ldos_profile(), p.emitter()
    spectrum = emitter_dynamics.emission_spectrum(profile, cfg, p.grid(), p.normalization)
    table = spectrum.to_frame(reference=p.omega0)
    peak = spectrum.omega[int(np.argmax(spectrum.density))]
    splitting = peak_splitting(spectrum)
    return PointResult(table=table, scalars={
        "peak_offset": float(peak - p.omega0),
        "n_peaks": int(spectrum.peaks().size),
        "splitting": math.nan if splitting is None else splitting,
    })


def _run_lamb(p: sp.LambParams) -> PointResult:
    profile, cfg = p.ldos_profile(), p.emitter()
    table = emitter_dynamics.lamb_shift_frame(profile, cfg, p.grid())
    return PointResult(table=table, scalars={"lamb_shift_at_omega0": emitter_dynamics.lamb_shift(profile, cfg, p.omega0)})


def _run_ldos(p: sp.LdosParams) -> PointResult:
    profile = p.ldos_profile()
    table = ldos.purcell_frame(profile, p.grid().points, p.omega0)
    return PointResult(table=table, scalars={"purcell_at_omega0": ldos.evaluate_purcell(profile, p.omega0)})


def _run_purcell(p: sp.PurcellParams) -> PointResult:
    if p.geometry == "cavity":
        cavity = p.cavity()
        return PointResult(scalars={"fp_max": ldos.cavity_fp_max(cavity), "fp": ldos.cavity_fp_res(cavity)})
    mode = p.waveguide()
    return PointResult(scalars={"fp_max": ldos.waveguide_fp_max(mode, p.wavelength),
                                "fp": ldos.waveguide_fp(mode, p.wavelength)})


def _run_mollow(p: sp.MollowParams) -> PointResult:
    drive = p.drive()
    result = resonance_fluorescence.mollow_spectrum(drive, p.grid(), p.normalization)
    sidebands = resonance_fluorescence.sideband_positions(result.incoherent)
    levels = resonance_fluorescence.intensities(drive)
    return PointResult(table=result.to_frame(), header=[f"coherent_weight = {result.coherent_weight!r}"], scalars={
        "coherent": levels.coherent,
        "incoherent": levels.incoherent,
        "n_s": resonance_fluorescence.steady_state_population(drive),
        "coherent_weight": result.coherent_weight,
        "sideband_lower": math.nan if sidebands is None else sidebands[0],
        "sideband_upper": math.nan if sidebands is None else sidebands[1],
    })


def _run_g2(p: sp.G2Params) -> PointResult:
    tau = np.linspace(0.0, p.tau_max, p.n_points)
    values = resonance_fluorescence.g2(p.drive(), tau)
    return PointResult(table=pd.DataFrame({"tau_ns": tau, "g2": values}), scalars={"g2_0": float(values[0])})


def _jc_scalars(p: cavity_jc.JcParams) -> Dict[str, Any]:
    try:
        weak_rate = cavity_jc.weak_coupling_rate(p)
    except QednpError:
        weak_rate = math.nan
    return {"g": p.g, "kappa": p.kappa, "gamma_ng": p.gamma_ng, "regime": cavity_jc.classify_regime(p),
            "rabi_splitting": cavity_jc.rabi_splitting(p), "weak_coupling_rate": weak_rate}


def _run_jc_evolve(p: sp.JcEvolveParams) -> PointResult:
    jc = p.jc_params()
    dt = p.dt or 0.02 / max(jc.max_rate, 1e-12)
    trajectory = cavity_jc.evolve(jc, p.initial_state(), p.t_max, dt, method=p.method)
    table = trajectory.to_frame()
    if jc.delta == 0 and jc.gamma_dp == 0 and p.initial == "emitter":
        table["rho11_analytic"] = cavity_jc.analytic_rho11(jc, trajectory.t)
    return PointResult(table=table, scalars=_jc_scalars(jc))


def _run_jc_spectra(p: sp.JcSpectraParams) -> PointResult:
    jc = p.jc_params()
    spectra = cavity_jc.jc_spectra(jc, p.grid(jc), normalization=p.normalization, method=p.method)
    scalars, warnings = _jc_scalars(jc), []
    for name, spectrum in (("emitter", spectra.emitter), ("cavity", spectra.cavity)):
        splitting = peak_splitting(spectrum)
        scalars[f"{name}_peaks"] = int(spectrum.peaks().size)
        scalars[f"{name}_splitting"] = math.nan if splitting is None else splitting
        scalars[f"{name}_pole_splitting"] = math.nan
        if splitting is not None:
            try:
                scalars[f"{name}_pole_splitting"] = fit_doublet(spectrum).splitting
            except FitError as e:
                warnings.append(f"{name} doublet fit: {e}")
    return PointResult(table=spectra.to_frame(), scalars=scalars, warnings=warnings)


def _run_phonon_rate(p: sp.PhononRateParams) -> PointResult:
    jc = p.jc_params()
    table = phonons.phonon_purcell_curve(p.phonons(), jc, p.detunings())
    invalid = int((~table["valid"]).sum())
    warnings = [f"{invalid} detuning(s) outside the |Delta| >> g validity range"] if invalid else []
    return PointResult(table=table, warnings=warnings, scalars={
        "max_rate": float(table["rate"].max()),
        "invalid_points": invalid,
    })


def _run_ibm(p: sp.IbmParams) -> PointResult:
    result = phonons.ibm_spectrum(p.phonons(), p.gamma_tot, p.grid(), p.normalization)
    return PointResult(table=result.to_frame(), scalars={"sideband_fraction": result.sideband_fraction,
                                                         "zpl_weight": result.zpl_weight, "raw_area": result.raw_area})


def _scatter_params(p: sp.ScatterBlock) -> waveguide.ScatterParams:
    return waveguide.ScatterParams(beta=p.beta, gamma=p.gamma, gamma_dp=p.gamma_dp, delta=p.delta)


def _run_scatter(p: sp.ScatterBlock) -> PointResult:
    sc = _scatter_params(p)
    result = waveguide.transmission_reflection(sc)
    scalars = {"T": result.transmission, "R": result.reflection, "loss": result.loss}
    if sc.gamma_dp == 0 and sc.delta == 0 and sc.beta < 1:
        scalars["g2_0"] = waveguide.g2_transmitted(sc, 0.0)
    return PointResult(scalars=scalars)


def _run_g2_transmitted(p: sp.G2TransmittedParams) -> PointResult:
    tau = np.linspace(0.0, p.tau_max, p.n_points)
    values = waveguide.g2_transmitted(_scatter_params(p), tau)
    return PointResult(table=pd.DataFrame({"tau_ns": tau, "g2": values}), scalars={"g2_0": float(values[0])})


def _run_dipole_pair(p: sp.DipolePairParams) -> PointResult:
    pair = waveguide.DipolePair(gamma=p.gamma, coupling_magnitude=p.coupling_magnitude, k=p.k, r_ab=p.r_ab, phi=p.phi)
    rates = waveguide.dipole_dipole_rate(pair)
    r_max = p.r_max or 10.0 * 2.0 * math.pi / p.k
    r = np.linspace(0.0, r_max, p.n_points)
    table = pd.DataFrame({"r_nm": r,
                          "gamma_ab": waveguide.damped_dipole_range(pair, math.inf, r),
                          "gamma_ab_damped": waveguide.damped_dipole_range(pair, p.l_ext, r)})
    return PointResult(table=table, scalars={
        "gamma_ab": rates.gamma_ab, "gamma_plus": rates.gamma_plus, "gamma_minus": rates.gamma_minus,
        "gamma_ab_damped": waveguide.damped_dipole_range(pair, p.l_ext),
    })


def _run_fit_biexp(p: sp.FitBiexpParams) -> PointResult:
    curve = quantum_dot.DecayCurve.from_csv(p.curve_csv)
    init = None
    if p.gamma_rad is not None:
        init = quantum_dot.ExcitonRates(gamma_rad=p.gamma_rad, gamma_nrad=p.gamma_nrad, gamma_db=p.gamma_db)
    return _fit_result(curve, init, p.rho_b0, p.rho_d0)


def _fit_result(curve: quantum_dot.DecayCurve, init: Optional[quantum_dot.ExcitonRates], rho_b0: float,
                rho_d0: float) -> PointResult:
    fit = quantum_dot.fit_biexp(curve, init, rho_b0, rho_d0)
    table = curve.to_frame()
    table["model"] = fit.scale * quantum_dot.biexp_decay(fit.rates, rho_b0, rho_d0, curve.t)
    biexp = quantum_dot.biexp_rates(fit.rates, rho_b0, rho_d0)
    scalars = dict(fit.estimates)
    scalars.update({f"{k}_stderr": v for k, v in fit.stderr.items()})
    scalars.update({"gamma_fast": biexp.gamma_fast, "gamma_slow": biexp.gamma_slow, "cost": fit.cost})
    warnings = [f"{k} at its bound" for k, flagged in fit.at_bound.items() if flagged]
    return PointResult(table=table, scalars=scalars, warnings=warnings)


def _run_efficiency(p: sp.EfficiencyParams) -> PointResult:
    budget = waveguide.EfficiencyBudget(eta_gen=p.eta_gen, beta=p.beta, eta_det=p.eta_det)
    scalars = {"eta_tot": waveguide.total_efficiency(budget)}
    if p.detected_rate is not None and p.repetition_rate is not None:
        scalars["measured"] = waveguide.measured_efficiency(p.detected_rate, p.repetition_rate)
    return PointResult(scalars=scalars)


DISPATCH: Dict[str, Callable[[Any], PointResult]] = {
    "decay": _run_decay,
    "spectrum": _run_spectrum,
    "lamb": _run_lamb,
    "ldos": _run_ldos,
    "purcell": _run_purcell,
    "mollow": _run_mollow,
    "g2": _run_g2,
    "jc-evolve": _run_jc_evolve,
    "jc-spectra": _run_jc_spectra,
    "phonon-rate": _run_phonon_rate,
    "ibm-spectrum": _run_ibm,
    "scatter": _run_scatter,
    "g2-transmitted": _run_g2_transmitted,
    "dipole-pair": _run_dipole_pair,
    "fit-biexp": _run_fit_biexp,
    "efficiency": _run_efficiency,
}


def execute_point(kind: str, params: sp.ParamsBlock) -> PointResult:
    """Run one parameter point; top level so worker processes can pickle it"""
    return DISPATCH[kind](params)


def _describe(e: Exception) -> str:
    return f"{type(e).__name__}: {e}"


def _write_point(cfg: ScenarioConfig, out_dir: str, index: int, value: Optional[float],
                 result: PointResult) -> OutputFile:
    path = os.path.join(out_dir, f"{cfg.prefix}_{index}.csv")
    header = [f"qednp scenario {cfg.id} ({cfg.kind}) point {index}"]
    if cfg.sweep is not None:
        header.append(f"{cfg.sweep.param} = {value!r}")
    header += result.header
    rows = write_csv_atomic(result.table, path, header)
    return OutputFile(path=path, rows=rows)


def _summary_frame(cfg: ScenarioConfig, rows: List[Dict[str, Any]]) -> pd.DataFrame:
    df = pd.DataFrame(rows)
    if df.empty:
        columns = ["index"] + ([cfg.sweep.param] if cfg.sweep is not None else [])
        df = pd.DataFrame(columns=columns)
    return df


def run(cfg: ScenarioConfig, out_dir: Optional[str] = None, jobs: int = 1, make_plots: bool = False) -> RunReport:
    """
    Execute a scenario: every sweep point independently, results written atomically

    Args:
        cfg: Validated scenario
        out_dir: Output directory (cfg.output.dir, then config.OUTPUT_DIR by default)
        jobs: Worker processes for sweeps
        make_plots: Render a plot per CSV (also enabled by cfg.output.plot)

    Returns:
        RunReport
    """
    started = time.perf_counter()
    out_dir = out_dir or cfg.output.dir or config.OUTPUT_DIR
    os.makedirs(out_dir, exist_ok=True)
    plan = cfg.plan()
    logger.info(f"Running scenario '{cfg.id}' ({cfg.kind}): {len(plan)} point(s), {jobs} job(s)")

    outcomes: Dict[int, Any] = {}
    if jobs > 1 and len(plan) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {index: pool.submit(execute_point, cfg.kind, params) for index, _, params in plan}
            for index, future in futures.items():
                try:
                    outcomes[index] = future.result()
                except (QednpError, ValidationError) as e:
                    outcomes[index] = e
    else:
        for index, _, params in plan:
            try:
                outcomes[index] = execute_point(cfg.kind, params)
            except (QednpError, ValidationError) as e:
                outcomes[index] = e

    if cfg.sweep is None and isinstance(outcomes[0], Exception):
        e = outcomes[0]
        if isinstance(e, ValidationError):
            raise ConfigError(f"scenario '{cfg.id}': {e}") from e
        raise type(e)(f"scenario '{cfg.id}': {e}") from e

    report = RunReport(scenario_id=cfg.id, kind=cfg.kind, wall_time=0.0)
    summary_rows = []
    for index, value, _ in plan:
        outcome = outcomes[index]
        if isinstance(outcome, Exception):
            logger.error(f"Scenario '{cfg.id}' point {index} failed: {_describe(outcome)}")
            report.failures.append(PointFailure(index=index, value=value, error=_describe(outcome)))
            continue
        report.warnings.extend(f"point {index}: {w}" for w in outcome.warnings)
        if outcome.table is not None:
            report.outputs.append(_write_point(cfg, out_dir, index, value, outcome))
        row = {"index": index}
        if cfg.sweep is not None:
            row[cfg.sweep.param] = value
        row.update(outcome.scalars)
        summary_rows.append(row)

    summary_path = os.path.join(out_dir, f"{cfg.prefix}_summary.csv")
    rows = write_csv_atomic(_summary_frame(cfg, summary_rows), summary_path,
                            [f"qednp scenario {cfg.id} ({cfg.kind}) summary"])
    report.outputs.append(OutputFile(path=summary_path, rows=rows))

    if make_plots or cfg.output.plot:
        targets = report.outputs if cfg.sweep is not None else report.outputs[:-1]
        for output in targets:
            try:
                report.plots.append(plot(output.path, logy=cfg.output.logy))
            except PlotError as e:
                report.warnings.append(f"plot skipped for {output.path}: {e}")

    report.wall_time = time.perf_counter() - started
    for warning in report.warnings:
        logger.warning(warning)
    logger.info(f"Scenario '{cfg.id}' done in {report.wall_time:.2f} s, {len(report.failures)} failed point(s)")
    return report


def fit_curve(csv_path: str, out_dir: Optional[str] = None, rho_b0: float = 0.5, rho_d0: float = 0.5,
              init: Optional[quantum_dot.ExcitonRates] = None) -> RunReport:
    """
    Bi-exponential fit of a decay-curve CSV (the `qednp fit` command)

    Writes <stem>_fit.csv (curve and model) and <stem>_fit_summary.csv (estimates).
    """
    started = time.perf_counter()
    out_dir = out_dir or config.OUTPUT_DIR
    stem = os.path.splitext(os.path.basename(csv_path))[0]
    curve = quantum_dot.DecayCurve.from_csv(csv_path)
    result = _fit_result(curve, init, rho_b0, rho_d0)
    report = RunReport(scenario_id=f"{stem}_fit", kind="fit-biexp", wall_time=0.0, warnings=result.warnings)
    path = os.path.join(out_dir, f"{stem}_fit.csv")
    report.outputs.append(OutputFile(path=path, rows=write_csv_atomic(result.table, path, [f"fit of {csv_path}"])))
    summary = os.path.join(out_dir, f"{stem}_fit_summary.csv")
    rows = write_csv_atomic(pd.DataFrame([result.scalars]), summary, [f"fit of {csv_path}"])
    report.outputs.append(OutputFile(path=summary, rows=rows))
    report.wall_time = time.perf_counter() - started
    return report

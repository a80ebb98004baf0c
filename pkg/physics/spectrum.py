# physics/spectrum.py - Spectrum container shared by all spectral calculations
import logging
from typing import Literal, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy import integrate, optimize
from scipy.signal import find_peaks, peak_widths

import config
from utils.errors import FitError
from utils.units import FrequencyGrid

logger = logging.getLogger(__name__)

Normalization = Literal["peak", "area", "raw"]


class Spectrum(BaseModel):
    """Non-negative spectral density on a frequency grid"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    grid: FrequencyGrid
    density: np.ndarray = Field(..., description="Spectral density, >= 0")
    normalization: Normalization = "peak"

    @field_validator("density", mode="before")
    @classmethod
    def _non_negative(cls, value):
        density = np.array(value, dtype=float)
        # round-off of closed forms can dip a hair below zero
        density[(density < 0) & (density > -1e-12 * max(np.max(np.abs(density)), 1e-300))] = 0.0
        if np.any(density < 0):
            raise ValueError("spectral density must be non-negative")
        density.setflags(write=False)
        return density

    @property
    def omega(self) -> np.ndarray:
        return self.grid.points

    def area(self) -> float:
        return float(integrate.trapezoid(self.density, self.omega))

    def peaks(self, prominence: float = 1e-3) -> np.ndarray:
        """Frequencies of the local maxima, prominence relative to the maximum"""
        top = float(np.max(self.density)) if self.density.size else 0.0
        if top <= 0:
            return np.array([])
        idx, _ = find_peaks(self.density, prominence=prominence * top)
        return self.omega[idx]

    def to_frame(self, column: str = "density", reference: Optional[float] = None) -> pd.DataFrame:
        """Columns omega, offset from reference (when given) and the density"""
        frame = pd.DataFrame({"omega": self.omega, column: self.density})
        if reference is not None:
            frame.insert(1, "offset", self.omega - reference)
        return frame


def normalize(grid: FrequencyGrid, density: np.ndarray, mode: Normalization = "peak") -> Spectrum:
    """
    Build a Spectrum with the requested normalization. An identically zero
    density is returned unscaled.

    Args:
        grid: Frequency grid
        density: Raw density
        mode: 'peak', 'area' or 'raw'
    """
    density = np.asarray(density, dtype=float)
    if mode == "peak":
        scale = float(np.max(density)) if density.size else 0.0
    elif mode == "area":
        scale = float(integrate.trapezoid(density, grid.points))
    elif mode == "raw":
        scale = 1.0
    else:
        raise ValueError(f"Unknown normalization '{mode}'")
    if scale > 0:
        density = density / scale
    return Spectrum(grid=grid, density=density, normalization=mode)


def peak_splitting(spectrum: Spectrum) -> Optional[float]:
    """Distance between the two outermost peaks, None for a single-peaked spectrum"""
    peaks = spectrum.peaks()
    if peaks.size < 2:
        return None
    return float(peaks[-1] - peaks[0])


class DoubletFit(BaseModel):
    """Two complex Lorentzian poles fitted to a double-peaked spectrum"""
    model_config = ConfigDict(frozen=True)

    centers: Tuple[float, float] = Field(..., description="Pole frequencies, ascending")
    widths: Tuple[float, float] = Field(..., description="Pole half widths at half maximum")
    rms: float = Field(..., ge=0, description="Root-mean-square residual relative to the peak density")

    @property
    def splitting(self) -> float:
        return self.centers[1] - self.centers[0]


def _pole_basis(omega: np.ndarray, centers: np.ndarray, widths: np.ndarray) -> np.ndarray:
    poles = 1.0 / (widths[None, :] - 1j * (omega[:, None] - centers[None, :]))
    return np.hstack([poles.real, -poles.imag])


def fit_doublet(spectrum: Spectrum) -> DoubletFit:
    """
    Fit S(w) = Re sum_k c_k / (G_k - i (w - w_k)) with complex c_k

    A spectrum generated by a two-level resolvent has exactly this form, so
    the fitted w_k are the polariton frequencies even where the two lines
    overlap and their maxima are shifted. The residues are solved
    linearly at every step and only (w_k, G_k) are iterated.

    Args:
        spectrum: Double-peaked spectrum

    Returns:
        DoubletFit

    Raises:
        FitError: fewer than two peaks or no convergence
    """
    peaks = spectrum.peaks()
    if peaks.size < 2:
        raise FitError(f"A doublet fit needs two peaks, found {peaks.size}")
    omega, density = spectrum.omega, spectrum.density
    top = float(np.max(density))
    idx = np.searchsorted(omega, [peaks[0], peaks[-1]])
    _, _, left, right = peak_widths(density, idx, rel_height=0.5)
    positions = np.arange(omega.size, dtype=float)
    half = 0.5 * (np.interp(right, positions, omega) - np.interp(left, positions, omega))
    half = np.maximum(half, 1e-9 * max(abs(peaks[-1] - peaks[0]), 1e-300))

    def residuals(x):
        basis = _pole_basis(omega, x[:2], np.exp(x[2:]))
        coef = np.linalg.lstsq(basis, density, rcond=None)[0]
        return (basis @ coef - density) / top

    start = np.concatenate([peaks[[0, -1]], np.log(half)])
    fit = optimize.least_squares(residuals, start, x_scale=np.concatenate([half, [1.0, 1.0]]),
                                 xtol=1e-14, ftol=1e-14, gtol=1e-14, max_nfev=config.FIT_MAX_NFEV)
    rms = float(np.sqrt(np.mean(fit.fun ** 2)))
    if not fit.success:
        raise FitError(f"Doublet fit did not converge: {fit.message}", residual=rms)
    order = np.argsort(fit.x[:2])
    centers, widths = fit.x[:2][order], np.exp(fit.x[2:])[order]
    logger.debug(f"Doublet poles at {centers[0]:.6g}, {centers[1]:.6g} rad/ns, rms {rms:.3g}")
    return DoubletFit(centers=(float(centers[0]), float(centers[1])),
                      widths=(float(widths[0]), float(widths[1])), rms=rms)

# utils/units.py - Physical constants, unit conversion and frequency grids
"""
Internal unit system: hbar = 1, angular frequencies in rad/ns, rates in 1/ns,
lengths in nm, times in ns. Everything user-facing (scenario files, CSV
inputs) is converted at the boundary with `convert` or `parse_quantity`.

Energy-like units are all mapped onto rad/ns:

    1 ueV   -> 1e-6 eV / hbar[eV ns]
    1 GHz   -> 2 pi rad/ns   (the number is a cyclic frequency, omega / 2 pi)
    1 K     -> k_B * 1 K / hbar
    950 nm  -> 2 pi c / 950 nm   (vacuum wavelength, not a linear map)
"""
import re
import logging
from typing import Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy import constants as sc

from utils.errors import UnitError, DomainError

logger = logging.getLogger(__name__)


class UnitContext(BaseModel):
    """CODATA constants in the internal unit system"""
    model_config = ConfigDict(frozen=True)

    hbar: float = Field(sc.hbar / sc.e * 1e9, description="Reduced Planck constant in eV*ns")
    k_B: float = Field(sc.k / sc.e, description="Boltzmann constant in eV/K")
    c: float = Field(sc.c, description="Speed of light in nm/ns (numerically equal to m/s)")
    eps0: float = Field(sc.epsilon_0, description="Vacuum permittivity in F/m")
    m0: float = Field(sc.m_e, description="Free electron mass in kg")
    q: float = Field(sc.e, description="Elementary charge in C")

    @property
    def ueV_to_rad_ns(self) -> float:
        return 1e-6 / self.hbar

    @property
    def kelvin_to_ueV(self) -> float:
        return self.k_B * 1e6

    def energy_to_omega(self, energy_ev: float) -> float:
        """Energy in eV to angular frequency in rad/ns"""
        return energy_ev / self.hbar

    def omega_to_energy(self, omega: float) -> float:
        """Angular frequency in rad/ns to energy in eV"""
        return omega * self.hbar

    def wavelength_to_omega(self, wavelength_nm: float) -> float:
        """Vacuum wavelength in nm to angular frequency in rad/ns"""
        if wavelength_nm <= 0:
            raise DomainError(f"Wavelength must be positive, got {wavelength_nm} nm")
        return 2.0 * np.pi * self.c / wavelength_nm

    def omega_to_wavelength(self, omega: float) -> float:
        """Angular frequency in rad/ns to vacuum wavelength in nm"""
        if omega <= 0:
            raise DomainError(f"Optical frequency must be positive, got {omega} rad/ns")
        return 2.0 * np.pi * self.c / omega


DEFAULT_UNITS = UnitContext()

# Canonical unit names; aliases are folded onto these
_ALIASES = {
    "µeV": "ueV", "μeV": "ueV", "ueV": "ueV",
    "meV": "meV", "eV": "eV",
    "rad/ns": "rad/ns",
    "ns^-1": "1/ns", "ns⁻¹": "1/ns", "1/ns": "1/ns", "/ns": "1/ns", "ns-1": "1/ns",
    "GHz": "GHz", "GHz_x2pi": "GHz", "MHz": "MHz", "THz": "THz",
    "K": "K",
    "nm": "nm", "um": "um", "µm": "um", "μm": "um", "m": "m",
    "ns": "ns", "ps": "ps", "fs": "fs",
    "m/s": "m/s", "nm/ns": "m/s",
    "kg/m3": "kg/m3", "kg/m^3": "kg/m3",
    "rad": "rad",
}


def _linear_factors(ctx: UnitContext) -> Dict[str, Tuple[str, float]]:
    """Unit -> (dimension, factor to the dimension's internal unit)"""
    two_pi = 2.0 * np.pi
    return {
        "rad/ns": ("frequency", 1.0),
        "1/ns": ("frequency", 1.0),
        "GHz": ("frequency", two_pi),
        "MHz": ("frequency", two_pi * 1e-3),
        "THz": ("frequency", two_pi * 1e3),
        "ueV": ("frequency", 1e-6 / ctx.hbar),
        "meV": ("frequency", 1e-3 / ctx.hbar),
        "eV": ("frequency", 1.0 / ctx.hbar),
        "K": ("frequency", ctx.k_B / ctx.hbar),
        "nm": ("length", 1.0),
        "um": ("length", 1e3),
        "m": ("length", 1e9),
        "ns": ("time", 1.0),
        "ps": ("time", 1e-3),
        "fs": ("time", 1e-6),
        "m/s": ("velocity", 1.0),
        "kg/m3": ("density", 1.0),
        "rad": ("angle", 1.0),
    }


def canonical_unit(unit: str) -> str:
    """
    Fold a unit spelling onto its canonical name

    Args:
        unit: Unit as written by the user

    Returns:
        str: Canonical unit name
    """
    key = unit.strip()
    if key not in _ALIASES:
        raise UnitError(f"Unsupported unit: '{unit}'")
    return _ALIASES[key]


def convert(value: float, from_unit: str, to_unit: str, ctx: UnitContext = DEFAULT_UNITS) -> float:
    """
    Convert a value between supported units

    Wavelengths (nm) convert to and from the frequency dimension through
    omega = 2 pi c / lambda.

    Args:
        value: Number expressed in from_unit
        from_unit: Source unit
        to_unit: Target unit
        ctx: Constants to use

    Returns:
        float: value expressed in to_unit
    """
    src = canonical_unit(from_unit)
    dst = canonical_unit(to_unit)
    factors = _linear_factors(ctx)
    src_dim, src_factor = factors[src]
    dst_dim, dst_factor = factors[dst]

    if src_dim == dst_dim:
        return value * src_factor / dst_factor

    # wavelength <-> frequency
    if src_dim == "length" and dst_dim == "frequency":
        omega = ctx.wavelength_to_omega(value * src_factor)
        return omega / dst_factor
    if src_dim == "frequency" and dst_dim == "length":
        wavelength_nm = ctx.omega_to_wavelength(value * src_factor)
        return wavelength_nm / dst_factor

    raise UnitError(f"Cannot convert {from_unit} to {to_unit}")


_QUANTITY = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|[+-]?inf)\s*(.*?)\s*$")


def parse_quantity(text: str, target_unit: Optional[str] = None, ctx: UnitContext = DEFAULT_UNITS) -> float:
    """
    Parse a number with an optional unit suffix, e.g. "22 GHz_x2pi" or "10 K"

    A bare number is taken to be in the target unit already.

    Args:
        text: Quantity as written in a scenario file
        target_unit: Unit to return the value in; None for dimensionless
        ctx: Constants to use

    Returns:
        float: Parsed value in target_unit
    """
    match = _QUANTITY.match(str(text))
    if not match:
        raise UnitError(f"Malformed quantity: '{text}'")
    value = float(match.group(1))
    unit = match.group(2)

    if not unit:
        return value
    if target_unit is None:
        raise UnitError(f"Quantity '{text}' must be dimensionless")
    return convert(value, unit, target_unit, ctx)


class FrequencyGrid(BaseModel):
    """Strictly increasing grid of angular frequencies (rad/ns)"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    points: np.ndarray = Field(..., description="Strictly increasing angular frequencies in rad/ns")
    spacing: str = Field("uniform", description="'uniform' or 'dense' (log-dense near a feature)")

    @field_validator("points", mode="before")
    @classmethod
    def _check_points(cls, value):
        points = np.array(value, dtype=float)
        if points.ndim != 1 or points.size < 3:
            raise ValueError("a frequency grid needs at least 3 points")
        if not np.all(np.isfinite(points)):
            raise ValueError("frequency grid points must be finite")
        if np.any(np.diff(points) <= 0):
            raise ValueError("frequency grid must be strictly increasing")
        points.setflags(write=False)
        return points

    @classmethod
    def uniform(cls, start: float, stop: float, n: int) -> "FrequencyGrid":
        return cls(points=np.linspace(start, stop, n), spacing="uniform")

    @classmethod
    def dense_near(cls, center: float, width: float, span: float, n: int) -> "FrequencyGrid":
        """
        Grid over [center - span, center + span] whose spacing is ~width/n near
        the center and grows exponentially away from it (sinh mapping)

        Args:
            center: Feature position
            width: Feature width
            span: Half-width of the grid
            n: Number of points
        """
        if width <= 0 or span <= 0:
            raise DomainError("width and span must be positive")
        u_max = np.arcsinh(span / width)
        u = np.linspace(-u_max, u_max, n)
        return cls(points=center + width * np.sinh(u), spacing="dense")

    @property
    def start(self) -> float:
        return float(self.points[0])

    @property
    def stop(self) -> float:
        return float(self.points[-1])

    def __len__(self) -> int:
        return int(self.points.size)

    def contains(self, omega: float) -> bool:
        return self.start <= omega <= self.stop

    def shifted(self, offset: float) -> "FrequencyGrid":
        return FrequencyGrid(points=self.points + offset, spacing=self.spacing)

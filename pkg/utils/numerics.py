# utils/numerics.py - Quadrature helpers shared by the physics modules
import logging
from typing import Callable, Optional, Sequence, Union

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate

from utils.errors import DomainError, NumericError
from utils.units import FrequencyGrid

logger = logging.getLogger(__name__)

ArrayLike = Union[np.ndarray, Sequence[float]]


def principal_value_integral(f: Union[Callable, ArrayLike],
                             pole: float,
                             grid: Optional[FrequencyGrid] = None,
                             limits: Optional[Sequence[float]] = None) -> float:
    """
    Cauchy principal value of  PV int f(w) / (pole - w) dw

    On a grid the pole is removed by subtraction,

        int (f(w) - f(p)) / (p - w) dw  +  f(p) ln((p - a) / (b - p)),

    where the first integrand is smooth (its value at w = p is -f'(p)) and is
    integrated with the trapezoidal rule. A callable with explicit limits and
    no grid is integrated adaptively with a Cauchy weight.

    Args:
        f: Integrand, either values on `grid` or a callable of w
        pole: Position of the simple pole
        grid: Frequency grid carrying the samples of f
        limits: (a, b) for the callable form

    Returns:
        float: Principal value
    """
    if grid is None:
        if not callable(f) or limits is None:
            raise DomainError("principal_value_integral needs a grid or a callable with limits")
        a, b = float(limits[0]), float(limits[1])
        if not a < pole < b:
            raise DomainError(f"Pole {pole} outside integration range [{a}, {b}]")
        # quad computes PV int f(w) / (w - c) dw
        value, _ = integrate.quad(f, a, b, weight="cauchy", wvar=pole, limit=500)
        return -float(value)

    w = grid.points
    a, b = w[0], w[-1]
    if not a < pole < b:
        raise DomainError(f"Pole {pole} outside grid span [{a}, {b}]")

    values = np.asarray(f(w) if callable(f) else f, dtype=float)
    if values.shape != w.shape:
        raise DomainError("Integrand samples do not match the grid")
    if not np.all(np.isfinite(values)):
        raise DomainError("Integrand is not finite on the grid")

    f_pole = float(np.interp(pole, w, values))
    slope = float(np.interp(pole, w, np.gradient(values, w)))

    dist = pole - w
    near = np.abs(dist) <= 1e-12 * max(abs(pole), b - a)
    smooth = np.empty_like(values)
    smooth[~near] = (values[~near] - f_pole) / dist[~near]
    smooth[near] = -slope

    return float(integrate.trapezoid(smooth, w) + f_pole * np.log((pole - a) / (b - pole)))


def gauss_legendre_nodes(breakpoints: ArrayLike, order: int = 16):
    """
    Nodes and weights of a composite Gauss-Legendre rule

    Args:
        breakpoints: Increasing panel edges
        order: Nodes per panel

    Returns:
        Tuple of (nodes, weights) as flat arrays
    """
    edges = np.asarray(breakpoints, dtype=float)
    x, wx = leggauss(order)
    half = 0.5 * np.diff(edges)[:, None]
    mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
    return (mid + half * x).ravel(), (half * wx).ravel()


def refine_breakpoints(breakpoints: np.ndarray) -> np.ndarray:
    """Split every panel in two"""
    mids = 0.5 * (breakpoints[1:] + breakpoints[:-1])
    out = np.empty(breakpoints.size + mids.size)
    out[0::2] = breakpoints
    out[1::2] = mids
    return out


def fourier_panel_integral(f: Callable[[np.ndarray], np.ndarray],
                           breakpoints: ArrayLike,
                           taus: np.ndarray,
                           origin: float,
                           rtol: float = 1e-8,
                           max_panels: int = 65536,
                           order: int = 16,
                           chunk_size: int = 4_000_000) -> np.ndarray:
    """
    I(tau) = int f(w) exp(i (origin - w) tau) dw  by panel Gauss-Legendre quadrature

    Panels are halved until two successive refinements agree to rtol relative
    to int |f|, or max_panels is reached.

    Args:
        f: Vectorized integrand
        breakpoints: Initial panel edges; features of f should sit on edges
        taus: Time arguments
        origin: Reference frequency of the phase
        rtol: Relative tolerance
        max_panels: Refinement cap
        order: Nodes per panel
        chunk_size: Max size of the (tau x node) work array

    Returns:
        np.ndarray: Complex integral for every tau
    """
    edges = np.unique(np.asarray(breakpoints, dtype=float))
    if edges.size < 2:
        raise DomainError("Need at least one quadrature panel")

    def evaluate(edges_now: np.ndarray) -> np.ndarray:
        nodes, weights = gauss_legendre_nodes(edges_now, order)
        fw = f(nodes) * weights
        out = np.empty(taus.size, dtype=complex)
        rows = max(1, chunk_size // max(nodes.size, 1))
        shift = origin - nodes
        for start in range(0, taus.size, rows):
            block = taus[start:start + rows, None]
            out[start:start + rows] = np.exp(1j * block * shift[None, :]) @ fw
        return out

    nodes, weights = gauss_legendre_nodes(edges, order)
    scale = float(np.sum(np.abs(f(nodes)) * weights))
    if scale == 0.0:
        return np.zeros(taus.size, dtype=complex)

    current = evaluate(edges)
    while True:
        if edges.size - 1 >= max_panels:
            logger.warning(f"Panel quadrature stopped at {edges.size - 1} panels before reaching rtol={rtol}")
            return current
        finer_edges = refine_breakpoints(edges)
        finer = evaluate(finer_edges)
        err = float(np.max(np.abs(finer - current)))
        edges, current = finer_edges, finer
        if err <= rtol * scale:
            logger.debug(f"Panel quadrature converged with {edges.size - 1} panels (err={err:.3g})")
            return current


def sinhc(z: Union[complex, np.ndarray]) -> Union[complex, np.ndarray]:
    """sinh(z)/z for complex z, with the series near zero"""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-4
    safe = np.where(small, 1.0, z)
    out = np.where(small, 1.0 + z * z / 6.0 + z ** 4 / 120.0, np.sinh(safe) / safe)
    return out if out.ndim else complex(out)


def richardson(coarse: np.ndarray, fine: np.ndarray, order: int = 2) -> np.ndarray:
    """Richardson extrapolation of a method of the given order from step h (coarse) and h/2 (fine)"""
    factor = 2.0 ** order
    return (factor * fine - coarse) / (factor - 1.0)


def check_finite(values: np.ndarray, what: str) -> np.ndarray:
    """Raise NumericError if any entry is NaN or infinite"""
    if not np.all(np.isfinite(values)):
        raise NumericError(f"Non-finite values encountered in {what}")
    return values

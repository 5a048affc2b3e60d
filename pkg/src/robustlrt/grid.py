"""Uniform intensity grids, discretized densities and scalar root finding.

Everything downstream (density fitting, uncertainty bands, least favorable
densities, threshold calibration) works on functions sampled on a shared
uniform grid over the normalized intensity range [0, 1].  This module owns
that representation plus the two numeric kernels the rest of the package
relies on: composite trapezoidal quadrature and monotone bisection.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import BracketError, ConvergenceError, GridMismatchError, NumericInputError

DEFAULT_GRID_POINTS = 4096


@dataclass(frozen=True)
class IntensityGrid:
    """Uniformly spaced sample points on the intensity axis.

    Parameters
    ----------
    n_points : int
        Number of sample points, at least 2.
    lo, hi : float
        Interval endpoints; normalized intensities use [0, 1].
    """

    n_points: int = DEFAULT_GRID_POINTS
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        if self.n_points < 2:
            raise NumericInputError(f"grid needs at least 2 points, got {self.n_points}")
        if not (np.isfinite(self.lo) and np.isfinite(self.hi) and self.lo < self.hi):
            raise NumericInputError(f"invalid grid interval [{self.lo}, {self.hi}]")

    @property
    def spacing(self) -> float:
        return (self.hi - self.lo) / (self.n_points - 1)

    @property
    def points(self) -> np.ndarray:
        x = np.linspace(self.lo, self.hi, self.n_points)
        x.flags.writeable = False
        return x

    @property
    def trapezoid_weights(self) -> np.ndarray:
        w = np.full(self.n_points, self.spacing)
        w[0] *= 0.5
        w[-1] *= 0.5
        w.flags.writeable = False
        return w


@dataclass(frozen=True)
class DensityGrid:
    """A non-negative function sampled on an :class:`IntensityGrid`.

    Instances are immutable; the value array is copied on construction and
    marked read-only, so they are safe to share between threads.
    """

    grid: IntensityGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n_points,):
            raise NumericInputError(
                f"values shape {v.shape} does not match grid ({self.grid.n_points},)"
            )
        if not np.all(np.isfinite(v)):
            raise NumericInputError("density values must be finite")
        if np.any(v < 0):
            raise NumericInputError("density values must be non-negative")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def mass(self) -> float:
        """Trapezoidal integral over the grid interval."""
        return quadrature(self)

    def is_normalized(self, tol: float = 1e-6) -> bool:
        return abs(self.mass() - 1.0) <= tol

    def scaled(self, factor: float) -> "DensityGrid":
        return DensityGrid(self.grid, factor * self.values)

    def normalized(self) -> "DensityGrid":
        m = self.mass()
        if m <= 0:
            raise NumericInputError("cannot normalize a zero density")
        return self.scaled(1.0 / m)


def require_same_grid(*densities: DensityGrid) -> IntensityGrid:
    grid = densities[0].grid
    for d in densities[1:]:
        if d.grid != grid:
            raise GridMismatchError(f"grid mismatch: {d.grid} vs {grid}")
    return grid


def quadrature(d: DensityGrid) -> float:
    """Composite trapezoidal integral of ``d`` over its grid interval.

    Deterministic (fixed summation order) and exact for linear functions.
    """
    v = d.values
    h = d.grid.spacing
    return float(h * (0.5 * (v[0] + v[-1]) + v[1:-1].sum()))


def l1_distance(d1: DensityGrid, d2: DensityGrid) -> float:
    """Grid-spacing-weighted L1 distance, i.e. the mass of ``|d1 - d2|``."""
    require_same_grid(d1, d2)
    diff = np.abs(d1.values - d2.values)
    h = d1.grid.spacing
    return float(h * (0.5 * (diff[0] + diff[-1]) + diff[1:-1].sum()))


def bisect_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float,
    max_iter: int = 200,
) -> float:
    """Root of a non-decreasing scalar function by bisection.

    Requires ``f(lo) <= 0 <= f(hi)``.  When ``f`` is flat at zero over an
    interval, the returned value approaches the smallest root from within
    half a bracket width, which keeps results reproducible and strictly
    above ``lo``.

    Parameters
    ----------
    f : callable
        Non-decreasing function of one real variable.
    lo, hi : float
        Initial bracket.
    tol : float
        Absolute tolerance on the bracket width (also accepted as an
        ``|f|`` tolerance at the returned point).

    Raises
    ------
    BracketError
        If the bracket does not straddle zero; the caller is expected to
        expand it.
    ConvergenceError
        If the iteration budget is exhausted first.
    """
    if tol <= 0:
        raise NumericInputError(f"tol must be positive, got {tol}")
    if lo > hi:
        raise NumericInputError(f"empty bracket [{lo}, {hi}]")
    flo = f(lo)
    fhi = f(hi)
    if flo > 0 or fhi < 0:
        raise BracketError(f"f({lo})={flo:.3g}, f({hi})={fhi:.3g} does not straddle 0")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if f(mid) >= 0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= tol:
            return 0.5 * (lo + hi)
    raise ConvergenceError(f"bisection did not reach tol={tol} in {max_iter} iterations")

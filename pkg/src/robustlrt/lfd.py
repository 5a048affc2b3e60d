"""Least favorable density pairs and the robust log-likelihood ratio.

Given one uncertainty band per hypothesis, the least favorable pair
(g0, g1) is the pair of feasible densities that is hardest to tell apart.
It satisfies the coupled fixed point

    g0 = min(upper0, max(a0 * g1, lower0)),
    g1 = min(upper1, max(a1 * g0, lower1)),

where the scalars a0, a1 are chosen so both densities integrate to one.
The solver alternates between the two equations, finding each scalar as
the root of a non-decreasing mass criterion, until the densities stop
moving in grid-weighted L1 norm.

The likelihood ratio g1/g0 of the solution takes at most six values per
gridpoint: the four envelope ratios, plus two constants a1 and 1/a0 on the
segments where g1 (respectively g0) runs strictly inside its band.  Those
flat segments are the clipping plateaus of the robust test statistic.
"""

from __future__ import annotations

import csv
import enum
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bands import DensityBand, contains
from .errors import ConvergenceError, NumericInputError
from .grid import DensityGrid, IntensityGrid, bisect_root, l1_distance, quadrature

_BRACKET_DOUBLINGS = 60
_MAX_SWEEPS = 10000


class LrCase(enum.IntEnum):
    """Per-gridpoint structure of the robust likelihood ratio.

    RATIO_xy: both densities sit on band envelopes; x is the H1 side,
    y the H0 side (L = lower, U = upper).  CLIP_A1: g1 strictly interior,
    ratio equals a1 exactly.  CLIP_INV_A0: g0 strictly interior, ratio
    equals 1/a0 exactly.
    """

    RATIO_LL = 0
    RATIO_LU = 1
    RATIO_UL = 2
    RATIO_UU = 3
    CLIP_A1 = 4
    CLIP_INV_A0 = 5


@dataclass(frozen=True)
class LfdPair:
    """Converged least favorable densities with their multipliers."""

    g0: DensityGrid
    g1: DensityGrid
    a0: float
    a1: float
    iterations: int
    converged: bool

    def to_dict(self) -> dict:
        g = self.g0.grid
        return {
            "a0": self.a0,
            "a1": self.a1,
            "iterations": self.iterations,
            "grid": {"n_points": g.n_points, "lo": g.lo, "hi": g.hi},
            "g0_values": self.g0.values.tolist(),
            "g1_values": self.g1.values.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "LfdPair":
        grid = IntensityGrid(
            n_points=int(doc["grid"]["n_points"]),
            lo=float(doc["grid"]["lo"]),
            hi=float(doc["grid"]["hi"]),
        )
        return cls(
            g0=DensityGrid(grid, np.asarray(doc["g0_values"], dtype=float)),
            g1=DensityGrid(grid, np.asarray(doc["g1_values"], dtype=float)),
            a0=float(doc["a0"]),
            a1=float(doc["a1"]),
            iterations=int(doc["iterations"]),
            converged=True,
        )

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "LfdPair":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _apply_update(a: float, g: np.ndarray, band: DensityBand) -> np.ndarray:
    out = np.maximum(a * g, band.lower.values)
    if band.upper is not None:
        out = np.minimum(band.upper.values, out)
    return out


def density_criterion(a: float, g: DensityGrid, band: DensityBand) -> float:
    """Mass of ``min(upper, max(a * g, lower))`` minus one.

    Non-decreasing in ``a``; its root is the multiplier that turns the
    clamped scaling of ``g`` into a probability density.  An unbounded
    upper envelope simply skips the min.
    """
    if a < 0:
        raise NumericInputError(f"multiplier must be non-negative, got {a}")
    updated = _apply_update(a, g.values, band)
    h = band.grid.spacing
    return float(h * (0.5 * (updated[0] + updated[-1]) + updated[1:-1].sum()) - 1.0)


def _solve_multiplier(g: DensityGrid, band: DensityBand) -> float:
    # The tiny shift tolerates corridors whose upper envelope has mass
    # exactly 1 up to round-off (degenerate bands); it biases the root by
    # under 1e-8, far inside every downstream tolerance.
    f = lambda a: density_criterion(a, g, band) + 1e-10
    if f(0.0) >= 0.0:
        return 0.0
    hi = 4.0
    for _ in range(_BRACKET_DOUBLINGS):
        if f(hi) >= 0:
            break
        hi *= 2.0
    else:
        raise ConvergenceError(
            "mass criterion stays below 1 up to a=2^62; bands cannot be normalized "
            "(disjoint supports or an upper envelope with mass below 1)"
        )
    return bisect_root(f, 0.0, hi, tol=1e-13 * max(1.0, hi))


def solve_lfds(
    band0: DensityBand,
    band1: DensityBand,
    init0: Optional[DensityGrid] = None,
    init1: Optional[DensityGrid] = None,
    delta: float = 0.001,
) -> LfdPair:
    """Alternating fixed-point solve for the least favorable pair.

    Parameters
    ----------
    band0, band1 : DensityBand
        Feasible uncertainty sets for H0 and H1 on a common grid.
    init0, init1 : DensityGrid, optional
        Starting densities; defaults to the renormalized lower envelopes
        (for proportional bands these equal the renormalized nominals).
        The converged pair does not depend on the choice.
    delta : float
        Convergence tolerance on the grid-weighted L1 change of both
        densities between consecutive sweeps.

    Raises
    ------
    ConvergenceError
        If the sweep budget is exhausted, with the last residuals in the
        message.
    """
    if delta <= 0:
        raise NumericInputError(f"delta must be positive, got {delta}")
    if band0.grid != band1.grid:
        raise NumericInputError("bands must share one grid")
    g0 = (init0 if init0 is not None else band0.lower.normalized()).values
    g1 = (init1 if init1 is not None else band1.lower.normalized()).values
    grid = band0.grid

    a0 = a1 = float("nan")
    d0 = d1 = float("inf")
    for sweep in range(1, _MAX_SWEEPS + 1):
        a0 = _solve_multiplier(DensityGrid(grid, g1), band0)
        g0_new = _apply_update(a0, g1, band0)
        a1 = _solve_multiplier(DensityGrid(grid, g0_new), band1)
        g1_new = _apply_update(a1, g0_new, band1)
        d0 = l1_distance(DensityGrid(grid, g0_new), DensityGrid(grid, g0))
        d1 = l1_distance(DensityGrid(grid, g1_new), DensityGrid(grid, g1))
        g0, g1 = g0_new, g1_new
        if d0 < delta and d1 < delta:
            pair = LfdPair(
                g0=DensityGrid(grid, g0),
                g1=DensityGrid(grid, g1),
                a0=a0,
                a1=a1,
                iterations=sweep,
                converged=True,
            )
            _check_pair(pair, band0, band1)
            return pair
    raise ConvergenceError(
        f"no convergence after {_MAX_SWEEPS} sweeps "
        f"(last residuals d0={d0:.3e}, d1={d1:.3e}, a0={a0:.4g}, a1={a1:.4g})"
    )


def _check_pair(pair: LfdPair, band0: DensityBand, band1: DensityBand) -> None:
    m0, m1 = quadrature(pair.g0), quadrature(pair.g1)
    if abs(m0 - 1.0) > 1e-6 or abs(m1 - 1.0) > 1e-6:
        raise ConvergenceError(f"converged pair not normalized: {m0:.8f}, {m1:.8f}")
    if not contains(band0, pair.g0) or not contains(band1, pair.g1):
        raise ConvergenceError("converged pair escaped its band")


@dataclass(frozen=True)
class LogLikelihoodRatio:
    """Robust log-likelihood ratio sampled on the grid, with case labels.

    ``values`` may contain +inf where only the H0 density vanishes and NaN
    where both densities vanish (no detection support there).  ``evaluate``
    interpolates linearly between gridpoints after replacing non-finite
    entries by order-preserving finite sentinels, so thresholding behaves
    identically.
    """

    grid: IntensityGrid
    values: np.ndarray = field(repr=False)
    cases: np.ndarray = field(repr=False)
    a0: float = float("nan")
    a1: float = float("nan")

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).copy()
        c = np.asarray(self.cases, dtype=np.int8).copy()
        if v.shape != (self.grid.n_points,) or c.shape != v.shape:
            raise NumericInputError("values/cases must match the grid length")
        v.flags.writeable = False
        c.flags.writeable = False
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "cases", c)

    def finite_values(self) -> np.ndarray:
        """Values with non-finite entries replaced order-preservingly."""
        v = self.values.copy()
        finite = np.isfinite(v)
        if finite.all():
            return v
        if not finite.any():
            return np.zeros_like(v)
        vmax = v[finite].max()
        vmin = v[finite].min()
        v[np.isposinf(self.values)] = vmax + 1.0
        # NaN marks points outside the common support: never detectable.
        v[np.isneginf(self.values) | np.isnan(self.values)] = vmin - 1.0
        return v

    def evaluate(self, x) -> np.ndarray:
        arr = np.asarray(x, dtype=float)
        return np.interp(arr, self.grid.points, self.finite_values())

    def to_csv(self, path) -> None:
        xs = self.grid.points
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "log_lr", "case"])
            for x, v, c in zip(xs, self.values, self.cases):
                writer.writerow([f"{x:.9g}", f"{v:.9g}", LrCase(int(c)).name])


def robust_log_lr(
    pair: LfdPair, band0: DensityBand, band1: DensityBand, bound_tol: float = 1e-9
) -> LogLikelihoodRatio:
    """Log ratio ln(g1/g0) with its per-gridpoint case decomposition.

    On clipping plateaus the stored value is the exact constant
    (ln a1 or -ln a0) rather than the ratio of gridded densities, which
    keeps the plateaus exactly flat for threshold calibration.
    """
    if not pair.converged:
        raise NumericInputError("robust_log_lr requires a converged pair")
    g0, g1 = pair.g0.values, pair.g1.values
    l0, l1v = band0.lower.values, band1.lower.values
    u0 = band0.upper.values if band0.upper is not None else None
    u1 = band1.upper.values if band1.upper is not None else None

    scale0 = np.maximum(1.0, np.abs(g0))
    scale1 = np.maximum(1.0, np.abs(g1))
    interior0 = g0 > l0 + bound_tol * scale0
    if u0 is not None:
        interior0 &= g0 < u0 - bound_tol * scale0
    interior1 = g1 > l1v + bound_tol * scale1
    if u1 is not None:
        interior1 &= g1 < u1 - bound_tol * scale1

    values = _log_ratio(g0, g1)

    # Bound-vs-bound labels; nearest envelope wins, lower on ties, so the
    # degenerate band (lower == upper) labels as RATIO_LL.
    at_lower1 = (
        np.ones_like(g1, dtype=bool)
        if u1 is None
        else np.abs(g1 - l1v) <= np.abs(g1 - u1)
    )
    at_lower0 = (
        np.ones_like(g0, dtype=bool)
        if u0 is None
        else np.abs(g0 - l0) <= np.abs(g0 - u0)
    )
    cases = np.where(
        at_lower1,
        np.where(at_lower0, LrCase.RATIO_LL, LrCase.RATIO_LU),
        np.where(at_lower0, LrCase.RATIO_UL, LrCase.RATIO_UU),
    ).astype(np.int8)
    cases[interior0] = LrCase.CLIP_INV_A0
    cases[interior1] = LrCase.CLIP_A1

    values = values.copy()
    clip1 = cases == LrCase.CLIP_A1
    clip0 = cases == LrCase.CLIP_INV_A0
    if np.any(clip1):
        values[clip1] = np.log(pair.a1)
    if np.any(clip0):
        values[clip0] = -np.log(pair.a0)
    return LogLikelihoodRatio(
        grid=pair.g0.grid, values=values, cases=cases, a0=pair.a0, a1=pair.a1
    )


def _log_ratio(g0: np.ndarray, g1: np.ndarray) -> np.ndarray:
    # log(g1) - log(g0) handles the support edges by itself: +inf where
    # only g0 vanishes, -inf where only g1 vanishes, NaN where both do
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log(g1) - np.log(g0)


def nominal_log_lr(h0_density: DensityGrid, h1_density: DensityGrid) -> LogLikelihoodRatio:
    """Plain ln(p1/p0) on the grid, labelled RATIO_LL throughout."""
    values = _log_ratio(h0_density.values, h1_density.values)
    cases = np.full(values.shape, LrCase.RATIO_LL, dtype=np.int8)
    return LogLikelihoodRatio(grid=h0_density.grid, values=values, cases=cases)

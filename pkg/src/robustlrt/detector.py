"""Pixel-wise thresholded detection, fusion across views and scoring.

The detector applies a log-likelihood-ratio statistic to every raster
pixel and compares it to a threshold calibrated for a targeted false
alarm probability.  Per-view binary masks are combined by pixel-wise AND
(hard fusion) and the fused mask is scored against ground truth by
connected components.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import ndimage

from .errors import CalibrationError, InputError, NumericInputError
from .grid import DensityGrid
from .lfd import LogLikelihoodRatio

_EIGHT_CONN = np.ones((3, 3), dtype=int)


@dataclass(frozen=True)
class Raster:
    """2-D image of normalized intensities in [0, 1], row-major."""

    pixels: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.asarray(self.pixels, dtype=float)
        if p.ndim != 2 or p.size == 0:
            raise InputError(f"raster must be 2-D and non-empty, got shape {p.shape}")
        if not np.all(np.isfinite(p)) or p.min() < 0.0 or p.max() > 1.0:
            raise InputError("raster intensities must be finite and inside [0, 1]")
        p = p.copy()
        p.flags.writeable = False
        object.__setattr__(self, "pixels", p)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass(frozen=True)
class BinaryMask:
    """Per-pixel decision mask with the raster's dimensions."""

    bits: np.ndarray = field(repr=False)

    def __post_init__(self):
        b = np.asarray(self.bits)
        if b.ndim != 2 or b.size == 0:
            raise InputError(f"mask must be 2-D and non-empty, got shape {b.shape}")
        b = b.astype(bool).copy()
        b.flags.writeable = False
        object.__setattr__(self, "bits", b)

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    def count(self) -> int:
        return int(self.bits.sum())


@dataclass(frozen=True)
class DetectorSpec:
    """A log-LR statistic plus its calibrated decision threshold."""

    log_lr: LogLikelihoodRatio
    ln_gamma: float
    alpha: float

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise InputError(f"alpha must be in (0, 1), got {self.alpha}")


def calibrate_threshold(
    log_lr: LogLikelihoodRatio, h0_density: DensityGrid, alpha: float
) -> float:
    """Smallest threshold with false alarm mass at most ``alpha``.

    Computes the pushforward of ``h0_density`` through the statistic on
    the grid: gridpoints are sorted by their log-LR level and H0 mass is
    accumulated from the top.  Equal levels (clipping plateaus) are kept
    or dropped as one block, always landing on the conservative side of
    ``alpha``.  Gridpoints outside the common support (NaN statistic)
    can never fire and are left out of the accumulation.

    Raises
    ------
    CalibrationError
        If all H0 mass sits on a single level, so no threshold separates
        anything (the message names the plateau).
    """
    if not (0.0 < alpha <= 1.0):
        raise NumericInputError(f"alpha must be in (0, 1], got {alpha}")
    if log_lr.grid != h0_density.grid:
        raise NumericInputError("statistic and calibration density share one grid")
    if not h0_density.is_normalized(tol=1e-3):
        raise NumericInputError(
            f"calibration density mass {h0_density.mass():.4f} is not 1"
        )
    values = log_lr.values
    weights = h0_density.grid.trapezoid_weights * h0_density.values
    usable = ~np.isnan(values)
    values = values[usable]
    weights = weights[usable]

    # unique levels descending with their masses
    levels, inverse = np.unique(values, return_inverse=True)
    masses = np.bincount(inverse, weights=weights, minlength=levels.size)
    levels = levels[::-1]
    masses = masses[::-1]
    positive = masses > 0.0
    levels = levels[positive]
    masses = masses[positive]
    if levels.size == 0:
        raise CalibrationError("calibration density carries no mass on the support")
    if levels.size == 1:
        raise CalibrationError(
            f"statistic is constant (= {levels[0]:.6g}) under the calibration "
            f"density; no threshold can realise alpha={alpha}"
        )
    exclusive = np.concatenate([[0.0], np.cumsum(masses)[:-1]])
    total = float(masses.sum())
    # normalize away quadrature round-off so alpha=1 picks the bottom level
    exclusive = exclusive / total
    feasible = np.nonzero(exclusive <= alpha)[0]
    k = int(feasible[-1])
    return float(levels[k])


def exact_fa_mass(log_lr: LogLikelihoodRatio, h0_density: DensityGrid, ln_gamma: float) -> float:
    """Grid-exact H0 mass of the rejection region {log_lr > ln_gamma}."""
    values = log_lr.values
    weights = h0_density.grid.trapezoid_weights * h0_density.values
    fire = values > ln_gamma
    fire &= ~np.isnan(values)
    return float(weights[fire].sum() / weights[~np.isnan(values)].sum())


def top_plateau_threshold(log_lr: LogLikelihoodRatio, h0_density: DensityGrid) -> float:
    """Threshold that rejects exactly the statistic's top level.

    Operating point for clipped statistics whose top plateau already
    carries more H0 mass than any useful alpha: the strict comparison in
    :func:`detect` then fires precisely where the statistic is maximal.
    """
    values = log_lr.values
    weights = h0_density.grid.trapezoid_weights * h0_density.values
    usable = ~np.isnan(values)
    levels = np.unique(values[usable][weights[usable] > 0.0])
    if levels.size < 2:
        raise CalibrationError("statistic has no level below its top plateau")
    return float(levels[-2])


def detect(raster: Raster, spec: DetectorSpec) -> BinaryMask:
    """Per-pixel decision: statistic above threshold means target."""
    stat = spec.log_lr.evaluate(raster.pixels)
    return BinaryMask(stat > spec.ln_gamma)


def hard_fuse(masks: Sequence[BinaryMask]) -> BinaryMask:
    """Pixel-wise AND of per-view masks (identical dimensions required)."""
    if len(masks) < 1:
        raise InputError("hard_fuse needs at least one mask")
    shape = masks[0].bits.shape
    for m in masks[1:]:
        if m.bits.shape != shape:
            raise InputError(f"mask shape {m.bits.shape} != {shape}")
    fused = np.logical_and.reduce([m.bits for m in masks])
    return BinaryMask(fused)


@dataclass(frozen=True)
class EvalReport:
    """Region-level detection score against a ground-truth mask."""

    fa_count: int
    md_count: int
    per_target: tuple
    count_unit: str = "region"

    def to_dict(self) -> dict:
        return {
            "fa_count": self.fa_count,
            "md_count": self.md_count,
            "count_unit": self.count_unit,
            "per_target": [{"id": tid, "detected": det} for tid, det in self.per_target],
        }


def evaluate(fused: BinaryMask, truth: BinaryMask, count_unit: str = "region") -> EvalReport:
    """Count false alarms and missed detections.

    With ``count_unit='region'`` (default), 8-connected components of the
    fused mask that touch no truth pixel count as false alarms, and truth
    components touched by no fused pixel count as misses.  With
    ``count_unit='pixel'`` the counts are raw pixel disagreements; the
    per-target table stays region-based either way.
    """
    if fused.bits.shape != truth.bits.shape:
        raise InputError(f"mask shapes differ: {fused.bits.shape} vs {truth.bits.shape}")
    if count_unit not in ("region", "pixel"):
        raise InputError(f"count_unit must be region or pixel, got {count_unit}")

    truth_labels, n_truth = ndimage.label(truth.bits, structure=_EIGHT_CONN)
    fused_labels, n_fused = ndimage.label(fused.bits, structure=_EIGHT_CONN)

    per_target = []
    for tid in range(1, n_truth + 1):
        detected = bool(np.any(fused.bits[truth_labels == tid]))
        per_target.append((tid, detected))

    if count_unit == "pixel":
        fa = int(np.sum(fused.bits & ~truth.bits))
        md = int(np.sum(truth.bits & ~fused.bits))
    else:
        fa = 0
        for fid in range(1, n_fused + 1):
            if not np.any(truth.bits[fused_labels == fid]):
                fa += 1
        md = sum(1 for _, det in per_target if not det)
    return EvalReport(
        fa_count=fa, md_count=md, per_target=tuple(per_target), count_unit=count_unit
    )

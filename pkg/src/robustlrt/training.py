"""Training-pixel extraction: seeded region growing and mask algebra.

Target regions are flood-filled from manually chosen seed pixels: an
8-connected neighbour joins the region when its intensity stays within a
decibel window of the seed intensity (amplitude convention, 20 log10).
The grown mask splits an image into target and clutter training pixels.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .detector import BinaryMask, Raster
from .errors import SeedError, TrainingError

_NEIGHBOURS = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]


@dataclass(frozen=True)
class SeedPoint:
    """Pixel coordinate (row i, column j) a region grows from."""

    i: int
    j: int


@dataclass(frozen=True)
class TrainingSets:
    """Positive-intensity pixels split by the target mask."""

    targets: np.ndarray
    clutter: np.ndarray

    @property
    def n_targets(self) -> int:
        return int(self.targets.size)

    @property
    def n_clutter(self) -> int:
        return int(self.clutter.size)


def region_grow(
    raster: Raster,
    seeds: Sequence[SeedPoint],
    band_db: float = 3.0,
    db_factor: float = 20.0,
) -> BinaryMask:
    """Union of seed-anchored flood fills under a decibel criterion.

    A neighbour with intensity y joins the region grown from a seed with
    intensity phi when ``|db_factor * log10(y / phi)| <= band_db``.  The
    reference phi stays fixed at the seed's own intensity, which makes the
    result independent of the seed visiting order.
    """
    if band_db <= 0:
        raise SeedError(f"band_db must be positive, got {band_db}")
    img = raster.pixels
    h, w = img.shape
    grown = np.zeros((h, w), dtype=bool)
    for seed in seeds:
        if not (0 <= seed.i < h and 0 <= seed.j < w):
            raise SeedError(f"seed ({seed.i}, {seed.j}) outside {h}x{w} raster")
        phi = img[seed.i, seed.j]
        if phi <= 0.0:
            raise SeedError(f"seed ({seed.i}, {seed.j}) has zero intensity")
        ratio_lo = phi * 10.0 ** (-band_db / db_factor)
        ratio_hi = phi * 10.0 ** (band_db / db_factor)
        visited = np.zeros((h, w), dtype=bool)
        queue = deque([(seed.i, seed.j)])
        visited[seed.i, seed.j] = True
        while queue:
            ci, cj = queue.popleft()
            grown[ci, cj] = True
            for di, dj in _NEIGHBOURS:
                ni, nj = ci + di, cj + dj
                if not (0 <= ni < h and 0 <= nj < w) or visited[ni, nj]:
                    continue
                y = img[ni, nj]
                if ratio_lo <= y <= ratio_hi:
                    visited[ni, nj] = True
                    queue.append((ni, nj))
    return BinaryMask(grown)


def split_training(raster: Raster, mask: BinaryMask) -> TrainingSets:
    """Positive pixels under the mask become targets, the rest clutter."""
    if mask.bits.shape != raster.pixels.shape:
        raise TrainingError(
            f"mask shape {mask.bits.shape} != raster shape {raster.pixels.shape}"
        )
    img = raster.pixels
    positive = img > 0.0
    targets = img[mask.bits & positive]
    clutter = img[~mask.bits & positive]
    if targets.size == 0 or clutter.size == 0:
        raise TrainingError(
            f"degenerate split: {targets.size} target / {clutter.size} clutter pixels"
        )
    return TrainingSets(targets=targets.copy(), clutter=clutter.copy())

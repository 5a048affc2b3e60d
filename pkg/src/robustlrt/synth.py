"""Synthetic multiview scene generation with ground truth.

Scenes are desk-scale statistical stand-ins for multiview radar imagery:
clutter pixels draw from a Rayleigh law whose scale varies with a ground
roughness layout, target discs draw from a Gaussian mixture, and the M
views are independent redraws of the same geometry.  Everything is
deterministic given the scene seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .detector import BinaryMask, Raster
from .errors import ConfigError
from .models import GaussianMixtureParams, RayleighParams, reference_model

LAYOUTS = ("low", "high", "mixed")


@dataclass(frozen=True)
class TargetSpec:
    """A disc-shaped target: centre pixel (row, col), radius, intensity law.

    ``component`` restricts sampling to one mixture component; ``mixture``
    overrides the scene-wide target mixture.  Radius 0 is a single pixel.
    """

    i: int
    j: int
    radius: int = 3
    component: Optional[int] = None
    mixture: Optional[GaussianMixtureParams] = None


@dataclass(frozen=True)
class SceneSpec:
    """Geometry and statistics of a synthetic multiview scene."""

    width: int = 192
    height: int = 128
    targets: Tuple[TargetSpec, ...] = ()
    clutter: RayleighParams = field(default_factory=lambda: RayleighParams(0.025))
    layout: str = "low"
    high_factor: float = 1.8
    target_mixture: GaussianMixtureParams = field(
        default_factory=lambda: reference_model().h1
    )
    views: int = 11
    seed: int = 0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ConfigError(f"bad scene size {self.width}x{self.height}")
        if self.views < 1:
            raise ConfigError(f"views must be >= 1, got {self.views}")
        if self.layout not in LAYOUTS:
            raise ConfigError(f"layout must be one of {LAYOUTS}, got {self.layout!r}")
        if self.high_factor <= 0:
            raise ConfigError(f"high_factor must be positive, got {self.high_factor}")
        for t in self.targets:
            if not (0 <= t.i < self.height and 0 <= t.j < self.width):
                raise ConfigError(f"target centre ({t.i}, {t.j}) out of bounds")
            if t.radius < 0:
                raise ConfigError(f"target radius must be >= 0, got {t.radius}")
        self._check_disjoint()

    def _check_disjoint(self):
        for a in range(len(self.targets)):
            for b in range(a + 1, len(self.targets)):
                ta, tb = self.targets[a], self.targets[b]
                dist = np.hypot(ta.i - tb.i, ta.j - tb.j)
                if dist <= ta.radius + tb.radius:
                    raise ConfigError(f"target discs {a} and {b} overlap")


def truth_mask(spec: SceneSpec) -> BinaryMask:
    """Ground-truth target mask; depends on geometry only, not the seed."""
    bits = np.zeros((spec.height, spec.width), dtype=bool)
    ii, jj = np.mgrid[0 : spec.height, 0 : spec.width]
    for t in spec.targets:
        bits |= (ii - t.i) ** 2 + (jj - t.j) ** 2 <= t.radius**2
    return BinaryMask(bits)


def sigma_map(spec: SceneSpec) -> np.ndarray:
    """Per-pixel Rayleigh scale implied by the roughness layout.

    ``mixed`` splits the width into four equal strips with the second and
    fourth strip at the high-roughness scale.
    """
    base = spec.clutter.sigma0
    out = np.full((spec.height, spec.width), base)
    if spec.layout == "high":
        out *= spec.high_factor
    elif spec.layout == "mixed":
        edges = [spec.width * k // 4 for k in range(5)]
        for strip in (1, 3):
            out[:, edges[strip] : edges[strip + 1]] = base * spec.high_factor
    return out


def _sample_mixture(
    mix: GaussianMixtureParams, component: Optional[int], n: int, rng: np.random.Generator
) -> np.ndarray:
    if component is not None:
        if not (0 <= component < mix.n_components):
            raise ConfigError(f"mixture has no component {component}")
        mu = mix.means[component]
        sg = mix.sigmas[component]
        return rng.normal(mu, sg, size=n)
    choice = rng.choice(mix.n_components, size=n, p=np.asarray(mix.weights))
    mu = np.asarray(mix.means)[choice]
    sg = np.asarray(mix.sigmas)[choice]
    return rng.normal(mu, sg)


def generate(spec: SceneSpec) -> tuple[list[Raster], BinaryMask]:
    """Draw the M views plus the (seed-independent) truth mask.

    Per view, clutter pixels are iid Rayleigh with the layout's scale and
    target-disc pixels are iid mixture draws; everything is clipped to
    [0, 1].  Views use independent child streams of the scene seed.
    """
    truth = truth_mask(spec)
    scales = sigma_map(spec)
    ii, jj = np.mgrid[0 : spec.height, 0 : spec.width]
    streams = np.random.SeedSequence(spec.seed).spawn(spec.views)
    rasters = []
    for view_seed in streams:
        rng = np.random.default_rng(view_seed)
        img = rng.rayleigh(scale=scales)
        for t in spec.targets:
            disc = (ii - t.i) ** 2 + (jj - t.j) ** 2 <= t.radius**2
            mix = t.mixture if t.mixture is not None else spec.target_mixture
            img[disc] = _sample_mixture(mix, t.component, int(disc.sum()), rng)
        np.clip(img, 0.0, 1.0, out=img)
        rasters.append(Raster(img))
    return rasters, truth


def nine_target_layout(
    width: int = 192, height: int = 128, radius: Optional[int] = None
) -> tuple:
    """Nine disc targets spread like a field trial lane (fractions of extent).

    Radius defaults to 4 at the reference 192x128 size and scales down for
    smaller scenes so the discs stay disjoint.
    """
    if radius is None:
        radius = max(1, round(4 * min(width / 192, height / 128)))
    fractions = [
        (0.30, 0.06), (0.55, 0.25), (0.10, 0.37), (0.82, 0.53), (0.50, 0.56),
        (0.40, 0.63), (0.20, 0.72), (0.82, 0.81), (0.40, 0.94),
    ]
    return tuple(
        TargetSpec(i=int(round(fy * (height - 1))), j=int(round(fx * (width - 1))), radius=radius)
        for fy, fx in fractions
    )

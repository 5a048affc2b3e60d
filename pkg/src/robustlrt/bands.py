"""Uncertainty sets around a nominal density: envelope bands.

A band is a pointwise corridor [lower, upper] of non-negative functions;
any probability density running inside the corridor is considered feasible
under the corresponding hypothesis.  Two constructions are supported:

* proportional band: lower = lf * nominal, upper = uf * nominal;
* outlier (contamination) band: lower = (1 - eps) * nominal, no upper
  bound, which models a fraction eps of arbitrarily distributed pixels.

Feasibility demands mass(lower) <= 1 <= mass(upper).
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, InfeasibleBandError
from .grid import DensityGrid, quadrature, require_same_grid

CONTAINS_SLACK = 1e-9


class Hypothesis(enum.Enum):
    H0 = 0
    H1 = 1


class BandKind(enum.Enum):
    BAND = "band"
    OUTLIER = "outlier"


@dataclass(frozen=True)
class BandSpec:
    """Recipe for building a band around a nominal density.

    For ``OUTLIER`` the upper factor must be None (unbounded) and the lower
    factor equals one minus the contamination ratio.
    """

    kind: BandKind = BandKind.BAND
    lower_factor: float = 0.8
    upper_factor: Optional[float] = 2.5

    def __post_init__(self):
        if not (0.0 < self.lower_factor <= 1.0):
            raise ConfigError(f"lower_factor must be in (0, 1], got {self.lower_factor}")
        if self.kind is BandKind.OUTLIER:
            if self.upper_factor is not None:
                raise ConfigError("outlier bands have an unbounded upper envelope")
        else:
            # equality gives the degenerate corridor {nominal}, which is legal
            if self.upper_factor is None or self.upper_factor < 1.0:
                raise ConfigError(f"upper_factor must be >= 1, got {self.upper_factor}")

    @classmethod
    def outlier(cls, contamination: float) -> "BandSpec":
        if not (0.0 <= contamination < 1.0):
            raise ConfigError(f"contamination ratio must be in [0, 1), got {contamination}")
        return cls(kind=BandKind.OUTLIER, lower_factor=1.0 - contamination, upper_factor=None)

    @property
    def contamination(self) -> float:
        return 1.0 - self.lower_factor

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "lower_factor": self.lower_factor,
            "upper_factor": "unbounded" if self.upper_factor is None else self.upper_factor,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "BandSpec":
        try:
            kind = BandKind(doc["kind"])
            upper = doc.get("upper_factor", None)
            if upper in ("unbounded", None):
                upper = None
            else:
                upper = float(upper)
            return cls(kind=kind, lower_factor=float(doc["lower_factor"]), upper_factor=upper)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed band spec: {exc}") from exc


@dataclass(frozen=True)
class DensityBand:
    """Lower/upper envelope pair; ``upper is None`` means unbounded."""

    lower: DensityGrid
    upper: Optional[DensityGrid]
    hypothesis: Hypothesis

    def __post_init__(self):
        lo_mass = quadrature(self.lower)
        if lo_mass > 1.0 + 1e-9:
            raise InfeasibleBandError(f"lower envelope mass {lo_mass:.6f} exceeds 1")
        if self.upper is not None:
            require_same_grid(self.lower, self.upper)
            if np.any(self.upper.values < self.lower.values - CONTAINS_SLACK):
                raise InfeasibleBandError("upper envelope dips below lower envelope")
            up_mass = quadrature(self.upper)
            if up_mass < 1.0 - 1e-9:
                raise InfeasibleBandError(f"upper envelope mass {up_mass:.6f} is below 1")

    @property
    def is_unbounded(self) -> bool:
        return self.upper is None

    @property
    def grid(self):
        return self.lower.grid

    def clamp(self, values: np.ndarray) -> np.ndarray:
        """Pointwise projection of ``values`` into the band corridor."""
        out = np.maximum(values, self.lower.values)
        if self.upper is not None:
            out = np.minimum(out, self.upper.values)
        return out


def build_band(nominal: DensityGrid, spec: BandSpec, hypothesis: Hypothesis) -> DensityBand:
    """Scale a (near-normalized) nominal density into a feasible band.

    Nominal mass slightly below 1 is tolerated down to 0.95 with a warning:
    evaluating mixture tails on a finite grid loses a little mass, and the
    least-favorable-density solver renormalizes implicitly.
    """
    mass = quadrature(nominal)
    if not (0.95 <= mass <= 1.0 + 1e-6):
        raise InfeasibleBandError(
            f"nominal mass {mass:.4f} outside [0.95, 1]; fit or grid looks wrong"
        )
    if mass < 0.999:
        warnings.warn(
            f"nominal mass {mass:.4f} < 1 (grid truncation); proceeding", stacklevel=2
        )
    lower = nominal.scaled(spec.lower_factor)
    if quadrature(lower) > 1.0 + 1e-9:
        raise InfeasibleBandError(
            f"lower factor {spec.lower_factor} puts mass above 1"
        )
    if spec.upper_factor is None:
        upper = None
    else:
        upper = nominal.scaled(spec.upper_factor)
        if quadrature(upper) < 1.0 - 1e-9:
            raise InfeasibleBandError(
                f"upper factor {spec.upper_factor} leaves mass below 1"
            )
    return DensityBand(lower=lower, upper=upper, hypothesis=hypothesis)


def contains(band: DensityBand, q: DensityGrid, slack: float = CONTAINS_SLACK) -> bool:
    """True iff ``q`` runs inside the band corridor at every gridpoint."""
    require_same_grid(band.lower, q)
    if np.any(q.values < band.lower.values - slack):
        return False
    if band.upper is not None and np.any(q.values > band.upper.values + slack):
        return False
    return True

"""Nominal parametric intensity models and their maximum-likelihood fitting.

Clutter pixel intensities follow a Rayleigh law; target pixel intensities
follow a one-dimensional Gaussian mixture.  Both families are fitted from
training pixel sets and later discretized onto an :class:`IntensityGrid`
for the robust-detection machinery.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import DomainError, FitError, NumericInputError
from .grid import DensityGrid, IntensityGrid

_SIGMA_FLOOR = 1e-6


@dataclass(frozen=True)
class RayleighParams:
    """Scale parameter of the Rayleigh clutter density."""

    sigma0: float

    def __post_init__(self):
        if not (np.isfinite(self.sigma0) and self.sigma0 > 0):
            raise NumericInputError(f"sigma0 must be positive and finite, got {self.sigma0}")


@dataclass(frozen=True)
class GaussianMixtureParams:
    """Weights, means and standard deviations of a 1-D Gaussian mixture."""

    weights: tuple
    means: tuple
    sigmas: tuple

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        m = np.asarray(self.means, dtype=float)
        s = np.asarray(self.sigmas, dtype=float)
        if not (w.shape == m.shape == s.shape) or w.ndim != 1 or w.size < 1:
            raise NumericInputError("weights, means, sigmas must be 1-D and equally long")
        if np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-9:
            raise NumericInputError("weights must be positive and sum to 1")
        if np.any(s <= 0) or not np.all(np.isfinite(s)) or not np.all(np.isfinite(m)):
            raise NumericInputError("means must be finite and sigmas positive")
        object.__setattr__(self, "weights", tuple(float(v) for v in w))
        object.__setattr__(self, "means", tuple(float(v) for v in m))
        object.__setattr__(self, "sigmas", tuple(float(v) for v in s))

    @property
    def n_components(self) -> int:
        return len(self.weights)


@dataclass(frozen=True)
class NominalModel:
    """Fitted clutter (h0) and target (h1) densities."""

    h0: RayleighParams
    h1: GaussianMixtureParams


def rayleigh_pdf(params: RayleighParams, x) -> np.ndarray | float:
    """Rayleigh density ``x / s^2 * exp(-x^2 / (2 s^2))`` for ``x >= 0``."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise DomainError("rayleigh_pdf requires x >= 0")
    s2 = params.sigma0**2
    out = arr / s2 * np.exp(-(arr**2) / (2.0 * s2))
    return out if arr.ndim else float(out)


def gmm_pdf(params: GaussianMixtureParams, x) -> np.ndarray | float:
    """Mixture density ``sum_k w_k N(x | mu_k, sigma_k^2)``."""
    arr = np.asarray(x, dtype=float)
    out = np.zeros_like(arr)
    for w, mu, sg in zip(params.weights, params.means, params.sigmas):
        out += w * np.exp(-0.5 * ((arr - mu) / sg) ** 2) / (sg * np.sqrt(2.0 * np.pi))
    return out if arr.ndim else float(out)


def fit_rayleigh(samples: Sequence[float]) -> RayleighParams:
    """Maximum-likelihood Rayleigh fit: ``sigma0 = sqrt(mean(x^2) / 2)``."""
    arr = np.asarray(samples, dtype=float)
    if arr.size < 2:
        raise FitError(f"need at least 2 samples, got {arr.size}")
    if np.any(arr <= 0) or not np.all(np.isfinite(arr)):
        raise FitError("Rayleigh samples must be positive and finite")
    return RayleighParams(float(np.sqrt(np.mean(arr**2) / 2.0)))


def _gmm_log_likelihood(x: np.ndarray, w: np.ndarray, mu: np.ndarray, sg: np.ndarray):
    # log responsibilities: (n, K)
    log_comp = (
        np.log(w)
        - 0.5 * np.log(2.0 * np.pi)
        - np.log(sg)
        - 0.5 * ((x[:, None] - mu[None, :]) / sg[None, :]) ** 2
    )
    per_sample = logsumexp(log_comp, axis=1)
    return float(per_sample.sum()), log_comp - per_sample[:, None]


def _farthest_point_means(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    # k-means++-flavoured deterministic spread: random first centre, then
    # repeatedly take the sample farthest from the chosen set.
    means = [x[rng.integers(x.size)]]
    for _ in range(1, k):
        d = np.min(np.abs(x[:, None] - np.asarray(means)[None, :]), axis=1)
        means.append(x[int(np.argmax(d))])
    return np.asarray(means, dtype=float)


def fit_gmm(
    samples: Sequence[float],
    n_components: int,
    seed: int,
    max_restarts: int = 10,
    max_iter: int = 500,
    ll_tol: float = 1e-8,
) -> GaussianMixtureParams:
    """Fit a 1-D Gaussian mixture by expectation-maximization.

    Deterministic given ``seed``.  Runs up to ``max_restarts`` independent
    initializations; runs whose components collapse (sigma below 1e-6) are
    discarded and the best surviving log-likelihood wins.  Per-iteration
    log-likelihood monotonicity is asserted, which is the standard EM
    correctness check.
    """
    x = np.asarray(samples, dtype=float)
    k = int(n_components)
    if k < 1:
        raise FitError(f"n_components must be >= 1, got {k}")
    if x.size < 10 * k:
        raise FitError(f"need at least {10 * k} samples for K={k}, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise FitError("samples must be finite")

    rng = np.random.default_rng(seed)
    best = None
    best_ll = -np.inf
    for _ in range(max_restarts):
        mu = _farthest_point_means(x, k, rng)
        sg = np.full(k, max(float(np.std(x)), _SIGMA_FLOOR * 10))
        w = np.full(k, 1.0 / k)
        prev_ll = -np.inf
        collapsed = False
        for _ in range(max_iter):
            ll, log_resp = _gmm_log_likelihood(x, w, mu, sg)
            assert ll >= prev_ll - 1e-9 * max(1.0, abs(prev_ll)), "EM log-likelihood decreased"
            if ll - prev_ll < ll_tol and np.isfinite(prev_ll):
                break
            prev_ll = ll
            resp = np.exp(log_resp)
            nk = resp.sum(axis=0)
            if np.any(nk < 1e-12):
                collapsed = True
                break
            w = nk / x.size
            mu = resp.T @ x / nk
            var = (resp * (x[:, None] - mu[None, :]) ** 2).sum(axis=0) / nk
            sg = np.sqrt(var)
            if np.any(sg < _SIGMA_FLOOR):
                collapsed = True
                break
        if collapsed:
            continue
        if ll > best_ll:
            best_ll = ll
            best = (w.copy(), mu.copy(), sg.copy())
    if best is None:
        raise FitError(f"all {max_restarts} EM restarts collapsed")
    w, mu, sg = best
    order = np.argsort(mu)
    w, mu, sg = w[order], mu[order], sg[order]
    w = w / w.sum()
    return GaussianMixtureParams(tuple(w), tuple(mu), tuple(sg))


def to_grid(
    params: RayleighParams | GaussianMixtureParams, grid: IntensityGrid
) -> DensityGrid:
    """Evaluate a parametric density pointwise on ``grid``.

    The result is intentionally not renormalized: mass escaping the grid
    interval (Gaussian tails beyond [0, 1]) stays lost and is visible via
    ``DensityGrid.mass()``.
    """
    x = grid.points
    if isinstance(params, RayleighParams):
        values = rayleigh_pdf(params, np.maximum(x, 0.0))
    else:
        values = gmm_pdf(params, x)
    return DensityGrid(grid, values)


def reference_model() -> NominalModel:
    """Parameter set fitted from forward-looking GPR training imagery.

    Used by the demos and as the default model for synthetic scenes.  The
    published weights are rounded to three digits and sum to 0.999; they
    are rescaled here so the mixture is a proper density.
    """
    w = np.array([0.601, 0.212, 0.186])
    return NominalModel(
        h0=RayleighParams(0.025),
        h1=GaussianMixtureParams(
            weights=tuple(w / w.sum()),
            means=(0.117, 0.430, 0.833),
            sigmas=(0.050, 0.048, 0.088),
        ),
    )


def model_to_dict(model: NominalModel) -> dict:
    return {
        "h0": {"sigma0": model.h0.sigma0},
        "h1": {
            "weights": list(model.h1.weights),
            "means": list(model.h1.means),
            "sigmas": list(model.h1.sigmas),
        },
    }


def model_from_dict(doc: dict) -> NominalModel:
    try:
        h0 = RayleighParams(float(doc["h0"]["sigma0"]))
        h1 = GaussianMixtureParams(
            weights=tuple(doc["h1"]["weights"]),
            means=tuple(doc["h1"]["means"]),
            sigmas=tuple(doc["h1"]["sigmas"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise FitError(f"malformed model document: {exc}") from exc
    return NominalModel(h0=h0, h1=h1)


def save_model(model: NominalModel, path) -> None:
    with open(path, "w") as fh:
        json.dump(model_to_dict(model), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path) -> NominalModel:
    with open(path) as fh:
        return model_from_dict(json.load(fh))

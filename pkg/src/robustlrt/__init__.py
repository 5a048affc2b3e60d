"""Minimax robust likelihood-ratio detection for intensity rasters.

Library layout:

* :mod:`robustlrt.grid` -- uniform grids, quadrature, bisection
* :mod:`robustlrt.models` -- Rayleigh / Gaussian-mixture fitting
* :mod:`robustlrt.bands` -- envelope uncertainty sets
* :mod:`robustlrt.lfd` -- least favorable densities and the robust log-LR
* :mod:`robustlrt.detector` -- thresholding, fusion, scoring
* :mod:`robustlrt.training` -- region growing and training-set extraction
* :mod:`robustlrt.synth` -- synthetic multiview scenes with ground truth
* :mod:`robustlrt.pipeline` -- end-to-end assembly used by the CLI
"""

from .bands import BandKind, BandSpec, DensityBand, Hypothesis, build_band, contains
from .detector import (
    BinaryMask,
    DetectorSpec,
    EvalReport,
    Raster,
    calibrate_threshold,
    detect,
    evaluate,
    hard_fuse,
)
from .errors import (
    BracketError,
    CalibrationError,
    ConfigError,
    ConvergenceError,
    DomainError,
    FitError,
    GridMismatchError,
    InfeasibleBandError,
    InputError,
    NumericError,
    NumericInputError,
    RobustLrtError,
    SeedError,
    TrainingError,
)
from .grid import DensityGrid, IntensityGrid, bisect_root, l1_distance, quadrature
from .lfd import (
    LfdPair,
    LogLikelihoodRatio,
    LrCase,
    density_criterion,
    nominal_log_lr,
    robust_log_lr,
    solve_lfds,
)
from .models import (
    GaussianMixtureParams,
    NominalModel,
    RayleighParams,
    fit_gmm,
    fit_rayleigh,
    gmm_pdf,
    load_model,
    rayleigh_pdf,
    reference_model,
    save_model,
    to_grid,
)
from .pipeline import DetectorBundle, build_detector, detect_views, fit_from_scene
from .synth import SceneSpec, TargetSpec, generate, nine_target_layout, sigma_map, truth_mask
from .training import SeedPoint, TrainingSets, region_grow, split_training

__version__ = "0.1.0"

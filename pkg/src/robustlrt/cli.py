"""Command line front end.

Subcommands: fit, lfd, detect, synth, evaluate.  Each reads a JSON run
config (--config) whose relevant keys can be overridden by the global
flags.  Exit codes: 0 success, 2 input/config error, 3 numeric error.
Set ROBUST_LRT_LOG=debug|info|warning for verbosity.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import fileio
from .bands import BandSpec, Hypothesis, build_band
from .errors import ConfigError, InputError, RobustLrtError
from .grid import IntensityGrid
from .lfd import robust_log_lr, solve_lfds
from .models import NominalModel, fit_gmm, fit_rayleigh, load_model, save_model
from .pipeline import build_detector, detect_views
from .synth import SceneSpec, TargetSpec, generate, nine_target_layout
from .training import SeedPoint, region_grow, split_training

log = logging.getLogger("robustlrt")


def _setup_logging():
    level = os.environ.get("ROBUST_LRT_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _load_config(args) -> dict:
    if args.config is None:
        return {}
    if not Path(args.config).exists():
        raise ConfigError(f"config file not found: {args.config}")
    cfg = fileio.read_json(args.config)
    if not isinstance(cfg, dict):
        raise ConfigError("run config must be a JSON object")
    return cfg


def _grid_from(cfg: dict, args) -> IntensityGrid:
    n = args.grid_points or int(cfg.get("grid_points", 4096))
    return IntensityGrid(n_points=n)


def _band_spec_from(cfg: dict) -> BandSpec:
    return BandSpec.from_dict(cfg["band"]) if "band" in cfg else BandSpec()


def _model_from(cfg: dict) -> NominalModel:
    if "model" not in cfg:
        raise ConfigError("config needs a 'model' key (path to model JSON)")
    doc = cfg["model"]
    if isinstance(doc, str):
        if not Path(doc).exists():
            raise ConfigError(f"model file not found: {doc}")
        return load_model(doc)
    from .models import model_from_dict

    return model_from_dict(doc)


def _require(cfg: dict, key: str):
    if key not in cfg:
        raise ConfigError(f"config key '{key}' is required for this command")
    return cfg[key]


def cmd_fit(args) -> int:
    cfg = _load_config(args)
    training = _require(cfg, "training")
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    k = int(cfg.get("gmm_components", 3))
    if "raster" in training:
        raster = _read_raster_any(training["raster"])
        seeds = [SeedPoint(int(s["i"]), int(s["j"])) for s in training.get("seeds", [])]
        if not seeds:
            raise ConfigError("training.seeds must list at least one {i, j} seed")
        mask = region_grow(
            raster,
            seeds,
            band_db=float(training.get("band_db", 3.0)),
            db_factor=float(training.get("db_factor", 20.0)),
        )
        sets = split_training(raster, mask)
        targets, clutter = sets.targets, sets.clutter
    elif "target_csv" in training and "clutter_csv" in training:
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # empty files handled below
            targets = np.loadtxt(training["target_csv"], ndmin=1)
            clutter = np.loadtxt(training["clutter_csv"], ndmin=1)
        if targets.size == 0 or clutter.size == 0:
            raise InputError("training error: empty training CSV")
    else:
        raise ConfigError(
            "training config needs either 'raster'+'seeds' or 'target_csv'+'clutter_csv'"
        )
    model = NominalModel(h0=fit_rayleigh(clutter), h1=fit_gmm(targets, k, seed=seed))
    if "targets_csv_out" in cfg:
        np.savetxt(cfg["targets_csv_out"], np.asarray(targets))
    if "clutter_csv_out" in cfg:
        np.savetxt(cfg["clutter_csv_out"], np.asarray(clutter))
    out = cfg.get("model_out", "model.json")
    save_model(model, out)
    print(f"fitted on {clutter.size} clutter / {targets.size} target pixels")
    print(f"  clutter scale sigma0 = {model.h0.sigma0:.4f}")
    print("  component   weight      mean     sigma")
    for idx in range(model.h1.n_components):
        print(
            f"  {idx + 1:9d}   {model.h1.weights[idx]:.4f}    "
            f"{model.h1.means[idx]:.4f}    {model.h1.sigmas[idx]:.4f}"
        )
    print(f"model written to {out}")
    return 0


def cmd_lfd(args) -> int:
    cfg = _load_config(args)
    model = _model_from(cfg)
    grid = _grid_from(cfg, args)
    spec = _band_spec_from(cfg)
    delta = float(cfg.get("delta", 0.001))
    from .models import to_grid

    band0 = build_band(to_grid(model.h0, grid), spec, Hypothesis.H0)
    band1 = build_band(to_grid(model.h1, grid), spec, Hypothesis.H1)
    pair = solve_lfds(band0, band1, delta=delta)
    llr = robust_log_lr(pair, band0, band1)
    lfd_out = cfg.get("lfd_out", "lfd.json")
    pair.save(lfd_out)
    csv_out = cfg.get("llr_csv", "log_lr.csv")
    llr.to_csv(csv_out)
    print(f"converged in {pair.iterations} sweeps")
    print(f"  multipliers a0 = {pair.a0:.6f}, a1 = {pair.a1:.6f}")
    if pair.a0 > 0 and pair.a1 > 0:
        lo_clip = min(np.log(pair.a1), -np.log(pair.a0))
        hi_clip = max(np.log(pair.a1), -np.log(pair.a0))
        print(f"  clip levels: lower {lo_clip:+.4f}, upper {hi_clip:+.4f}")
    else:
        print("  clip levels: none (degenerate corridor)")
    print(f"artifacts: {lfd_out}, {csv_out}")
    return 0


def _read_raster_any(path: str):
    if not Path(path).exists():
        raise InputError(f"raster file not found: {path}")
    if str(path).endswith(".csv"):
        return fileio.read_raster_csv(path)
    return fileio.read_raster(path)


def cmd_detect(args) -> int:
    cfg = _load_config(args)
    model = _model_from(cfg)
    grid = _grid_from(cfg, args)
    alpha = args.alpha if args.alpha is not None else float(cfg.get("alpha", 0.05))
    kind = cfg.get("detector", "band")
    spec = _band_spec_from(cfg) if kind != "parametric" else None
    raster_paths = _require(cfg, "rasters")
    if not isinstance(raster_paths, list) or not raster_paths:
        raise ConfigError("'rasters' must be a non-empty list of paths")
    views = [_read_raster_any(p) for p in raster_paths]
    shapes = {v.pixels.shape for v in views}
    if len(shapes) != 1:
        raise InputError(f"views disagree on dimensions: {sorted(shapes)}")
    truth = fileio.read_mask_pgm(cfg["truth"]) if "truth" in cfg else None
    if truth is not None and truth.bits.shape != views[0].pixels.shape:
        raise InputError("truth mask dimensions do not match the rasters")
    count_unit = args.count_unit or cfg.get("count_unit", "region")

    bundle = build_detector(
        model, kind, alpha, grid=grid, band_spec=spec, delta=float(cfg.get("delta", 0.001))
    )
    masks, fused, report = detect_views(views, bundle, truth, count_unit)

    out_dir = Path(cfg.get("out_dir", "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    for idx, mask in enumerate(masks):
        fileio.write_mask_pgm(out_dir / f"mask_view{idx:02d}.pgm", mask)
    fileio.write_mask_pgm(out_dir / "mask_fused.pgm", fused)
    doc = {
        "detector": kind,
        "alpha": alpha,
        "ln_gamma": bundle.spec.ln_gamma,
        "calibrated_on": bundle.calibrated_on,
        "views": len(views),
        "fused_pixels": fused.count(),
    }
    if report is not None:
        doc.update(report.to_dict())
    fileio.write_json(out_dir / "report.json", doc)
    if report is not None:
        print(f"{kind}: FA={report.fa_count} MD={report.md_count} ({count_unit} counts)")
    else:
        print(f"{kind}: fused mask has {fused.count()} set pixels")
    print(f"artifacts in {out_dir}")
    return 0


def _scene_from(cfg: dict, args) -> SceneSpec:
    doc = dict(cfg.get("scene", {}))
    if args.seed is not None:
        doc["seed"] = args.seed
    targets = doc.pop("targets", "nine")
    width = int(doc.pop("width", 192))
    height = int(doc.pop("height", 128))
    if targets == "nine":
        targets = nine_target_layout(width, height)
    else:
        targets = tuple(
            TargetSpec(
                i=int(t["i"]),
                j=int(t["j"]),
                radius=int(t.get("radius", 3)),
                component=t.get("component"),
            )
            for t in targets
        )
    from .models import RayleighParams

    clutter = RayleighParams(float(doc.pop("clutter_sigma0", 0.025)))
    known = {"layout", "high_factor", "views", "seed"}
    extra = set(doc) - known
    if extra:
        raise ConfigError(f"unknown scene keys: {sorted(extra)}")
    return SceneSpec(
        width=width,
        height=height,
        targets=targets,
        clutter=clutter,
        layout=doc.get("layout", "low"),
        high_factor=float(doc.get("high_factor", 1.8)),
        views=int(doc.get("views", 11)),
        seed=int(doc.get("seed", 0)),
    )


def cmd_synth(args) -> int:
    cfg = _load_config(args)
    spec = _scene_from(cfg, args)
    views, truth = generate(spec)
    out_dir = Path(cfg.get("out_dir", "scene"))
    out_dir.mkdir(parents=True, exist_ok=True)
    for idx, view in enumerate(views):
        fileio.write_raster(out_dir / f"view{idx:02d}.rlrt", view)
    fileio.write_mask_pgm(out_dir / "truth.pgm", truth)
    print(f"wrote {len(views)} views ({spec.width}x{spec.height}, layout={spec.layout}) to {out_dir}")
    return 0


def cmd_evaluate(args) -> int:
    cfg = _load_config(args)
    from .detector import evaluate as score

    fused = fileio.read_mask_pgm(_require(cfg, "fused"))
    truth = fileio.read_mask_pgm(_require(cfg, "truth"))
    count_unit = args.count_unit or cfg.get("count_unit", "region")
    report = score(fused, truth, count_unit)
    out = cfg.get("report_out")
    if out:
        fileio.write_json(out, report.to_dict())
    print(f"FA={report.fa_count} MD={report.md_count} ({count_unit} counts)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    # the global flags live on a parent parser attached to the root and to
    # every subcommand, so they are accepted on either side; SUPPRESS keeps
    # a flag given before the subcommand from being reset to a default
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", default=argparse.SUPPRESS, help="path to run-config JSON")
    shared.add_argument(
        "--seed", type=int, default=argparse.SUPPRESS, help="override config seed"
    )
    shared.add_argument(
        "--grid-points",
        type=int,
        default=argparse.SUPPRESS,
        help="intensity grid resolution",
    )
    shared.add_argument(
        "--alpha",
        type=float,
        default=argparse.SUPPRESS,
        help="targeted false alarm probability",
    )
    shared.add_argument(
        "--count-unit",
        choices=("region", "pixel"),
        default=argparse.SUPPRESS,
        help="FA/MD counting unit",
    )
    parser = argparse.ArgumentParser(
        prog="robust-lrt",
        description="Minimax robust likelihood-ratio detection pipeline",
        parents=[shared],
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, text in (
        ("fit", cmd_fit, "fit nominal densities from training data"),
        ("lfd", cmd_lfd, "solve least favorable densities"),
        ("detect", cmd_detect, "run multiview detection"),
        ("synth", cmd_synth, "generate a synthetic scene"),
        ("evaluate", cmd_evaluate, "score a fused mask against truth"),
    ):
        sub.add_parser(name, help=text, parents=[shared]).set_defaults(func=func)
    return parser


class _Args:
    """Parsed flags with None for anything not given."""

    def __init__(self, namespace):
        for flag in ("config", "seed", "grid_points", "alpha", "count_unit", "func"):
            setattr(self, flag, getattr(namespace, flag, None))


def main(argv=None) -> int:
    _setup_logging()
    args = _Args(build_parser().parse_args(argv))
    try:
        return args.func(args)
    except RobustLrtError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())

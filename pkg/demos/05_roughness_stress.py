"""Model mismatch stress test across ground-roughness tiers.

All detectors are trained on low-roughness clutter, then evaluated on
scenes whose clutter is progressively rougher than anything seen in
training.  The parametric detector's false alarms grow quickly with the
mismatch while the robust detectors degrade gently -- the design goal of
building the test on least favorable densities instead of point
estimates.
"""

import warnings

import numpy as np

import robustlrt as r
from robustlrt.pipeline import build_detector, fa_region_counts, fit_from_scene
from robustlrt.synth import SceneSpec, nine_target_layout

warnings.filterwarnings("ignore", message="nominal mass")  # mixture tail truncation

ALPHA = 0.05
SEEDS = range(12)


def main():
    targets = nine_target_layout()
    model = fit_from_scene(SceneSpec(targets=targets, layout="low", seed=777))
    detectors = [
        build_detector(model, "parametric", ALPHA),
        build_detector(model, "band", ALPHA),
        build_detector(model, "outlier", ALPHA, band_spec=r.BandSpec.outlier(0.3)),
    ]
    print(f"trained on low roughness; alpha = {ALPHA}; {len(list(SEEDS))} scene redraws per tier\n")
    print("median false-alarm regions after 11-view fusion:")
    print(f"  {'tier':8s} {'parametric':>11s} {'band':>7s} {'outlier':>8s}")
    for layout in ("low", "mixed", "high"):
        scene = SceneSpec(targets=targets, layout=layout, high_factor=2.2)
        counts = fa_region_counts(detectors, scene, seeds=SEEDS)
        med = {k: np.median(v) for k, v in counts.items()}
        print(f"  {layout:8s} {med['parametric']:11.1f} {med['band']:7.1f} {med['outlier']:8.1f}")
    print("\nmatched clutter fuses away under every detector; under mismatch")
    print("the wider the uncertainty model, the fewer clutter regions survive.")


if __name__ == "__main__":
    main()

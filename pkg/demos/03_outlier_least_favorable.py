"""Contamination (outlier) uncertainty and its clipped statistic.

With an unbounded upper envelope, a fraction eps of pixels may follow any
distribution whatsoever.  The resulting robust statistic is the nominal
log-likelihood ratio hard-clipped between two constants; this script
shows the clip levels, the narrow window where the nominal ratio
survives, and how the least favorable pair collapses onto a single
density as the contamination grows.
"""

import warnings

import numpy as np

import robustlrt as r

warnings.filterwarnings("ignore", message="nominal mass")  # mixture tail truncation


def solve_for(eps, p0, p1):
    spec = r.BandSpec.outlier(eps)
    b0 = r.build_band(p0, spec, r.Hypothesis.H0)
    b1 = r.build_band(p1, spec, r.Hypothesis.H1)
    pair = r.solve_lfds(b0, b1, delta=1e-6)
    return pair, b0, b1


def main():
    model = r.reference_model()
    grid = r.IntensityGrid(4096)
    p0, p1 = r.to_grid(model.h0, grid), r.to_grid(model.h1, grid)

    pair, b0, b1 = solve_for(0.4, p0, p1)
    llr = r.robust_log_lr(pair, b0, b1)
    print("contamination 40%:")
    print(f"  clip levels {np.log(pair.a1):+.4f} / {-np.log(pair.a0):+.4f}")
    x = grid.points
    nominal_zone = np.where((llr.cases == r.LrCase.RATIO_LL) & (p0.values > 1e-10))[0]
    runs = np.split(nominal_zone, np.where(np.diff(nominal_zone) > 1)[0] + 1)
    main_run = max(runs, key=len)
    print(
        "  nominal ratio survives only on "
        f"[{x[main_run[0]]:.4f}, {x[main_run[-1]]:.4f}]; everywhere else"
    )
    print("  the statistic is pinned to a clip level")

    print("\nleast-favorable overlap as contamination grows")
    print("  (L1 distance between the two least favorable densities):")
    for eps in (0.15, 0.25, 0.35, 0.40, 0.45):
        pair, _, _ = solve_for(eps, p0, p1)
        dist = r.l1_distance(pair.g0, pair.g1)
        bar = "#" * int(round(dist * 40))
        print(f"  eps={eps:.2f}: {dist:6.3f} {bar}")
    print("\npast ~0.46 the corridors admit a common density and the pair")
    print("collapses outright: the hypotheses stop being distinguishable.")


if __name__ == "__main__":
    main()

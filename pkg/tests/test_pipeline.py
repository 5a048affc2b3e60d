import numpy as np
import pytest

import robustlrt as r
from robustlrt.pipeline import build_detector, detect_views, fit_from_scene
from robustlrt.synth import SceneSpec, TargetSpec, generate, nine_target_layout


@pytest.fixture(scope="module")
def fitted_model():
    spec = SceneSpec(targets=nine_target_layout(), layout="low", seed=777)
    return fit_from_scene(spec)


class TestBuildDetector:
    def test_parametric(self, fitted_model):
        b = build_detector(fitted_model, "parametric", 0.05)
        assert b.calibrated_on == "nominal"
        assert b.lfd is None

    def test_band_calibrates_on_lfd(self, fitted_model):
        b = build_detector(fitted_model, "band", 0.05)
        assert b.calibrated_on == "lfd"
        assert b.lfd is not None and b.lfd.converged

    def test_outlier_falls_back_to_plateau(self, fitted_model):
        b = build_detector(fitted_model, "outlier", 0.05)
        assert b.calibrated_on == "lfd_plateau"
        # threshold sits just below the statistic's top level
        top = np.nanmax(b.spec.log_lr.values)
        assert b.spec.ln_gamma < top

    def test_unknown_kind(self, fitted_model):
        with pytest.raises(r.ConfigError):
            build_detector(fitted_model, "magic", 0.05)

    def test_rejection_regions_nested(self, fitted_model):
        # robust detectors fire on subsets of the parametric rejection set;
        # at 40% contamination the outlier region sits within a grid step
        # of the band region, so the clean outlier-inside-band nesting is
        # checked at a moderate contamination
        g = r.IntensityGrid()
        par = build_detector(fitted_model, "parametric", 0.05, grid=g)
        band = build_detector(fitted_model, "band", 0.05, grid=g)
        outl04 = build_detector(fitted_model, "outlier", 0.05, grid=g)
        outl03 = build_detector(
            fitted_model, "outlier", 0.05, grid=g, band_spec=r.BandSpec.outlier(0.3)
        )
        x = np.linspace(0.0, 1.0, 20001)
        fire = {
            name: b.spec.log_lr.evaluate(x) > b.spec.ln_gamma
            for name, b in (
                ("par", par), ("band", band), ("o4", outl04), ("o3", outl03),
            )
        }
        assert np.all(fire["band"] <= fire["par"])
        assert np.all(fire["o4"] <= fire["par"])
        assert np.all(fire["o3"][x > 0.01] <= fire["band"][x > 0.01])


class TestDetectViews:
    def test_single_view_equals_fused(self, fitted_model):
        spec = SceneSpec(width=64, height=48, targets=(TargetSpec(20, 20, 4),), views=1, seed=3)
        views, truth = generate(spec)
        bundle = build_detector(fitted_model, "parametric", 0.05)
        masks, fused, report = detect_views(views, bundle, truth)
        assert len(masks) == 1
        assert np.array_equal(masks[0].bits, fused.bits)
        assert report is not None

    def test_fusion_prunes_single_view_alarms(self, fitted_model):
        spec = SceneSpec(width=96, height=64, targets=(TargetSpec(30, 40, 5),), views=7, seed=4)
        views, truth = generate(spec)
        bundle = build_detector(fitted_model, "parametric", 0.1)
        masks, fused, report = detect_views(views, bundle, truth)
        assert fused.count() <= min(m.count() for m in masks)
        # the disc survives fusion
        assert report.md_count == 0

    def test_subclutter_constant_raster_yields_no_detections(self, fitted_model):
        # constant raster at a bulk-clutter intensity: nothing fires, so
        # zero false alarms and every target is missed
        spec = SceneSpec(width=40, height=30, targets=(TargetSpec(10, 10, 3), TargetSpec(20, 30, 3)), views=2, seed=5)
        _, truth = generate(spec)
        flat = [r.Raster(np.full((30, 40), 0.02)) for _ in range(2)]
        for kind in ("parametric", "band", "outlier"):
            bundle = build_detector(fitted_model, kind, 0.05)
            _, fused, report = detect_views(flat, bundle, truth)
            assert fused.count() == 0
            assert report.fa_count == 0
            assert report.md_count == 2


class TestFitFromScene:
    def test_recovers_generating_parameters(self, fitted_model):
        assert fitted_model.h0.sigma0 == pytest.approx(0.025, abs=0.002)
        ref = r.reference_model().h1
        for k in range(3):
            assert fitted_model.h1.means[k] == pytest.approx(ref.means[k], abs=0.02)

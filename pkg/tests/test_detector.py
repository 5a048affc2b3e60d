import numpy as np
import pytest

import robustlrt as r
from robustlrt import (
    BinaryMask,
    CalibrationError,
    DetectorSpec,
    InputError,
    IntensityGrid,
    LogLikelihoodRatio,
    Raster,
    calibrate_threshold,
    detect,
    evaluate,
    hard_fuse,
)
from robustlrt.detector import exact_fa_mass, top_plateau_threshold
from robustlrt.lfd import LrCase
from conftest import uniform_density


def identity_llr(grid):
    cases = np.full(grid.n_points, LrCase.RATIO_LL, dtype=np.int8)
    return LogLikelihoodRatio(grid=grid, values=grid.points.copy(), cases=cases)


def sample_from(density, n, seed):
    """Atomic draws from a gridded density (gridpoint masses)."""
    w = density.grid.trapezoid_weights * density.values
    cdf = np.cumsum(w / w.sum())
    rng = np.random.default_rng(seed)
    idx = np.searchsorted(cdf, rng.random(n))
    return density.grid.points[idx]


class TestCalibration:
    def test_monotone_statistic_uniform_density(self):
        # P(X > g) = 1 - g under the uniform law, so the 5% point is 0.95
        g = IntensityGrid(4096)
        got = calibrate_threshold(identity_llr(g), uniform_density(g), 0.05)
        assert got == pytest.approx(0.95, abs=g.spacing)

    def test_alpha_one_returns_bottom_level(self):
        g = IntensityGrid(512)
        got = calibrate_threshold(identity_llr(g), uniform_density(g), 1.0)
        assert got == g.points[0]

    def test_constant_statistic_raises(self):
        g = IntensityGrid(256)
        cases = np.full(g.n_points, LrCase.CLIP_A1, dtype=np.int8)
        flat = LogLikelihoodRatio(grid=g, values=np.full(g.n_points, 0.7), cases=cases)
        with pytest.raises(CalibrationError, match="0.7"):
            calibrate_threshold(flat, uniform_density(g), 0.05)

    def test_threshold_monotone_in_alpha(self):
        g = IntensityGrid(1024)
        llr = identity_llr(g)
        h0 = uniform_density(g)
        thresholds = [calibrate_threshold(llr, h0, a) for a in (0.01, 0.05, 0.1, 0.5)]
        assert all(t1 >= t2 for t1, t2 in zip(thresholds, thresholds[1:]))

    def test_tightness(self, band_solution):
        # mass above the returned threshold is <= alpha; one level lower
        # would overshoot
        pair, b0, b1 = band_solution
        llr = r.robust_log_lr(pair, b0, b1)
        for alpha in (0.02, 0.05, 0.2):
            t = calibrate_threshold(llr, pair.g0, alpha)
            assert exact_fa_mass(llr, pair.g0, t) <= alpha + 1e-12
            levels = np.unique(llr.values[~np.isnan(llr.values)])
            below = levels[levels < t]
            if below.size:
                assert exact_fa_mass(llr, pair.g0, float(below[-1])) > alpha

    def test_plateau_excluded_atomically(self, outlier_solution):
        # under the least favorable clutter the whole top plateau exceeds
        # any small alpha, so the threshold lands on the plateau itself
        # and the test never fires
        pair, b0, b1 = outlier_solution
        llr = r.robust_log_lr(pair, b0, b1)
        t = calibrate_threshold(llr, pair.g0, 0.05)
        assert t == pytest.approx(-np.log(pair.a0))
        assert exact_fa_mass(llr, pair.g0, t) == 0.0

    def test_top_plateau_threshold(self, outlier_solution):
        pair, b0, b1 = outlier_solution
        llr = r.robust_log_lr(pair, b0, b1)
        t = top_plateau_threshold(llr, pair.g0)
        assert t < -np.log(pair.a0)
        fire = llr.values > t
        assert np.all(llr.values[fire] == pytest.approx(-np.log(pair.a0)))

    def test_monte_carlo_agreement(self):
        # 1e6 atomic draws from the calibration density: empirical rate
        # stays within the binomial 3-sigma band around alpha
        g = IntensityGrid(4096)
        llr = identity_llr(g)
        h0 = uniform_density(g)
        for alpha in (0.05, 0.2):
            t = calibrate_threshold(llr, h0, alpha)
            x = sample_from(h0, 1_000_000, seed=99)
            emp = float(np.mean(llr.evaluate(x) > t))
            assert abs(emp - alpha) <= 3 * np.sqrt(alpha * (1 - alpha) / 1e6) + g.spacing


class TestDetect:
    @pytest.fixture()
    def simple_spec(self):
        g = IntensityGrid(1024)
        return DetectorSpec(log_lr=identity_llr(g), ln_gamma=0.5, alpha=0.05)

    def test_subthreshold_raster_is_all_zero(self, simple_spec):
        mask = detect(Raster(np.full((6, 7), 0.2)), simple_spec)
        assert mask.count() == 0

    def test_single_hot_pixel(self, simple_spec):
        img = np.full((5, 5), 0.2)
        img[2, 3] = 0.9
        mask = detect(Raster(img), simple_spec)
        assert mask.count() == 1
        assert bool(mask.bits[2, 3])

    def test_raising_threshold_never_adds_bits(self, simple_spec):
        rng = np.random.default_rng(0)
        raster = Raster(rng.random((32, 32)))
        lo = detect(raster, simple_spec)
        hi = detect(
            raster,
            DetectorSpec(log_lr=simple_spec.log_lr, ln_gamma=0.8, alpha=0.05),
        )
        assert np.all(hi.bits <= lo.bits)

    def test_pixel_out_of_range_rejected(self):
        with pytest.raises(InputError):
            Raster(np.array([[0.5, 1.2]]))
        with pytest.raises(InputError):
            Raster(np.array([[-0.1, 0.5]]))

    def test_binomial_concentration(self, simple_spec):
        g = simple_spec.log_lr.grid
        h0 = uniform_density(g)
        alpha = 0.05
        t = calibrate_threshold(simple_spec.log_lr, h0, alpha)
        spec = DetectorSpec(log_lr=simple_spec.log_lr, ln_gamma=t, alpha=alpha)
        x = sample_from(h0, 1_000_000, seed=5).reshape(1000, 1000)
        mask = detect(Raster(x), spec)
        rate = mask.count() / x.size
        assert abs(rate - alpha) <= 3 * np.sqrt(alpha * (1 - alpha) / x.size) + g.spacing


class TestHardFuse:
    def test_identity_and_absorbing(self):
        ones = BinaryMask(np.ones((4, 4), dtype=bool))
        hole = np.ones((4, 4), dtype=bool)
        hole[1, 2] = False
        fused = hard_fuse([ones, BinaryMask(hole), ones])
        assert not fused.bits[1, 2]
        assert fused.count() == 15
        assert hard_fuse([ones, ones]).count() == 16

    def test_single_mask_identity(self):
        rng = np.random.default_rng(1)
        m = BinaryMask(rng.random((8, 8)) < 0.5)
        assert np.array_equal(hard_fuse([m]).bits, m.bits)

    def test_semilattice_laws(self):
        rng = np.random.default_rng(2)
        a, b, c = (BinaryMask(rng.random((16, 16)) < 0.5) for _ in range(3))
        ab = hard_fuse([a, b])
        ba = hard_fuse([b, a])
        assert np.array_equal(ab.bits, ba.bits)
        assert np.array_equal(
            hard_fuse([ab, c]).bits, hard_fuse([a, hard_fuse([b, c])]).bits
        )
        assert np.array_equal(hard_fuse([a, a]).bits, a.bits)

    def test_bernoulli_product_rate(self):
        # three independent Bernoulli(0.2) masks AND to rate 0.2^3
        rng = np.random.default_rng(3)
        masks = [BinaryMask(rng.random((1000, 1000)) < 0.2) for _ in range(3)]
        rate = hard_fuse(masks).count() / 1e6
        assert rate == pytest.approx(0.008, abs=0.001)

    def test_dimension_mismatch(self):
        with pytest.raises(InputError):
            hard_fuse(
                [BinaryMask(np.ones((3, 3), bool)), BinaryMask(np.ones((3, 4), bool))]
            )
        with pytest.raises(InputError):
            hard_fuse([])


class TestEvaluate:
    def test_perfect_detection(self):
        bits = np.zeros((10, 10), dtype=bool)
        bits[2:4, 2:4] = True
        bits[7:9, 6:9] = True
        mask = BinaryMask(bits)
        report = evaluate(mask, mask)
        assert (report.fa_count, report.md_count) == (0, 0)
        assert all(det for _, det in report.per_target)

    def test_total_miss(self):
        truth = np.zeros((12, 40), dtype=bool)
        for k in range(9):
            truth[4:6, 4 * k + 1 : 4 * k + 3] = True
        report = evaluate(BinaryMask(np.zeros_like(truth)), BinaryMask(truth))
        assert (report.fa_count, report.md_count) == (0, 9)

    def test_hand_counted_fixture(self):
        # one overlapping blob, one spurious blob, one missed blob
        truth = np.zeros((8, 8), dtype=bool)
        truth[1:3, 1:3] = True  # detected
        truth[5:7, 5:7] = True  # missed
        fused = np.zeros((8, 8), dtype=bool)
        fused[2:4, 2:4] = True  # overlaps first target
        fused[6:8, 0:2] = True  # spurious
        report = evaluate(BinaryMask(fused), BinaryMask(truth))
        assert (report.fa_count, report.md_count) == (1, 1)
        assert [det for _, det in report.per_target] == [True, False]

    def test_pixel_count_unit(self):
        truth = np.zeros((4, 4), dtype=bool)
        truth[0, 0] = True
        fused = np.zeros((4, 4), dtype=bool)
        fused[3, 3] = True
        fused[3, 2] = True
        report = evaluate(BinaryMask(fused), BinaryMask(truth), count_unit="pixel")
        assert (report.fa_count, report.md_count) == (2, 1)
        assert report.count_unit == "pixel"

    def test_eight_connectivity(self):
        # diagonal neighbours merge into a single region
        fused = np.zeros((5, 5), dtype=bool)
        fused[0, 0] = fused[1, 1] = fused[2, 2] = True
        report = evaluate(BinaryMask(fused), BinaryMask(np.zeros((5, 5), bool)))
        assert report.fa_count == 1

    def test_shape_mismatch(self):
        with pytest.raises(InputError):
            evaluate(BinaryMask(np.ones((3, 3), bool)), BinaryMask(np.ones((4, 3), bool)))

    def test_report_dict_schema(self):
        truth = np.zeros((4, 4), dtype=bool)
        truth[1, 1] = True
        doc = evaluate(BinaryMask(truth), BinaryMask(truth)).to_dict()
        assert set(doc) == {"fa_count", "md_count", "count_unit", "per_target"}
        assert doc["per_target"] == [{"id": 1, "detected": True}]

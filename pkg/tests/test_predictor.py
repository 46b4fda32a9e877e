import unittest

import numpy as np

from livesim.predictor import (CodingBitratePredictor, ColdStartError, KamaPredictor, KamaState,
                               ThroughputEstimator, efficiency_ratio, estimate_throughput, evaluate_prediction,
                               kama_update, prediction_error, scale_actual_bitrates, smoothing_bounds,
                               smoothing_factor)
from livesim.traces import BUNDLED_VIDEO, load_video_trace


class TestScaleActualBitrates(unittest.TestCase):
    def test_two_levels(self):
        np.testing.assert_allclose(scale_actual_bitrates([1000e3, 2000e3], 0, 1100e3), [1100e3, 2200e3],
                                   rtol=1e-12)

    def test_identity(self):
        self.assertEqual(scale_actual_bitrates([500e3, 850e3], 1, 777.5e3)[1], 777.5e3)

    def test_ladder(self):
        scaled = scale_actual_bitrates([500, 850, 1200, 1850], 2, 1500)
        np.testing.assert_allclose(scaled, [625, 1062.5, 1500, 2312.5], rtol=1e-12)
        self.assertTrue(np.all(np.diff(scaled) > 0))

    def test_coding_observation_is_exact(self):
        ladder = [500e3, 850e3, 1200e3, 1850e3]
        for level in range(4):
            np.testing.assert_array_equal(scale_actual_bitrates(ladder, level, ladder[level]), ladder)


class TestEfficiencyRatio(unittest.TestCase):
    def test_monotone(self):
        self.assertEqual(efficiency_ratio([1., 2., 4., 7.]), 1.)

    def test_alternating(self):
        self.assertEqual(efficiency_ratio([5., 9., 5.]), 0.)

    def test_hand_value(self):
        self.assertAlmostEqual(efficiency_ratio([100., 110., 105.]), 1. / 3, places=12)

    def test_constant(self):
        self.assertEqual(efficiency_ratio([3., 3., 3.]), 1.)

    def test_insufficient(self):
        with self.assertRaises(ValueError):
            efficiency_ratio([1.])


class TestSmoothingFactor(unittest.TestCase):
    def test_bounds(self):
        slowest, fastest = smoothing_bounds(30, 2)
        self.assertEqual(smoothing_factor(0., 30, 2), slowest ** 2)
        self.assertAlmostEqual(smoothing_factor(1., 30, 2), fastest ** 2, places=15)

    def test_hand_value(self):
        expected = (1. / 3 * (2. / 3 - 2. / 31) + 2. / 31) ** 2
        self.assertAlmostEqual(smoothing_factor(1. / 3, 30, 2), expected, places=12)


class TestKama(unittest.TestCase):
    def test_constant_stream(self):
        # a constant window has ER = 1, so the gap shrinks by 1 - (2/3)^2 = 5/9 per sample
        state = KamaState(1000., n_1=3)
        for k in range(1, 21):
            kama_update(state, 1200.)
            self.assertLess(state.prediction, 1200.)
            self.assertAlmostEqual(1200. - state.prediction, 200. * (5. / 9) ** k, delta=1e-9)
        for _ in range(60):
            kama_update(state, 1200.)
        self.assertAlmostEqual(state.prediction, 1200., places=9)

        state = KamaState(1200., n_1=3)
        for _ in range(20):
            self.assertEqual(kama_update(state, 1200.), 1200.)

    def test_factor_one(self):
        """l_min = 1 gives SC_fastest = 1: the prediction jumps to the sample"""
        state = KamaState(0., l_max=30, l_min=1, n_1=2)
        for sample in [10., 20., 30., 45.]:
            self.assertAlmostEqual(kama_update(state, sample), sample, places=9)

    def test_hand_stream(self):
        """100, 110, 105 with N_1 = 2, started from the first sample"""
        slowest, fastest = 2. / 31, 2. / 3
        state = KamaState(100., l_max=30, l_min=2, n_1=2)
        expected = 100.
        for sample in [100., 110.]:
            expected += fastest ** 2 * (sample - expected)  # cold start
            kama_update(state, sample)
        factor = (1. / 3 * (fastest - slowest) + slowest) ** 2
        expected += factor * (105. - expected)
        self.assertAlmostEqual(kama_update(state, 105.), expected, places=9)
        self.assertAlmostEqual(state.last_factor, factor, places=12)

    def test_random_properties(self):
        rng = np.random.default_rng(42)
        slowest, fastest = smoothing_bounds(30, 2)
        for _ in range(10000):
            history = rng.uniform(100, 3000, size=rng.integers(2, 12))
            er = efficiency_ratio(history)
            self.assertTrue(0. <= er <= 1.)
            factor = smoothing_factor(er, 30, 2)
            self.assertTrue(slowest ** 2 - 1e-15 <= factor <= fastest ** 2 + 1e-15)

        state = KamaState(1000., n_1=4)
        for _ in range(10000):
            previous = state.prediction
            sample = rng.uniform(100, 3000)
            updated = kama_update(state, sample)
            self.assertTrue(min(previous, sample) - 1e-9 <= updated <= max(previous, sample) + 1e-9)

    def test_invalid_parameters(self):
        with self.assertRaises(ValueError):
            KamaState(1., l_max=2, l_min=2)
        with self.assertRaises(ValueError):
            KamaState(1., n_1=0)


class TestPredictors(unittest.TestCase):
    def test_cold_start(self):
        ladder = [500e3, 850e3, 1200e3, 1850e3]
        np.testing.assert_array_equal(KamaPredictor(ladder).predictions(), ladder)

    def test_kama_moves_every_level(self):
        ladder = [500e3, 1000e3]
        predictor = KamaPredictor(ladder)
        predictions = predictor.update(0, 400e3)
        self.assertLess(predictions[0], 500e3)
        self.assertLess(predictions[1], 1000e3)
        self.assertAlmostEqual(predictions[1] / predictions[0], 2., places=9)

    def test_coding_predictor(self):
        ladder = [500e3, 1000e3]
        predictor = CodingBitratePredictor(ladder)
        np.testing.assert_array_equal(predictor.update(0, 400e3), ladder)


class TestThroughput(unittest.TestCase):
    def test_cold_start(self):
        with self.assertRaises(ColdStartError):
            estimate_throughput(ThroughputEstimator())

    def test_single(self):
        estimator = ThroughputEstimator()
        estimator.add(1.3e6)
        self.assertEqual(estimate_throughput(estimator), 1.3e6)

    def test_constant(self):
        estimator = ThroughputEstimator()
        for _ in range(3):
            estimator.add(1e6)
        self.assertAlmostEqual(estimate_throughput(estimator), 1e6)

    def test_weighted(self):
        estimator = ThroughputEstimator()
        for sample in [1e6, 2e6, 3e6]:
            estimator.add(sample)
        self.assertAlmostEqual(estimate_throughput(estimator), 14e6 / 6, places=3)

    def test_window(self):
        estimator = ThroughputEstimator(window=2)
        for sample in [9e6, 1e6, 2e6]:
            estimator.add(sample)
        self.assertEqual(len(estimator), 2)
        self.assertAlmostEqual(estimate_throughput(estimator), 5e6 / 3, places=3)

    def test_within_range(self):
        rng = np.random.default_rng(5)
        estimator = ThroughputEstimator()
        for _ in range(200):
            estimator.add(rng.uniform(1e5, 5e6))
            estimate = estimate_throughput(estimator)
            self.assertTrue(min(estimator.samples) - 1e-6 <= estimate <= max(estimator.samples) + 1e-6)


class TestPredictionError(unittest.TestCase):
    def test_values(self):
        self.assertEqual(prediction_error(1000., 1000.), 0.)
        self.assertAlmostEqual(prediction_error(1220., 1000.), 0.22, places=12)
        self.assertAlmostEqual(prediction_error(1258., 1000.), 0.258, places=12)

    def test_kama_beats_coding_bitrates(self):
        video = load_video_trace(BUNDLED_VIDEO)
        kama_error, coding_error = evaluate_prediction(video)
        self.assertLess(kama_error, coding_error)


if __name__ == '__main__':
    unittest.main()

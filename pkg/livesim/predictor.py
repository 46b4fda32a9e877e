"""Segment bitrate prediction and throughput estimation.

The actual bitrate of a segment is only observed at the level it was
downloaded at; the other levels are estimated by scaling with the ratio of
coding bitrates. Each level's stream of (observed or scaled) bitrates feeds a
Kaufman adaptive moving average whose smoothing factor follows the
efficiency ratio of the last N_1 changes.
"""
from collections import deque

import numpy as np


class ColdStartError(LookupError):
    """Raised when an estimate is requested before any sample was seen"""
    pass


def scale_actual_bitrates(ladder, downloaded_level, observed):
    """Actual bitrates of all levels estimated from the one observed.

    Multiplies before dividing so that an observation equal to its coding
    bitrate scales to exactly the other coding bitrates.
    """
    coding = np.asarray(ladder, dtype=float)
    if not 0 <= downloaded_level < coding.size:
        raise IndexError('level {} out of range [0, {})'.format(downloaded_level, coding.size))
    scaled = coding * observed / coding[downloaded_level]
    scaled[downloaded_level] = observed
    return scaled


def efficiency_ratio(history):
    """Net change over path length of a window of N_1 + 1 samples.

    A constant window has no path; it counts as fully efficient (1.0).
    """
    samples = np.asarray(history, dtype=float)
    if samples.size < 2:
        raise ValueError('efficiency ratio needs at least 2 samples, got {}'.format(samples.size))
    path = np.abs(np.diff(samples)).sum()
    if path == 0:
        return 1.
    return min(abs(samples[-1] - samples[0]) / path, 1.)


def smoothing_bounds(l_max, l_min):
    """(SC_slowest, SC_fastest) of the EMAs over l_max and l_min samples"""
    return 2. / (l_max + 1), 2. / (l_min + 1)


def smoothing_factor(er, l_max, l_min):
    """Squared interpolation between the slowest and fastest EMA factors"""
    slowest, fastest = smoothing_bounds(l_max, l_min)
    return (er * (fastest - slowest) + slowest) ** 2


class KamaState(object):
    """KAMA of a single level.

    Starts from the level's coding bitrate. Until N_1 + 1 samples are known
    the fastest smoothing factor is used.
    """

    def __init__(self, initial, l_max=30, l_min=2, n_1=10):
        if l_min < 1 or l_max <= l_min:
            raise ValueError('need 1 <= l_min < l_max, got l_min={} l_max={}'.format(l_min, l_max))
        if n_1 < 1:
            raise ValueError('n_1 must be >= 1, got {}'.format(n_1))
        self.l_max = l_max
        self.l_min = l_min
        self.n_1 = n_1
        self.prediction = float(initial)
        self.history = deque(maxlen=n_1 + 1)
        self.last_factor = None

    def __repr__(self):
        return 'KamaState(prediction={}, l_max={}, l_min={}, n_1={})'.format(
            self.prediction, self.l_max, self.l_min, self.n_1)

    def current_factor(self):
        if len(self.history) < self.n_1 + 1:
            return smoothing_bounds(self.l_max, self.l_min)[1] ** 2
        return smoothing_factor(efficiency_ratio(self.history), self.l_max, self.l_min)


def kama_update(state, sample):
    """Feeds one sample; returns the prediction for the next segment"""
    state.history.append(float(sample))
    factor = state.current_factor()
    state.last_factor = factor
    state.prediction = state.prediction + factor * (float(sample) - state.prediction)
    return state.prediction


class KamaPredictor(object):
    """Predicts the next segment's actual bitrate at every level."""

    def __init__(self, ladder, l_max=30, l_min=2, n_1=10):
        self.ladder = np.asarray(ladder, dtype=float)
        self.states = [KamaState(v, l_max=l_max, l_min=l_min, n_1=n_1) for v in self.ladder]

    def update(self, level, observed):
        """Feeds the actual bitrate observed at the downloaded level"""
        samples = scale_actual_bitrates(self.ladder, level, observed)
        for state, sample in zip(self.states, samples):
            kama_update(state, sample)
        return self.predictions()

    def predictions(self):
        return np.array([state.prediction for state in self.states])


class CodingBitratePredictor(object):
    """Uses the coding bitrates as the prediction, ignoring observations."""

    def __init__(self, ladder):
        self.ladder = np.asarray(ladder, dtype=float)

    def update(self, level, observed):
        return self.predictions()

    def predictions(self):
        return self.ladder.copy()


class ThroughputEstimator(object):
    """Weighted moving average over the last `window` segment throughputs,
    weights 1..n with the most recent sample heaviest."""

    def __init__(self, window=5):
        if window < 1:
            raise ValueError('window must be >= 1, got {}'.format(window))
        self.window = window
        self.samples = deque(maxlen=window)

    def __len__(self):
        return len(self.samples)

    def add(self, throughput):
        if throughput <= 0:
            raise ValueError('throughput must be positive, got {}'.format(throughput))
        self.samples.append(float(throughput))


def estimate_throughput(estimator):
    """Weighted mean of the window; ColdStartError while it is empty"""
    if not estimator.samples:
        raise ColdStartError('no segment download measured yet')
    samples = np.array(estimator.samples)
    weights = np.arange(1, samples.size + 1)
    return float(np.average(samples, weights=weights))


def prediction_error(predicted, actual):
    """Relative absolute error |predicted - actual| / actual (element-wise on arrays)"""
    return np.abs(np.asarray(predicted, dtype=float) - actual) / actual


def evaluate_prediction(video, cfg=None, levels=None):
    """Mean prediction error of KAMA and of the coding bitrates over a video.

    GOP n is predicted from GOPs 0..n-1, at every level; the level actually
    downloaded for GOP n is ``levels[n]`` (level 0 throughout by default).
    Returns (kama_error, coding_error), each the mean over segments and levels.
    """
    l_max, l_min, n_1 = (30, 2, 10) if cfg is None else (cfg.l_max, cfg.l_min, cfg.n_1)
    actual = video.gop_sizes() / video.gop_length
    ladder = video.ladder.as_array()
    kama = KamaPredictor(ladder, l_max=l_max, l_min=l_min, n_1=n_1)
    coding = CodingBitratePredictor(ladder)

    kama_errors, coding_errors = [], []
    for n in range(actual.shape[0]):
        kama_errors.append(prediction_error(kama.predictions(), actual[n]))
        coding_errors.append(prediction_error(coding.predictions(), actual[n]))
        level = 0 if levels is None else int(levels[n])
        kama.update(level, actual[n, level])
    return float(np.mean(kama_errors)), float(np.mean(coding_errors))

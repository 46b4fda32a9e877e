"""Per-segment controllers: the hybrid scheme, its ablation and the baselines.

Every controller answers the same two calls, ``reset(context)`` before the
first segment and ``decide(observation)`` after each downloaded GOP, and
returns a ControllerDecision. Target buffer and skip threshold always come
from the playback and frame-drop modules, so schemes differ in the bitrate
policy only.

Baselines are simplified reimplementations with the rules written here:

LOOKAHEAD
    Enumerates every level sequence over `horizon` segments and keeps the
    first level of the best one. Sequences are scored with the segment-level
    quality, rebuffer and switch terms (p_q*V*d, p_r*stall, p_w*|dV|, kbps),
    using coding bitrates, the WMA throughput and playback rate 1.0. The
    buffer evolves as b <- max(b - T, 0) + d. Ties go to the
    lexicographically first sequence.

BUFFER-THRESHOLD
    With Ĉ the WMA throughput and `cur` the level just downloaded, `safe` is
    the highest level whose coding bitrate is at most Ĉ (0 if none) and
    thresholds are scaled by s = clip(V_cur / Ĉ, 0.5, 2):

    * empty buffer or no measurement yet: level 0
    * B >= bt_high * s: max(cur, safe)
    * B < bt_low * s: max(min(cur - 1, safe), 0)
    * otherwise: cur
"""
import itertools
import re

import numpy as np

from livesim.bitrate import CdnState, choose_level, evaluate_levels
from livesim.framedrop import compute_skip_threshold
from livesim.playback import decide_playback
from livesim.predictor import (CodingBitratePredictor, ColdStartError, KamaPredictor, ThroughputEstimator,
                               estimate_throughput)
from livesim.qoe import to_kbps
from livesim.simulator import ControllerDecision

SCHEMES = ['HYSA', 'HYSA-N', 'LOOKAHEAD', 'BUFFER-THRESHOLD', 'FIXED']
FIXED_PATTERN = re.compile(r'^FIXED\((\d+)\)$')


class Controller(object):
    """Shared plumbing: configuration, WMA throughput and decision assembly"""
    name = None

    def __init__(self):
        self.context = None
        self.cfg = None
        self.throughput = None

    def __repr__(self):
        return '{}()'.format(type(self).__name__)

    def reset(self, context):
        self.context = context
        self.cfg = context.config
        self.ladder = np.asarray(context.ladder, dtype=float)
        self.throughput = ThroughputEstimator(self.cfg.window)
        return self.finish(0, 0.)

    def decide(self, observation):
        raise NotImplementedError

    def observe(self, observation):
        self.throughput.add(observation.throughput)

    def finish(self, quality, buffer_level, predictions=None, estimate=None):
        """Completes a quality choice with the target buffer and skip threshold"""
        playback = decide_playback(self.cfg.bands, buffer_level)
        return ControllerDecision(quality=int(quality), target_buffer=playback.target_buffer,
                                  latency_limit=self.latency_limit(self.ladder[quality]),
                                  predictions=predictions, estimate=estimate)

    def latency_limit(self, bitrate):
        """Skip threshold at the given coding bitrate; infinite when skipping is off
        or no latency penalty can ever outweigh a skip"""
        cfg = self.cfg
        if not cfg.skip_enabled or cfg.weights.p_d * cfg.lam == 0:
            return np.inf
        return compute_skip_threshold(bitrate, self.context.frame_duration, cfg.weights, cfg.lam)


class HybridController(Controller):
    """Bitrate prediction + playback-rate control + latency-constrained
    bitrate selection + frame dropping.

    With ``predictor='coding'`` the coding bitrates stand in for the
    predicted actual bitrates.
    """

    def __init__(self, predictor='kama'):
        super().__init__()
        if predictor not in ('kama', 'coding'):
            raise ValueError('unknown predictor {!r}'.format(predictor))
        self.predictor_kind = predictor
        self.name = 'HYSA' if predictor == 'kama' else 'HYSA-N'

    def __repr__(self):
        return 'HybridController(predictor={!r})'.format(self.predictor_kind)

    def reset(self, context):
        cfg = context.config
        if self.predictor_kind == 'kama':
            self.predictor = KamaPredictor(context.ladder, l_max=cfg.l_max, l_min=cfg.l_min, n_1=cfg.n_1)
        else:
            self.predictor = CodingBitratePredictor(context.ladder)
        self.speed = 1.
        return super().reset(context)

    def decide(self, observation):
        self.observe(observation)
        predictions = self.predictor.update(observation.level, observation.actual_bitrate)
        playback = decide_playback(self.cfg.bands, observation.buffer)

        state = CdnState(newest=observation.newest, previous_newest=observation.previous_newest,
                         downloaded=observation.downloaded, segment_time=observation.segment_time,
                         speed=self.speed)
        self.speed = state.accumulation_speed(self.context.frame_duration)

        estimates = evaluate_levels(predictions, estimate_throughput(self.throughput), observation.buffer,
                                    playback.rate, state, self.cfg.beta, self.context.frame_duration,
                                    self.context.gop_length)
        quality = choose_level(estimates, self.cfg.b_th)
        return self.finish(quality, observation.buffer, predictions=tuple(predictions),
                           estimate=estimates[quality])


def plan_lookahead(ladder, throughput, buffer_level, current_level, horizon, weights, gop_length):
    """Best level sequence over the horizon; returns (first level, score)"""
    ladder = np.asarray(ladder, dtype=float)
    sequences = np.array(list(itertools.product(range(ladder.size), repeat=horizon)), dtype=int)
    kbps = to_kbps(ladder)[sequences]
    download = ladder[sequences] * gop_length / throughput

    buffer = np.full(len(sequences), float(buffer_level))
    previous = np.full(len(sequences), to_kbps(ladder[current_level]))
    score = np.zeros(len(sequences))
    for step in range(horizon):
        stall = np.maximum(download[:, step] - buffer, 0.)
        buffer = np.maximum(buffer - download[:, step], 0.) + gop_length
        score += (weights.p_q * kbps[:, step] * gop_length - weights.p_r * stall
                  - weights.p_w * np.abs(kbps[:, step] - previous))
        previous = kbps[:, step]

    best = int(np.argmax(score))  # first maximum
    return int(sequences[best, 0]), float(score[best])


class LookaheadController(Controller):
    name = 'LOOKAHEAD'

    def __init__(self, horizon=None):
        super().__init__()
        self.horizon = horizon

    def decide(self, observation):
        self.observe(observation)
        horizon = self.horizon or self.cfg.horizon
        quality, _ = plan_lookahead(self.ladder, estimate_throughput(self.throughput), observation.buffer,
                                    observation.level, horizon, self.cfg.weights, self.context.gop_length)
        return self.finish(quality, observation.buffer)


def buffer_threshold_level(ladder, throughput, buffer_level, current_level, low, high):
    """Next level under the buffer-threshold rule (see module docstring)"""
    ladder = np.asarray(ladder, dtype=float)
    if throughput is None or buffer_level <= 0:
        return 0
    affordable = np.flatnonzero(ladder <= throughput)
    safe = int(affordable[-1]) if affordable.size else 0
    scale = float(np.clip(ladder[current_level] / throughput, 0.5, 2.))
    if buffer_level >= high * scale:
        return max(current_level, safe)
    if buffer_level < low * scale:
        return max(min(current_level - 1, safe), 0)
    return current_level


class BufferThresholdController(Controller):
    name = 'BUFFER-THRESHOLD'

    def decide(self, observation):
        self.observe(observation)
        try:
            throughput = estimate_throughput(self.throughput)
        except ColdStartError:
            throughput = None
        quality = buffer_threshold_level(self.ladder, throughput, observation.buffer, observation.level,
                                         self.cfg.bt_low, self.cfg.bt_high)
        return self.finish(quality, observation.buffer)


class FixedController(Controller):
    """Always the same level"""

    def __init__(self, level=0):
        super().__init__()
        self.level = level
        self.name = 'FIXED({})'.format(level)

    def __repr__(self):
        return 'FixedController(level={})'.format(self.level)

    def reset(self, context):
        super().reset(context)
        return self.decide_at(0.)

    def decide(self, observation):
        self.observe(observation)
        return self.decide_at(observation.buffer)

    def decide_at(self, buffer_level):
        # an out-of-range level is left for the simulator to reject
        playback = decide_playback(self.cfg.bands, buffer_level)
        bitrate = self.ladder[min(max(self.level, 0), self.ladder.size - 1)]
        return ControllerDecision(quality=self.level, target_buffer=playback.target_buffer,
                                  latency_limit=self.latency_limit(bitrate))


def parse_scheme(scheme):
    """Splits a scheme id into (name, argument); FIXED(2) -> ('FIXED', 2)"""
    scheme = scheme.strip().upper()
    match = FIXED_PATTERN.match(scheme)
    if match:
        return 'FIXED', int(match.group(1))
    if scheme in SCHEMES and scheme != 'FIXED':
        return scheme, None
    raise ValueError('unknown scheme {!r}; expected one of HYSA, HYSA-N, LOOKAHEAD, '
                     'BUFFER-THRESHOLD or FIXED(level)'.format(scheme))


def make_controller(scheme):
    """A fresh controller for a scheme id"""
    name, argument = parse_scheme(scheme)
    if name == 'HYSA':
        return HybridController('kama')
    if name == 'HYSA-N':
        return HybridController('coding')
    if name == 'LOOKAHEAD':
        return LookaheadController()
    if name == 'BUFFER-THRESHOLD':
        return BufferThresholdController()
    return FixedController(argument)

"""Five-term QoE model scored per frame.

QoE = sum over frames of
    p_q * V_k * d_f - p_r * t_k^r - p_l * l_k - p_s * t_k^s - p_w * |V_k - V_{k-1}|

Bitrates enter the score in kbps, durations in seconds. Callers always pass
bits/second; the conversion happens here and nowhere else.
"""
from dataclasses import dataclass, astuple

BITS_PER_KBIT = 1000.


def to_kbps(bitrate):
    """bits/second -> kbps, the unit the QoE weights are expressed in"""
    return bitrate / BITS_PER_KBIT


@dataclass(frozen=True)
class QoeWeights(object):
    """Weights of the QoE terms.

    p_q per kbps-second of quality, p_r per second rebuffered, p_l per second of
    latency (per frame), p_s per second skipped, p_w per kbps of switch,
    p_d per second of latency as used by the frame-drop threshold.
    """
    p_q: float = 1.0
    p_r: float = 1.5
    p_l: float = 0.005
    p_s: float = 1.0
    p_w: float = 0.02
    p_d: float = 0.005

    def __post_init__(self):
        for name, value in zip(['p_q', 'p_r', 'p_l', 'p_s', 'p_w', 'p_d'], astuple(self)):
            if value is None or value < 0:
                raise ValueError('QoE weight {} must be non-negative, got {}'.format(name, value))


@dataclass(frozen=True)
class FrameOutcome(object):
    """What the viewer experienced for one frame (bitrates in bits/second)"""
    coding_bitrate: float
    rebuffer_time: float
    latency: float
    skipped_length: float
    prev_coding_bitrate: float


@dataclass(frozen=True)
class QoeBreakdown(object):
    quality: float = 0.
    rebuf: float = 0.
    latency: float = 0.
    skip: float = 0.
    switch: float = 0.

    @property
    def overall(self):
        return self.quality + self.rebuf + self.latency + self.skip + self.switch

    def __add__(self, other):
        return QoeBreakdown(self.quality + other.quality, self.rebuf + other.rebuf,
                            self.latency + other.latency, self.skip + other.skip,
                            self.switch + other.switch)

    def __mul__(self, factor):
        return QoeBreakdown(*(value * factor for value in astuple(self)))

    __rmul__ = __mul__

    def as_dict(self, prefix='qoe_'):
        """Components keyed like the summary table columns, overall first"""
        result = {prefix + 'overall': self.overall}
        result.update({prefix + name: value for name, value in
                       zip(['quality', 'rebuf', 'latency', 'skip', 'switch'], astuple(self))})
        return result


def score_frame(weights, outcome, frame_duration):
    """Scores one frame"""
    if frame_duration <= 0:
        raise ValueError('frame duration must be positive, got {}'.format(frame_duration))
    return QoeBreakdown(
        quality=weights.p_q * to_kbps(outcome.coding_bitrate) * frame_duration,
        rebuf=-weights.p_r * outcome.rebuffer_time,
        latency=-weights.p_l * outcome.latency,
        skip=-weights.p_s * outcome.skipped_length,
        switch=-weights.p_w * to_kbps(abs(outcome.coding_bitrate - outcome.prev_coding_bitrate)))


def score_outcomes(weights, outcomes, frame_duration):
    """Component-wise sum of the frame scores"""
    total = None
    for outcome in outcomes:
        frame_score = score_frame(weights, outcome, frame_duration)
        total = frame_score if total is None else total + frame_score
    if total is None:
        raise ValueError('cannot score an empty log')
    return total


def score_run(weights, log):
    """Scores every played or skipped frame of a simulation log"""
    return score_outcomes(weights, log.outcomes(), log.frame_duration)

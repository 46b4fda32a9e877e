"""Heuristic playback-rate control: pick target buffer 0 or 1 from the buffer level.

Two tuples [B_min, B_target, B_max] are available. Outside its own
[B_min, B_max) band the player plays at 0.95 (below) or 1.05 (at or above),
and after a stall it resumes once the buffer reaches B_target.
"""
from dataclasses import dataclass

SLOW_RATE = 0.95
NORMAL_RATE = 1.0
FAST_RATE = 1.05


@dataclass(frozen=True)
class TargetBufferBands(object):
    b_min_0: float = 0.5
    b_target_0: float = 1.5
    b_max_0: float = 2.5
    b_min_1: float = 1.0
    b_target_1: float = 2.0
    b_max_1: float = 3.5

    def __post_init__(self):
        ordered = [self.b_min_0, self.b_min_1, self.b_target_0, self.b_target_1, self.b_max_0, self.b_max_1]
        if ordered[0] < 0:
            raise ValueError('buffer thresholds must be non-negative')
        if any(a >= b for a, b in zip(ordered[:-1], ordered[1:])):
            raise ValueError('need b_min_0 < b_min_1 < b_target_0 < b_target_1 < b_max_0 < b_max_1, got {}'.format(
                ordered))

    def tuple_for(self, selector):
        """(B_min, B_target, B_max) of target buffer 0 or 1"""
        if selector == 0:
            return self.b_min_0, self.b_target_0, self.b_max_0
        if selector == 1:
            return self.b_min_1, self.b_target_1, self.b_max_1
        raise ValueError('target buffer must be 0 or 1, got {}'.format(selector))


@dataclass(frozen=True)
class PlaybackDecision(object):
    target_buffer: int
    rate: float
    resume_threshold: float


def band_rate(bands, selector, buffer_level):
    """Rate the player applies under one tuple's own band"""
    b_min, _, b_max = bands.tuple_for(selector)
    if buffer_level < b_min:
        return SLOW_RATE
    if buffer_level >= b_max:
        return FAST_RATE
    return NORMAL_RATE


def decide_playback(bands, buffer_level):
    """Chooses the target buffer for the next segment.

    Target buffer 1 exactly on [B_min^0, B_max^0); the rate is 0.95 below
    B_min^1, 1.0 on [B_min^1, B_max^0) and 1.05 from B_max^0 up.
    """
    if buffer_level < 0:
        raise ValueError('buffer occupancy must be non-negative, got {}'.format(buffer_level))
    target_buffer = 1 if bands.b_min_0 <= buffer_level < bands.b_max_0 else 0

    if buffer_level < bands.b_min_1:
        rate = SLOW_RATE
    elif buffer_level < bands.b_max_0:
        rate = NORMAL_RATE
    else:
        rate = FAST_RATE

    return PlaybackDecision(target_buffer=target_buffer, rate=rate,
                            resume_threshold=bands.tuple_for(target_buffer)[1])


def playback_rate_during_segment(decision, buffer_nonempty):
    """Playback speed while a segment downloads; nothing plays from an empty buffer"""
    return decision.rate if buffer_nonempty else 0.

"""QoE-oriented frame dropping.

Skipping N frames costs their quality and the skip penalty,
(p_q * V + p_s) * d_f * N, and saves about p_d * lambda * l * N of latency
penalty. The latency at which both balance is the skip threshold; N cancels.
"""
from dataclasses import dataclass

from livesim.qoe import to_kbps


@dataclass(frozen=True)
class SkipPolicy(object):
    latency_limit: float
    lam: float = 1.5
    p_d: float = 0.005


def compute_skip_threshold(coding_bitrate, frame_duration, weights, lam):
    """Latency (seconds) above which skipping pays off at the given quality"""
    divisor = weights.p_d * lam
    if divisor == 0:
        raise ValueError('skip disabled divisor: p_d * lam is zero')
    if frame_duration <= 0:
        raise ValueError('frame duration must be positive, got {}'.format(frame_duration))
    return (weights.p_q * to_kbps(coding_bitrate) + weights.p_s) * frame_duration / divisor


def skip_cost(coding_bitrate, frame_duration, weights, n_frames):
    """QoE lost by skipping n frames"""
    return (weights.p_q * to_kbps(coding_bitrate) * frame_duration + weights.p_s * frame_duration) * n_frames


def skip_gain(latency, weights, lam, n_frames):
    """QoE won back by skipping n frames at the given latency"""
    return weights.p_d * lam * latency * n_frames


def should_skip(current_latency, policy):
    return current_latency > policy.latency_limit

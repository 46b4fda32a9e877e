"""Latency-constrained bitrate control.

For every level the download time, the buffer left after the download and
the latency of video piling up at the CDN are estimated; the level with the
lowest total latency whose post-download buffer stays above the stall
warning threshold wins.
"""
from dataclasses import dataclass


@dataclass(frozen=True)
class LatencyEstimate(object):
    download_time: float
    buffer_after: float
    cdn_latency: float

    @property
    def total(self):
        return self.buffer_after + self.cdn_latency


@dataclass(frozen=True)
class CdnState(object):
    """What the client knows about the CDN after segment n.

    newest: index of the latest frame at the CDN after segment n
    previous_newest: the same after segment n-1
    downloaded: index of the most recently downloaded frame
    segment_time: how long segment n took (seconds)
    speed: accumulation speed measured at the previous step (seconds of video per second)
    """
    newest: int
    previous_newest: int
    downloaded: int
    segment_time: float
    speed: float = 1.0

    def __post_init__(self):
        if self.downloaded > self.newest:
            raise ValueError('downloaded frame {} is past the newest CDN frame {}'.format(
                self.downloaded, self.newest))
        if self.speed < 0:
            raise ValueError('accumulation speed must be non-negative')

    def accumulation_speed(self, frame_duration):
        """Video accumulated at the CDN per second during the last segment"""
        if self.segment_time <= 0:
            return self.speed
        return (self.newest - self.previous_newest) * frame_duration / self.segment_time


def estimate_download_time(predicted_bitrate, gop_length, throughput):
    return predicted_bitrate * gop_length / throughput


def estimate_buffer_after(buffer_level, gop_length, rate, download_time):
    return max(buffer_level + gop_length - rate * download_time, 0.)


def estimate_cdn_latency(state, beta, frame_duration, download_time, gop_length):
    """Backlog at the CDN once the next segment is in, in seconds of video"""
    speed = beta * state.accumulation_speed(frame_duration)
    backlog = (state.newest - state.downloaded) * frame_duration
    return max(backlog + speed * download_time - gop_length, 0.)


def evaluate_levels(predictions, throughput, buffer_level, rate, state, beta, frame_duration, gop_length):
    """One LatencyEstimate per level"""
    estimates = []
    for predicted in predictions:
        download_time = estimate_download_time(predicted, gop_length, throughput)
        estimates.append(LatencyEstimate(
            download_time=download_time,
            buffer_after=estimate_buffer_after(buffer_level, gop_length, rate, download_time),
            cdn_latency=estimate_cdn_latency(state, beta, frame_duration, download_time, gop_length)))
    return estimates


def choose_level(estimates, stall_threshold):
    """Lowest total latency among levels keeping the buffer above the threshold.

    Equal totals go to the higher level; with no feasible level the lowest is
    returned.
    """
    best = None
    for level, estimate in enumerate(estimates):
        if not estimate.buffer_after > stall_threshold:
            continue
        if best is None or estimate.total <= estimates[best].total:
            best = level
    return 0 if best is None else best


def select_quality(predictions, throughput, buffer_level, rate, state, stall_threshold,
                   beta=1.0, frame_duration=0.04, gop_length=1.0):
    """Quality level for the next segment"""
    estimates = evaluate_levels(predictions, throughput, buffer_level, rate, state,
                                beta, frame_duration, gop_length)
    return choose_level(estimates, stall_threshold)

"""Discrete-event replay of a network trace against a live video trace.

Frames are fetched one after another at the quality decided for their GOP,
waiting at the CDN when a frame has not arrived yet. Playback runs
concurrently at the rate of the active target buffer and stops when the
buffer drains; it resumes once the buffer reaches the B_target of the
active tuple. After every complete GOP the controller is asked for the next
(quality, target buffer, skip threshold) and, when the latency is above the
threshold, the client jumps to the start of the newest GOP at the CDN.

Latency of a frame is the distance, in video time, between the live edge
(the newest frame at the CDN) and the frame when it starts playing.
"""
import os
from dataclasses import dataclass

import numpy as np
import pandas as pd

from livesim.bitrate import LatencyEstimate
from livesim.framedrop import SkipPolicy, should_skip
from livesim.log import logger
from livesim.playback import PlaybackDecision, SLOW_RATE, band_rate, playback_rate_during_segment
from livesim.qoe import FrameOutcome

EPSILON = 1e-9

FRAME_COLUMNS = ['frame', 'level', 'dl_start_s', 'dl_end_s', 'buffer_s', 'latency_s', 'rebuf_s', 'skipped']
SEGMENT_COLUMNS = ['segment', 'quality', 'target_buffer', 'latency_limit_s', 'pred_bitrate_bps', 'est_T_s',
                   'est_D_s']


class SimulationError(ValueError):
    """Raised when a controller hands back an unusable decision"""
    pass


@dataclass(frozen=True)
class ControllerDecision(object):
    """Per-segment decision; `predictions` and `estimate` are diagnostics for the log"""
    quality: int
    target_buffer: int
    latency_limit: float
    predictions: tuple = None
    estimate: LatencyEstimate = None


@dataclass(frozen=True)
class ControllerContext(object):
    """What a controller knows before the first segment"""
    ladder: tuple
    frame_duration: float
    gop_length: float
    config: object


@dataclass(frozen=True)
class Observation(object):
    """State handed to the controller after a complete GOP download"""
    segment: int
    level: int
    buffer: float
    throughput: float
    actual_bitrate: float
    newest: int
    previous_newest: int
    downloaded: int
    segment_time: float
    latency: float
    clock: float


class PlayerState(object):
    """Client state during a run.

    The buffer is kept as a queue of downloaded frame indices and a playback
    position counted in frames of that queue, so buffer occupancy is always
    (queued - position) * frame_duration.
    """

    def __init__(self, frame_duration, playback=None):
        self.frame_duration = frame_duration
        self.clock = 0.
        self.queue = []  # frame indices in play order
        self.position = 0.
        self.play_starts = []  # wall time at which each queued frame started playing
        self.playback = playback or PlaybackDecision(target_buffer=0, rate=SLOW_RATE, resume_threshold=0.)
        self.waiting = True
        self.has_started = False
        self.ended = False
        self.download_pointer = 0
        self.level = 0
        self.rebuffer_time = 0.
        self.pending_rebuffer = 0.
        self.skipped_time = 0.
        self.idle_time = 0.
        self.download_time = 0.
        self.stalls = 0

    def __repr__(self):
        return 'PlayerState(clock={:.3f}, buffer={:.3f}, waiting={}, pointer={})'.format(
            self.clock, self.buffer, self.waiting, self.download_pointer)

    @property
    def buffer(self):
        return max(len(self.queue) - self.position, 0.) * self.frame_duration

    @property
    def resume_threshold(self):
        return self.playback.resume_threshold

    @property
    def rate(self):
        return playback_rate_during_segment(self.playback, not self.waiting and self.buffer > 0)

    def enqueue(self, frame_index):
        self.queue.append(frame_index)
        self.download_pointer = frame_index + 1

    def maybe_resume(self, force=False):
        """Leaves the waiting state once the buffer reaches the resume threshold"""
        if self.waiting and (force or self.buffer >= self.resume_threshold - EPSILON):
            self.waiting = False
            self.has_started = True
        return not self.waiting

    def take_rebuffer(self):
        """Rebuffering accrued since the last call"""
        rebuffer, self.pending_rebuffer = self.pending_rebuffer, 0.
        return rebuffer


def advance_playback(state, elapsed):
    """Plays `elapsed` seconds of wall time from the buffer.

    Consumes min(buffer, rate * elapsed); if the buffer runs dry the player
    stalls and the rest of the interval is rebuffering. Waiting before the
    first start is not rebuffering.
    """
    if elapsed <= 0:
        return state
    start = state.clock
    d_f = state.frame_duration

    if state.waiting:
        if state.has_started and not state.ended:
            state.rebuffer_time += elapsed
            state.pending_rebuffer += elapsed
        state.clock = start + elapsed
        return state

    rate = state.playback.rate
    available = len(state.queue) - state.position
    wanted = rate * elapsed / d_f
    drained = wanted >= available - EPSILON
    new_position = float(len(state.queue)) if drained else state.position + wanted

    # frames whose first instant is played inside this interval
    while len(state.play_starts) < len(state.queue) and len(state.play_starts) < new_position:
        offset = max(len(state.play_starts) - state.position, 0.)
        state.play_starts.append(start + offset * d_f / rate)

    if drained:
        playing_time = available * d_f / rate
        state.waiting = True
        if not state.ended:
            state.stalls += 1
            stalled = max(elapsed - playing_time, 0.)
            state.rebuffer_time += stalled
            state.pending_rebuffer += stalled
    state.position = new_position
    state.clock = start + elapsed
    return state


def download_frame(state, size, net, available_at=0.):
    """Fetches one frame of `size` bits; returns the transfer duration.

    Idles until the frame is at the CDN first. Playback continues during the
    wait and the transfer.
    """
    wait = available_at - state.clock
    if wait > 0:
        advance_playback(state, wait)
        state.clock = available_at
        state.idle_time += wait
    start = state.clock
    end = net.transfer_end(start, size)
    duration = end - start
    advance_playback(state, duration)
    state.clock = end
    state.download_time += duration
    return duration


def drain_playback(state):
    """Plays out whatever is left in the buffer once the stream has ended"""
    state.ended = True
    state.maybe_resume(force=True)
    if len(state.queue) - state.position > 0:
        advance_playback(state, state.buffer / state.playback.rate)
    return state


def current_latency(state, video):
    """Live edge minus playhead, in seconds of video"""
    d_f = state.frame_duration
    newest = video.newest_frame(state.clock)
    whole = int(state.position)
    if whole < len(state.queue):
        playhead = (state.queue[whole] + state.position - whole) * d_f
    elif state.queue:
        playhead = (state.queue[-1] + 1) * d_f
    else:
        playhead = 0.
    return max(newest * d_f - playhead, 0.)


@dataclass
class FrameLog(object):
    frame: int
    level: int
    dl_start: float
    dl_end: float
    size: int
    bandwidth: float
    buffer_before: float
    buffer_after: float
    latency: float = 0.
    rebuffer: float = 0.
    skipped: bool = False
    play_start: float = np.nan


@dataclass
class SegmentLog(object):
    segment: int
    decision: ControllerDecision
    rate: float
    start: float
    end: float
    end_latency: float = 0.


class SimulationLog(object):
    """Per-frame and per-segment records of one run plus its totals"""

    def __init__(self, video):
        self.ladder = video.ladder
        self.frame_duration = video.frame_duration
        self.gop_length = video.gop_length
        self.n_frames = video.n_frames
        self.frames = []
        self.segments = []
        self.wall_time = 0.
        self.idle_time = 0.
        self.download_time = 0.
        self.rebuffer_time = 0.
        self.played_duration = 0.
        self.skipped_duration = 0.
        self.final_buffer = 0.
        self.stalls = 0
        self.skip_events = 0

    @property
    def advanced_duration(self):
        """Video the download pointer moved over, downloaded or skipped"""
        return len(self.frames) * self.frame_duration

    def conservation_gap(self):
        """played + skipped + final buffer - advanced; zero for a sound run"""
        return self.played_duration + self.skipped_duration + self.final_buffer - self.advanced_duration

    def outcomes(self):
        """FrameOutcome of every frame in stream order.

        A skipped frame counts only its length; the switch term of a played
        frame compares with the previous played frame.
        """
        previous = None
        for record in self.frames:
            if record.skipped:
                yield FrameOutcome(0., 0., 0., self.frame_duration, 0.)
                continue
            bitrate = self.ladder[record.level]
            yield FrameOutcome(coding_bitrate=bitrate, rebuffer_time=record.rebuffer, latency=record.latency,
                               skipped_length=0., prev_coding_bitrate=bitrate if previous is None else previous)
            previous = bitrate

    def frame_table(self, extended=False):
        df = pd.DataFrame({
            'frame': [r.frame for r in self.frames],
            'level': [r.level for r in self.frames],
            'dl_start_s': [r.dl_start for r in self.frames],
            'dl_end_s': [r.dl_end for r in self.frames],
            'buffer_s': [r.buffer_after for r in self.frames],
            'latency_s': [r.latency for r in self.frames],
            'rebuf_s': [r.rebuffer for r in self.frames],
            'skipped': [int(r.skipped) for r in self.frames],
        }, columns=FRAME_COLUMNS)
        if extended:
            df['size_bits'] = [r.size for r in self.frames]
            df['bandwidth_bps'] = [r.bandwidth for r in self.frames]
            df['buffer_before_s'] = [r.buffer_before for r in self.frames]
            df['play_start_s'] = [r.play_start for r in self.frames]
        return df

    def segment_table(self):
        rows = []
        for record in self.segments:
            decision = record.decision
            predicted = np.nan
            if decision.predictions is not None:
                predicted = decision.predictions[decision.quality]
            estimate = decision.estimate
            rows.append((record.segment, decision.quality, decision.target_buffer, decision.latency_limit,
                         predicted, np.nan if estimate is None else estimate.download_time,
                         np.nan if estimate is None else estimate.total))
        return pd.DataFrame(rows, columns=SEGMENT_COLUMNS)

    def write(self, directory, prefix=''):
        """Writes frames.csv and segments.csv to the directory"""
        frames_path = os.path.join(directory, '{}frames.csv'.format(prefix))
        segments_path = os.path.join(directory, '{}segments.csv'.format(prefix))
        self.frame_table().to_csv(frames_path, index=False)
        self.segment_table().to_csv(segments_path, index=False)
        return frames_path, segments_path


def _check_decision(decision, n_levels, segment):
    if not isinstance(decision, ControllerDecision):
        raise SimulationError('segment {}: controller returned {!r}, not a ControllerDecision'.format(
            segment, decision))
    if not 0 <= decision.quality < n_levels:
        raise SimulationError('segment {}: quality level {} out of range [0, {})'.format(
            segment, decision.quality, n_levels))
    if decision.target_buffer not in (0, 1):
        raise SimulationError('segment {}: target buffer {} is not 0 or 1'.format(
            segment, decision.target_buffer))
    # 0 skips at any latency, inf never skips
    if not decision.latency_limit >= 0:
        raise SimulationError('segment {}: latency limit {} must be non-negative'.format(
            segment, decision.latency_limit))


def _apply_decision(state, decision, bands):
    """Sets quality, playback rate and resume threshold for the next segment"""
    selector = decision.target_buffer
    state.level = decision.quality
    state.playback = PlaybackDecision(target_buffer=selector,
                                      rate=band_rate(bands, selector, state.buffer),
                                      resume_threshold=bands.tuple_for(selector)[1])
    state.maybe_resume()


def _skip_to(state, log, video, target, level):
    """Jumps the download pointer to frame `target`, logging the jumped-over frames"""
    buffer_level = state.buffer
    for k in range(state.download_pointer, target):
        log.frames.append(FrameLog(frame=k, level=level, dl_start=state.clock, dl_end=state.clock, size=0,
                                   bandwidth=np.nan, buffer_before=buffer_level, buffer_after=buffer_level,
                                   skipped=True))
    skipped = (target - state.download_pointer) * video.frame_duration
    logger.debug('Skipping frames {}..{} at t={:.3f}'.format(state.download_pointer, target - 1, state.clock))
    state.skipped_time += skipped
    state.download_pointer = target
    log.skip_events += 1


def _assign_latencies(state, log, video):
    """Latency of every played frame from the moment it started playing"""
    starts = np.array(state.play_starts)
    played = np.array(state.queue[:len(starts)], dtype=int)
    newest = np.searchsorted(video.arrival_times, starts, side='right') - 1
    latencies = np.maximum(newest - played, 0) * video.frame_duration
    by_frame = {record.frame: record for record in log.frames if not record.skipped}
    for frame, latency, start in zip(played, latencies, starts):
        by_frame[int(frame)].latency = float(latency)
        by_frame[int(frame)].play_start = float(start)


def run(video, net, cfg, controller):
    """Replays the whole video against the network with the given controller"""
    frames_per_gop = video.frames_per_gop
    bands = cfg.bands
    state = PlayerState(video.frame_duration)
    log = SimulationLog(video)

    context = ControllerContext(ladder=video.ladder.levels, frame_duration=video.frame_duration,
                                gop_length=video.gop_length, config=cfg)
    decision = controller.reset(context)
    _check_decision(decision, video.n_levels, 0)

    while state.download_pointer < video.n_frames:
        first = state.download_pointer
        segment = first // frames_per_gop
        _apply_decision(state, decision, bands)
        level = decision.quality

        segment_start = state.clock
        newest_at_start = video.newest_frame(state.clock)
        transfer_time = 0.
        for k in range(first, first + frames_per_gop):
            buffer_before = state.buffer
            size = int(video.sizes[k, level])
            duration = download_frame(state, size, net, available_at=video.arrival_times[k])
            transfer_time += duration
            state.enqueue(k)
            state.maybe_resume()
            log.frames.append(FrameLog(frame=k, level=level, dl_start=state.clock - duration, dl_end=state.clock,
                                       size=size, bandwidth=size / duration, buffer_before=buffer_before,
                                       buffer_after=state.buffer, rebuffer=state.take_rebuffer()))

        segment_bits = float(video.sizes[first:first + frames_per_gop, level].sum())
        latency = current_latency(state, video)
        observation = Observation(segment=segment, level=level, buffer=state.buffer,
                                  throughput=segment_bits / transfer_time,
                                  actual_bitrate=segment_bits / video.gop_length,
                                  newest=video.newest_frame(state.clock), previous_newest=newest_at_start,
                                  downloaded=first + frames_per_gop - 1,
                                  segment_time=state.clock - segment_start,
                                  latency=latency, clock=state.clock)
        log.segments.append(SegmentLog(segment=segment, decision=decision, rate=state.playback.rate,
                                       start=segment_start, end=state.clock, end_latency=latency))

        decision = controller.decide(observation)
        _check_decision(decision, video.n_levels, segment + 1)
        logger.debug('Segment {}: level {} buffer {:.3f} latency {:.3f} -> {}'.format(
            segment, level, observation.buffer, latency, decision))

        if cfg.skip_enabled and state.download_pointer < video.n_frames:
            policy = SkipPolicy(latency_limit=decision.latency_limit, lam=cfg.lam, p_d=cfg.p_d)
            if should_skip(latency, policy):
                target = (video.newest_frame(state.clock) // frames_per_gop) * frames_per_gop
                if target > state.download_pointer:
                    _skip_to(state, log, video, target, decision.quality)

    log.wall_time = state.clock
    if decision.target_buffer in (0, 1):
        state.playback = PlaybackDecision(target_buffer=decision.target_buffer,
                                          rate=band_rate(bands, decision.target_buffer, state.buffer),
                                          resume_threshold=bands.tuple_for(decision.target_buffer)[1])
    drain_playback(state)
    _assign_latencies(state, log, video)

    log.idle_time = state.idle_time
    log.download_time = state.download_time
    log.rebuffer_time = state.rebuffer_time
    log.played_duration = state.position * video.frame_duration
    log.skipped_duration = state.skipped_time
    log.final_buffer = state.buffer
    log.stalls = state.stalls
    return log

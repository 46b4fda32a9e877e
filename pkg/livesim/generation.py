"""Seeded synthetic trace suite.

Videos: scene complexity follows an AR(1) process in log space around a
per-type mean, so the actual bitrate of a GOP drifts around a fixed fraction
of its coding bitrate. The first frame of every GOP is an I-frame three
times the size of the others. ``cbr`` frames are exactly V * d_f bits.

Networks: one gamma-distributed bandwidth sample per second for every
(mean, std) pair of the grid, clipped at 50 kbps.
"""
import os

import numpy as np
from scipy import stats

from livesim.log import logger
from livesim.traces import (DEFAULT_FRAME_DURATION, DEFAULT_GOP_LENGTH, DEFAULT_LADDER, BitrateLadder,
                            NetworkTrace, VideoTrace, write_network_trace, write_video_trace)

# type -> (mean complexity, innovation std of the log complexity)
VIDEO_TYPES = {
    'room': (0.7, 0.03),
    'game': (0.8, 0.06),
    'sports': (0.9, 0.1),
}
AR_COEFFICIENT = 0.95
I_FRAME_WEIGHT = 3.
FRAME_JITTER = 0.02

NETWORK_MEANS = [0.8e6, 1.37e6, 1.93e6, 2.5e6]
NETWORK_STDS = [0.1e6, 1.05e6, 2.0e6]
MIN_BANDWIDTH = 50e3
NETWORK_STEP = 1.


def complexity_series(rng, n_gops, mean, innovation_std, phi=AR_COEFFICIENT):
    """AR(1) log-complexity around log(mean), started from its stationary law"""
    stationary_std = innovation_std / np.sqrt(1 - phi ** 2)
    noise = stats.norm(scale=innovation_std).rvs(size=n_gops, random_state=rng)
    deviation = np.empty(n_gops)
    deviation[0] = stats.norm(scale=stationary_std).rvs(random_state=rng)
    for n in range(1, n_gops):
        deviation[n] = phi * deviation[n - 1] + noise[n]
    return mean * np.exp(deviation)


def frame_weights(frames_per_gop):
    """Relative frame sizes within a GOP, averaging to 1"""
    weights = np.ones(frames_per_gop)
    weights[0] = I_FRAME_WEIGHT
    return weights * frames_per_gop / weights.sum()


def _arrivals(n_frames, frame_duration):
    return np.arange(n_frames) * frame_duration


def generate_vbr_video(rng, mean, innovation_std, duration=60., frame_duration=DEFAULT_FRAME_DURATION,
                       gop_length=DEFAULT_GOP_LENGTH, ladder=DEFAULT_LADDER):
    ladder = BitrateLadder(tuple(ladder))
    frames_per_gop = int(round(gop_length / frame_duration))
    n_gops = int(round(duration / gop_length))
    n_frames = n_gops * frames_per_gop

    complexity = np.repeat(complexity_series(rng, n_gops, mean, innovation_std), frames_per_gop)
    weights = np.tile(frame_weights(frames_per_gop), n_gops)
    jitter = 1 + rng.uniform(-FRAME_JITTER, FRAME_JITTER, size=(n_frames, len(ladder)))
    sizes = ladder.as_array()[np.newaxis, :] * frame_duration * (complexity * weights)[:, np.newaxis] * jitter
    sizes = np.maximum(np.round(sizes), 1).astype(np.int64)

    return VideoTrace(frame_duration=frame_duration, gop_length=gop_length, ladder=ladder,
                      arrival_times=_arrivals(n_frames, frame_duration), sizes=sizes)


def generate_cbr_video(duration=60., frame_duration=DEFAULT_FRAME_DURATION, gop_length=DEFAULT_GOP_LENGTH,
                       ladder=DEFAULT_LADDER):
    """Every frame exactly at its coding bitrate"""
    ladder = BitrateLadder(tuple(ladder))
    n_frames = int(round(duration / gop_length)) * int(round(gop_length / frame_duration))
    sizes = np.tile(np.round(ladder.as_array() * frame_duration), (n_frames, 1)).astype(np.int64)
    return VideoTrace(frame_duration=frame_duration, gop_length=gop_length, ladder=ladder,
                      arrival_times=_arrivals(n_frames, frame_duration), sizes=sizes)


def generate_network(rng, mean, std, duration=120., step=NETWORK_STEP):
    """Gamma bandwidth samples with the given mean and standard deviation (bits/s)"""
    shape = (mean / std) ** 2
    scale = std ** 2 / mean
    n_samples = int(round(duration / step))
    bandwidths = stats.gamma(a=shape, scale=scale).rvs(size=n_samples, random_state=rng)
    bandwidths = np.round(np.maximum(bandwidths, MIN_BANDWIDTH))
    return NetworkTrace(times=np.arange(n_samples) * step, bandwidths=bandwidths)


def network_id(mean, std):
    return 'net_m{:04d}_s{:04d}'.format(int(round(mean / 1e3)), int(round(std / 1e3)))


def generate_suite(seed=0, video_duration=60., network_duration=120., frame_duration=DEFAULT_FRAME_DURATION,
                   gop_length=DEFAULT_GOP_LENGTH, ladder=DEFAULT_LADDER):
    """The synthetic suite as (videos, networks), dicts of id -> trace"""
    videos = {}
    for index, (name, (mean, innovation_std)) in enumerate(VIDEO_TYPES.items()):
        rng = np.random.default_rng([seed, 0, index])
        videos[name] = generate_vbr_video(rng, mean, innovation_std, duration=video_duration,
                                          frame_duration=frame_duration, gop_length=gop_length, ladder=ladder)
    videos['cbr'] = generate_cbr_video(duration=video_duration, frame_duration=frame_duration,
                                       gop_length=gop_length, ladder=ladder)

    networks = {}
    grid = [(mean, std) for mean in NETWORK_MEANS for std in NETWORK_STDS]
    for index, (mean, std) in enumerate(grid):
        rng = np.random.default_rng([seed, 1, index])
        networks[network_id(mean, std)] = generate_network(rng, mean, std, duration=network_duration)
    return videos, networks


def write_suite(out_dir, seed=0, **kwargs):
    """Writes videos/<id>.csv and networks/<id>.csv; returns the written paths"""
    videos, networks = generate_suite(seed=seed, **kwargs)
    paths = []
    for subdir, traces, writer in [('videos', videos, write_video_trace),
                                   ('networks', networks, write_network_trace)]:
        os.makedirs(os.path.join(out_dir, subdir), exist_ok=True)
        for trace_name, trace in traces.items():
            path = os.path.join(out_dir, subdir, '{}.csv'.format(trace_name))
            writer(trace, path)
            paths.append(path)
    logger.info('Wrote {} videos and {} networks to {}'.format(len(videos), len(networks), out_dir))
    return paths

"""Video and network traces: the only external data entering the simulator.

Video trace CSV: ``frame_index,arrival_time_s,size_bits_L0,...,size_bits_L{M-1}``,
one row per frame, M inferred from the header.

Network trace CSV: ``time_s,bandwidth_bps``, piecewise constant, the last
sample extends to infinity.
"""
import os
import re
from dataclasses import dataclass

import numpy as np
import pandas as pd

DEFAULT_FRAME_DURATION = 0.04
DEFAULT_GOP_LENGTH = 1.0
DEFAULT_LADDER = (500e3, 850e3, 1200e3, 1850e3)

VIDEO_INDEX_COLUMN = 'frame_index'
VIDEO_ARRIVAL_COLUMN = 'arrival_time_s'
VIDEO_SIZE_PREFIX = 'size_bits_L'
NETWORK_COLUMNS = ['time_s', 'bandwidth_bps']

DATA_DIR = os.path.join(os.path.dirname(__file__), 'data')
BUNDLED_VIDEO = os.path.join(DATA_DIR, 'traces', 'synthetic_vbr.csv')
EXAMPLE_CONFIG = os.path.join(DATA_DIR, 'params', 'example.conf')


class TraceFormatError(ValueError):
    """Raised when a trace does not follow the documented format"""
    pass


def _frozen(values, dtype):
    """Returns a read-only copy of the values"""
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class BitrateLadder(object):
    """Coding bitrates (bits/second) of the quality levels, lowest first."""
    levels: tuple

    def __post_init__(self):
        levels = tuple(float(v) for v in self.levels)
        if len(levels) < 2:
            raise TraceFormatError('a bitrate ladder needs at least 2 levels, got {}'.format(len(levels)))
        if any(v <= 0 for v in levels):
            raise TraceFormatError('coding bitrates must be positive: {}'.format(levels))
        if any(a >= b for a, b in zip(levels[:-1], levels[1:])):
            raise TraceFormatError('coding bitrates must be strictly increasing: {}'.format(levels))
        object.__setattr__(self, 'levels', levels)

    def __len__(self):
        return len(self.levels)

    def __getitem__(self, level):
        return self.levels[level]

    def as_array(self):
        return np.array(self.levels, dtype=float)


@dataclass(frozen=True)
class FrameRecord(object):
    index: int
    arrival_time: float
    sizes: tuple


@dataclass(frozen=True, eq=False)
class VideoTrace(object):
    """Per-frame sizes at each quality level plus CDN arrival times.

    Frames are grouped positionally into GOPs of ``gop_length / frame_duration``
    frames. The arrays are read-only so a trace can be shared between runs.
    """
    frame_duration: float
    gop_length: float
    ladder: BitrateLadder
    arrival_times: np.ndarray
    sizes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'arrival_times', _frozen(self.arrival_times, float))
        object.__setattr__(self, 'sizes', _frozen(self.sizes, np.int64))
        self._validate()

    def _validate(self):
        if self.frame_duration <= 0 or self.gop_length <= 0:
            raise TraceFormatError('frame duration and GOP length must be positive')
        frames_per_gop = int(round(self.gop_length / self.frame_duration))
        if frames_per_gop < 1 or abs(frames_per_gop * self.frame_duration - self.gop_length) > 1e-9:
            raise TraceFormatError('GOP length {} is not a multiple of the frame duration {}'.format(
                self.gop_length, self.frame_duration))
        if self.sizes.ndim != 2 or self.sizes.shape[1] != len(self.ladder):
            raise TraceFormatError('level-count mismatch: {} size columns for a {}-level ladder'.format(
                self.sizes.shape[1] if self.sizes.ndim == 2 else 0, len(self.ladder)))
        if self.sizes.shape[0] != self.arrival_times.shape[0]:
            raise TraceFormatError('arrival times and sizes have different frame counts')
        n_frames = self.sizes.shape[0]
        if n_frames == 0:
            raise TraceFormatError('video trace holds no frames')
        if n_frames % frames_per_gop != 0:
            raise TraceFormatError('incomplete final GOP: {} frames is not a multiple of {}'.format(
                n_frames, frames_per_gop))
        if np.any(self.sizes <= 0):
            row = int(np.argwhere(self.sizes <= 0)[0][0])
            raise TraceFormatError('frame {} has a non-positive size'.format(row))
        decreasing = np.flatnonzero(np.diff(self.arrival_times) < 0)
        if decreasing.size:
            raise TraceFormatError('non-monotone arrival at frame {}'.format(int(decreasing[0]) + 1))
        totals = self.gop_sizes()
        bad_gops = np.flatnonzero(np.any(np.diff(totals, axis=1) <= 0, axis=1))
        if bad_gops.size:
            raise TraceFormatError('GOP {} sizes do not increase across quality levels'.format(int(bad_gops[0])))

    @property
    def frames_per_gop(self):
        return int(round(self.gop_length / self.frame_duration))

    @property
    def n_frames(self):
        return self.sizes.shape[0]

    @property
    def n_gops(self):
        return self.n_frames // self.frames_per_gop

    @property
    def n_levels(self):
        return len(self.ladder)

    @property
    def duration(self):
        """Total video length in seconds"""
        return self.n_frames * self.frame_duration

    def gop_sizes(self):
        """Total bits of every GOP at every level, shape (n_gops, M)"""
        return self.sizes.reshape(-1, self.frames_per_gop, self.sizes.shape[1]).sum(axis=1)

    def frame(self, index):
        return FrameRecord(index=index, arrival_time=float(self.arrival_times[index]),
                           sizes=tuple(int(s) for s in self.sizes[index]))

    @property
    def frames(self):
        return [self.frame(k) for k in range(self.n_frames)]

    def newest_frame(self, t):
        """Index of the newest frame available at the CDN at wall time t, -1 if none"""
        return int(np.searchsorted(self.arrival_times, t, side='right')) - 1


@dataclass(frozen=True, eq=False)
class NetworkTrace(object):
    """Piecewise-constant downlink bandwidth (bits/second) over time."""
    times: np.ndarray
    bandwidths: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'times', _frozen(self.times, float))
        object.__setattr__(self, 'bandwidths', _frozen(self.bandwidths, float))
        if self.times.size == 0:
            raise TraceFormatError('network trace is empty')
        if self.times.shape != self.bandwidths.shape:
            raise TraceFormatError('times and bandwidths have different lengths')
        if self.times[0] != 0:
            raise TraceFormatError('trace must start at time 0')
        if np.any(np.diff(self.times) <= 0):
            raise TraceFormatError('non-increasing timestamps in network trace')
        if np.any(self.bandwidths <= 0):
            raise TraceFormatError('non-positive bandwidth in network trace')

    def _piece(self, t):
        return int(np.searchsorted(self.times, t, side='right')) - 1

    def bandwidth_at(self, t):
        """Bandwidth in effect at time t >= 0"""
        if t < 0:
            raise ValueError('time must be non-negative, got {}'.format(t))
        return float(self.bandwidths[self._piece(t)])

    def transfer_end(self, start, bits):
        """Time at which a transfer of `bits` started at `start` completes.

        Integrates the bandwidth exactly across the constant pieces. A transfer
        finishing exactly on a bandwidth step ends on the old piece.
        """
        t = float(start)
        remaining = float(bits)
        piece = self._piece(t)
        while True:
            rate = self.bandwidths[piece]
            piece_end = self.times[piece + 1] if piece + 1 < self.times.size else np.inf
            capacity = rate * (piece_end - t)
            if remaining <= capacity:
                return t + remaining / rate
            remaining -= capacity
            t = piece_end
            piece += 1


def _read_csv(source, what):
    """Reads a CSV into a DataFrame, turning parser failures into format errors"""
    try:
        return pd.read_csv(source, float_precision='round_trip', skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise TraceFormatError('{} trace is empty'.format(what))
    except pd.errors.ParserError as e:
        raise TraceFormatError('malformed row in {} trace: {}'.format(what, e))


def _numeric_columns(df, columns, what):
    """Returns the columns as a float array, rejecting non-numeric, missing and non-finite cells"""
    values = df[columns].apply(pd.to_numeric, errors='coerce').values.astype(float)
    bad = ~np.isfinite(values).all(axis=1)
    if bad.any():
        row = int(np.flatnonzero(bad)[0])
        raise TraceFormatError('malformed row {} in {} trace'.format(row + 1, what))
    return values


def parse_video_trace(source, frame_duration=DEFAULT_FRAME_DURATION, gop_length=DEFAULT_GOP_LENGTH, ladder=None):
    """Parses a video trace CSV from a path or character stream.

    :param ladder: the coding bitrates of the levels, a `BitrateLadder` or a list.
        The CSV does not carry them; defaults to 500/850/1200/1850 kbps.
    """
    df = _read_csv(source, 'video')
    df.columns = [str(c).strip() for c in df.columns]
    size_columns = [c for c in df.columns if c.startswith(VIDEO_SIZE_PREFIX)]
    expected = [VIDEO_INDEX_COLUMN, VIDEO_ARRIVAL_COLUMN] + \
               ['{}{}'.format(VIDEO_SIZE_PREFIX, m) for m in range(len(size_columns))]
    if list(df.columns) != expected:
        raise TraceFormatError('unexpected video trace header: {}'.format(','.join(df.columns)))
    if len(df) == 0:
        raise TraceFormatError('video trace holds no frames')

    values = _numeric_columns(df, expected, 'video')
    indices, arrivals, sizes = values[:, 0], values[:, 1], values[:, 2:]
    if not np.array_equal(indices, np.arange(len(df))):
        raise TraceFormatError('frame indices must run 0..{} in order'.format(len(df) - 1))
    if np.any(sizes != np.round(sizes)):
        raise TraceFormatError('frame sizes must be whole numbers of bits')

    if ladder is None:
        ladder = BitrateLadder(DEFAULT_LADDER)
    elif not isinstance(ladder, BitrateLadder):
        ladder = BitrateLadder(tuple(ladder))
    if len(ladder) != sizes.shape[1]:
        raise TraceFormatError('level-count mismatch: {} size columns for a {}-level ladder'.format(
            sizes.shape[1], len(ladder)))

    return VideoTrace(frame_duration=frame_duration, gop_length=gop_length, ladder=ladder,
                      arrival_times=arrivals, sizes=sizes.astype(np.int64))


def parse_network_trace(source):
    """Parses a network trace CSV from a path or character stream"""
    df = _read_csv(source, 'network')
    df.columns = [str(c).strip() for c in df.columns]
    if list(df.columns) != NETWORK_COLUMNS:
        raise TraceFormatError('unexpected network trace header: {}'.format(','.join(df.columns)))
    if len(df) == 0:
        raise TraceFormatError('network trace is empty')
    values = _numeric_columns(df, NETWORK_COLUMNS, 'network')
    return NetworkTrace(times=values[:, 0], bandwidths=values[:, 1])


def segment_actual_bitrate(trace, segment_index, level):
    """Actual bitrate (bits/second) of GOP `segment_index` at `level`"""
    if not 0 <= segment_index < trace.n_gops:
        raise IndexError('segment {} out of range [0, {})'.format(segment_index, trace.n_gops))
    if not 0 <= level < trace.n_levels:
        raise IndexError('level {} out of range [0, {})'.format(level, trace.n_levels))
    first = segment_index * trace.frames_per_gop
    total = trace.sizes[first:first + trace.frames_per_gop, level].sum()
    return float(total) / trace.gop_length


def video_trace_frame(trace):
    """The trace as a DataFrame in the CSV layout"""
    columns = {VIDEO_INDEX_COLUMN: np.arange(trace.n_frames),
               VIDEO_ARRIVAL_COLUMN: trace.arrival_times}
    for m in range(trace.n_levels):
        columns['{}{}'.format(VIDEO_SIZE_PREFIX, m)] = trace.sizes[:, m]
    return pd.DataFrame(columns)


def write_video_trace(trace, sink):
    """Writes the trace to a path or character stream"""
    video_trace_frame(trace).to_csv(sink, index=False)


def write_network_trace(trace, sink):
    df = pd.DataFrame({NETWORK_COLUMNS[0]: trace.times, NETWORK_COLUMNS[1]: trace.bandwidths})
    df.to_csv(sink, index=False)


def load_video_trace(path, frame_duration=DEFAULT_FRAME_DURATION, gop_length=DEFAULT_GOP_LENGTH, ladder=None):
    """Reads a video trace file"""
    with open(path) as f:
        return parse_video_trace(f, frame_duration=frame_duration, gop_length=gop_length, ladder=ladder)


def load_network_trace(path):
    with open(path) as f:
        return parse_network_trace(f)


def trace_id(path):
    """Identifier of a trace file: its base name without extension"""
    return re.sub(r'\.csv$', '', path.replace('\\', '/').split('/')[-1])

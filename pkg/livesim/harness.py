"""Batch runs over video x network x scheme matrices, QoE summaries and CDFs."""
import os
from dataclasses import dataclass

import dask
import numpy as np
import pandas as pd

from livesim.controllers import make_controller
from livesim.log import logger
from livesim.predictor import evaluate_prediction, prediction_error
from livesim.qoe import QoeBreakdown, score_run
from livesim.simulator import run
from livesim.utils.general import dict_combinations, zip_dicts

SUMMARY_COLUMNS = ['video', 'network', 'scheme', 'qoe_overall', 'qoe_quality', 'qoe_rebuf', 'qoe_latency',
                   'qoe_skip', 'qoe_switch', 'pred_error', 'stalls', 'skips']
CDF_METRICS = ['qoe_overall', 'qoe_quality', 'qoe_rebuf', 'qoe_latency', 'qoe_skip', 'qoe_switch', 'pred_error',
               'stalls', 'skips']


class MatrixRunError(RuntimeError):
    """A run of the matrix failed; `triple` is its (video, network, scheme)"""

    def __init__(self, message, triple=None):
        super().__init__(message)
        self.triple = triple


@dataclass(frozen=True)
class RunSummary(object):
    video: str
    network: str
    scheme: str
    breakdown: QoeBreakdown
    pred_error: float
    stalls: int
    skips: int

    def as_dict(self):
        row = {'video': self.video, 'network': self.network, 'scheme': self.scheme}
        row.update(self.breakdown.as_dict())
        row.update({'pred_error': self.pred_error, 'stalls': self.stalls, 'skips': self.skips})
        return row


def run_prediction_error(log, video):
    """Mean relative error of the logged per-level predictions against the
    actual GOP bitrates; NaN when the scheme makes no predictions."""
    actual = video.gop_sizes() / video.gop_length
    errors = [prediction_error(record.decision.predictions, actual[record.segment])
              for record in log.segments if record.decision.predictions is not None]
    if not errors:
        return np.nan
    return float(np.mean(errors))


def run_one(video, network, scheme, cfg, video_id='video', network_id='network'):
    """Simulates a single run; returns (RunSummary, SimulationLog)"""
    controller = make_controller(scheme)
    log = run(video, network, cfg, controller)
    summary = RunSummary(video=video_id, network=network_id, scheme=controller.name,
                         breakdown=score_run(cfg.weights, log), pred_error=run_prediction_error(log, video),
                         stalls=log.stalls, skips=log.skip_events)
    return summary, log


def _run_task(video_id, video, network_id, network, scheme, cfg):
    try:
        summary, _ = run_one(video, network, scheme, cfg, video_id=video_id, network_id=network_id)
    except Exception as e:
        raise MatrixRunError('run ({}, {}, {}) failed: {}'.format(video_id, network_id, scheme, e),
                             triple=(video_id, network_id, scheme)) from e
    logger.debug('Finished ({}, {}, {}): QoE {:.2f}'.format(video_id, network_id, scheme,
                                                          summary.breakdown.overall))
    return summary


def run_matrix(videos, networks, schemes, cfg, num_workers=1):
    """One summary per (video, network, scheme), in that nesting order.

    :param videos: dict of id -> VideoTrace
    :param networks: dict of id -> NetworkTrace
    :param schemes: list of scheme ids
    :param num_workers: 1 runs serially, more uses dask's process scheduler
    """
    if not videos or not networks or not schemes:
        raise ValueError('run_matrix needs at least one video, network and scheme')
    tasks = dict_combinations([{'video_id': key, 'video': value} for key, value in videos.items()],
                              [{'network_id': key, 'network': value} for key, value in networks.items()],
                              [{'scheme': scheme} for scheme in schemes])
    logger.info('Running {} simulations'.format(len(tasks)))

    if num_workers == 1:
        return [_run_task(cfg=cfg, **task) for task in tasks]

    delayed_runs = [dask.delayed(_run_task)(cfg=cfg, **task) for task in tasks]
    return list(dask.compute(*delayed_runs, scheduler='processes', num_workers=num_workers))


def summary_table(summaries):
    """Summaries as a DataFrame in the summary.csv layout"""
    if not summaries:
        return pd.DataFrame(columns=SUMMARY_COLUMNS)
    return pd.DataFrame(zip_dicts(*[summary.as_dict() for summary in summaries]), columns=SUMMARY_COLUMNS)


def mean_table(summaries):
    """Per-scheme averages of every numeric column, schemes in first-seen order"""
    df = summary_table(summaries)
    return df.drop(columns=['video', 'network']).groupby('scheme', sort=False).mean()


def emit_cdf(summaries, metric):
    """Empirical CDF of a summary metric: one row per distinct value.

    NaN values (e.g. the prediction error of a scheme without predictions) are left out.
    """
    if metric not in CDF_METRICS:
        raise ValueError('unknown metric {!r}; expected one of {}'.format(metric, ', '.join(CDF_METRICS)))
    values = summary_table(summaries)[metric].astype(float).dropna()
    if values.empty:
        return pd.DataFrame(columns=['value', 'fraction'])
    counts = values.value_counts().sort_index()
    return pd.DataFrame({'value': counts.index.values,
                         'fraction': counts.cumsum().values / float(values.size)})


def scheme_cdfs(summaries, metric):
    """emit_cdf per scheme, stacked with a leading scheme column"""
    frames = []
    for scheme in dict.fromkeys(summary.scheme for summary in summaries):
        cdf = emit_cdf([s for s in summaries if s.scheme == scheme], metric)
        cdf.insert(0, 'scheme', scheme)
        frames.append(cdf)
    return pd.concat(frames, ignore_index=True)


def write_results(summaries, out_dir):
    """Writes summary.csv and one cdf_<metric>.csv per metric; returns the paths"""
    os.makedirs(out_dir, exist_ok=True)
    paths = [os.path.join(out_dir, 'summary.csv')]
    summary_table(summaries).to_csv(paths[0], index=False)
    for metric in CDF_METRICS:
        paths.append(os.path.join(out_dir, 'cdf_{}.csv'.format(metric)))
        scheme_cdfs(summaries, metric).to_csv(paths[-1], index=False)
    logger.info('Wrote {} result files to {}'.format(len(paths), out_dir))
    return paths


def prediction_table(videos, cfg=None):
    """KAMA and coding-bitrate prediction errors per video"""
    rows = []
    for video_id, video in videos.items():
        kama_error, coding_error = evaluate_prediction(video, cfg)
        rows.append((video_id, kama_error, coding_error))
    return pd.DataFrame(rows, columns=['video', 'kama_error', 'coding_error'])

import os
import tempfile
import unittest

import numpy as np
import pandas as pd

from livesim.config import SchemeConfig
from livesim.controllers import FixedController
from livesim.generation import VIDEO_TYPES, generate_cbr_video, generate_network, generate_suite
from livesim.harness import (CDF_METRICS, SUMMARY_COLUMNS, MatrixRunError, RunSummary, emit_cdf, mean_table,
                             prediction_table, run_matrix, run_one, scheme_cdfs, summary_table, write_results)
from livesim.qoe import QoeBreakdown, score_run
from livesim.simulator import run


def summary(stalls, scheme='S', pred_error=np.nan):
    return RunSummary(video='v', network='n', scheme=scheme, breakdown=QoeBreakdown(), pred_error=pred_error,
                      stalls=stalls, skips=0)


def small_matrix():
    videos = {'cbr': generate_cbr_video(duration=10.)}
    networks = {'slow': generate_network(np.random.default_rng(1), 0.8e6, 0.1e6, duration=30.),
                'bursty': generate_network(np.random.default_rng(2), 1.93e6, 2.0e6, duration=30.)}
    return videos, networks


class TestEmitCdf(unittest.TestCase):
    def test_hand_values(self):
        cdf = emit_cdf([summary(s) for s in [1, 2, 2, 4]], 'stalls')
        np.testing.assert_array_equal(cdf['value'], [1., 2., 4.])
        np.testing.assert_allclose(cdf['fraction'], [0.25, 0.75, 1.])

    def test_singleton(self):
        cdf = emit_cdf([summary(3)], 'stalls')
        self.assertEqual(len(cdf), 1)
        self.assertEqual(cdf['fraction'].iloc[0], 1.)

    def test_missing_values(self):
        self.assertTrue(emit_cdf([summary(1), summary(2)], 'pred_error').empty)
        cdf = emit_cdf([summary(1, pred_error=0.2), summary(2)], 'pred_error')
        self.assertEqual(list(cdf['fraction']), [1.])

    def test_unknown_metric(self):
        with self.assertRaises(ValueError):
            emit_cdf([summary(1)], 'qoe_magic')

    def test_per_scheme(self):
        summaries = [summary(1, 'A'), summary(3, 'B'), summary(2, 'A')]
        cdfs = scheme_cdfs(summaries, 'stalls')
        self.assertListEqual(list(cdfs.columns), ['scheme', 'value', 'fraction'])
        self.assertListEqual(list(cdfs['scheme']), ['A', 'A', 'B'])
        self.assertListEqual(list(cdfs['fraction']), [0.5, 1., 1.])


class TestRuns(unittest.TestCase):
    def test_single_run_matches_scoring(self):
        cfg = SchemeConfig()
        videos, networks = small_matrix()
        networks = {'slow': networks['slow']}
        summaries = run_matrix(videos, networks, ['FIXED(0)'], cfg)
        self.assertEqual(len(summaries), 1)

        log = run(videos['cbr'], networks['slow'], cfg, FixedController(0))
        self.assertEqual(summaries[0].breakdown, score_run(cfg.weights, log))
        self.assertEqual((summaries[0].video, summaries[0].network, summaries[0].scheme), ('cbr', 'slow', 'FIXED(0)'))
        self.assertTrue(np.isnan(summaries[0].pred_error))

    def test_run_one(self):
        cfg = SchemeConfig()
        videos, networks = small_matrix()
        result, log = run_one(videos['cbr'], networks['bursty'], 'HYSA', cfg, video_id='cbr', network_id='bursty')
        self.assertEqual(result.stalls, log.stalls)
        self.assertEqual(result.skips, log.skip_events)
        # predictions on a constant-bitrate video are exact
        self.assertEqual(result.pred_error, 0.)

    def test_matrix_order(self):
        videos, networks = small_matrix()
        summaries = run_matrix(videos, networks, ['HYSA', 'FIXED(1)'], SchemeConfig())
        triples = [(s.video, s.network, s.scheme) for s in summaries]
        self.assertListEqual(triples, [('cbr', 'slow', 'HYSA'), ('cbr', 'slow', 'FIXED(1)'),
                                       ('cbr', 'bursty', 'HYSA'), ('cbr', 'bursty', 'FIXED(1)')])

    def test_determinism(self):
        videos, networks = small_matrix()
        schemes = ['HYSA', 'LOOKAHEAD', 'BUFFER-THRESHOLD']
        first = summary_table(run_matrix(videos, networks, schemes, SchemeConfig()))
        second = summary_table(run_matrix(videos, networks, schemes, SchemeConfig()))
        self.assertEqual(first.to_csv(index=False), second.to_csv(index=False))

    def test_parallel_matches_serial(self):
        videos, networks = small_matrix()
        serial = summary_table(run_matrix(videos, networks, ['HYSA-N'], SchemeConfig()))
        parallel = summary_table(run_matrix(videos, networks, ['HYSA-N'], SchemeConfig(), num_workers=2))
        self.assertEqual(serial.to_csv(index=False), parallel.to_csv(index=False))

    def test_failure_names_the_run(self):
        videos, networks = small_matrix()
        with self.assertRaises(MatrixRunError) as cm:
            run_matrix(videos, {'slow': networks['slow']}, ['FIXED(9)'], SchemeConfig())
        self.assertEqual(cm.exception.triple, ('cbr', 'slow', 'FIXED(9)'))

    def test_empty_matrix(self):
        with self.assertRaises(ValueError):
            run_matrix({}, {'n': None}, ['HYSA'], SchemeConfig())


class TestResults(unittest.TestCase):
    def test_write_results(self):
        summaries = [summary(1, 'A', 0.1), summary(2, 'B')]
        with tempfile.TemporaryDirectory() as out_dir:
            paths = write_results(summaries, os.path.join(out_dir, 'results'))
            self.assertEqual(len(paths), 1 + len(CDF_METRICS))
            self.assertTrue(all(os.path.isfile(path) for path in paths))

            table = pd.read_csv(os.path.join(out_dir, 'results', 'summary.csv'))
            self.assertListEqual(list(table.columns), SUMMARY_COLUMNS)
            self.assertListEqual(list(table['scheme']), ['A', 'B'])

            cdf = pd.read_csv(os.path.join(out_dir, 'results', 'cdf_stalls.csv'))
            self.assertListEqual(list(cdf.columns), ['scheme', 'value', 'fraction'])

    def test_empty_summary_table(self):
        self.assertListEqual(list(summary_table([]).columns), SUMMARY_COLUMNS)

    def test_mean_table(self):
        summaries = [summary(1, 'B'), summary(3, 'B'), summary(2, 'A')]
        means = mean_table(summaries)
        self.assertListEqual(list(means.index), ['B', 'A'])
        self.assertEqual(means.loc['B', 'stalls'], 2.)


class TestSyntheticSuite(unittest.TestCase):
    """The three VBR videos against the twelve synthetic networks"""

    @classmethod
    def setUpClass(cls):
        cls.cfg = SchemeConfig()
        videos, cls.networks = generate_suite(seed=0)
        cls.videos = {name: videos[name] for name in VIDEO_TYPES}
        cls.summaries = run_matrix(cls.videos, cls.networks, ['HYSA', 'HYSA-N'], cls.cfg)

    def test_full_matrix(self):
        self.assertEqual(len(self.summaries), 3 * 12 * 2)

    def test_prediction_beats_coding_bitrates(self):
        table = prediction_table(self.videos, self.cfg)
        self.assertLess(table['kama_error'].mean(), table['coding_error'].mean())

        by_scheme = summary_table(self.summaries).groupby('scheme')['pred_error'].mean()
        self.assertLess(by_scheme['HYSA'], by_scheme['HYSA-N'])

    def test_hybrid_not_worse_than_ablation(self):
        means = mean_table(self.summaries)
        self.assertGreaterEqual(means.loc['HYSA', 'qoe_overall'], means.loc['HYSA-N', 'qoe_overall'])

    def test_repeatable_and_conserving(self):
        """Running the matrix a second time gives the same tables, and every run accounts for all video"""
        for video_id, video in self.videos.items():
            for network_id, network in self.networks.items():
                for scheme in ['HYSA', 'HYSA-N']:
                    triple = '({}, {}, {})'.format(video_id, network_id, scheme)
                    _, first = run_one(video, network, scheme, self.cfg)
                    _, second = run_one(video, network, scheme, self.cfg)
                    self.assertEqual(first.frame_table().to_csv(index=False),
                                     second.frame_table().to_csv(index=False), msg=triple)
                    self.assertEqual(first.segment_table().to_csv(index=False),
                                     second.segment_table().to_csv(index=False), msg=triple)
                    self.assertLess(abs(first.conservation_gap()), 1e-6, msg=triple)
                    self.assertLess(abs(second.conservation_gap()), 1e-6, msg=triple)

    def test_cdfs(self):
        table = summary_table(self.summaries)
        for metric in CDF_METRICS:
            cdf = emit_cdf(self.summaries, metric)
            self.assertTrue(np.all(np.diff(cdf['fraction']) >= 0), msg=metric)
            self.assertTrue(np.all(np.diff(cdf['value']) > 0), msg=metric)
            self.assertEqual(cdf['fraction'].iloc[-1], 1., msg=metric)
            self.assertEqual(len(cdf), table[metric].nunique(), msg=metric)


if __name__ == '__main__':
    unittest.main()

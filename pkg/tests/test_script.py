import os
import tempfile
import unittest

import pandas as pd
from click.testing import CliRunner

from livesim.cli.script import script
from livesim.harness import CDF_METRICS, SUMMARY_COLUMNS


class TestScript(unittest.TestCase):
    def setUp(self):
        self.runner = CliRunner()
        self.tmp = tempfile.TemporaryDirectory()
        self.traces = os.path.join(self.tmp.name, 'traces')
        result = self.runner.invoke(script, ['gen-traces', '--seed', '3', '--out', self.traces])
        self.assertEqual(result.exit_code, 0, msg=result.output)

    def tearDown(self):
        self.tmp.cleanup()

    def test_gen_traces(self):
        self.assertEqual(len(os.listdir(os.path.join(self.traces, 'videos'))), 4)
        self.assertEqual(len(os.listdir(os.path.join(self.traces, 'networks'))), 12)

    def test_simulate(self):
        out = os.path.join(self.tmp.name, 'single')
        network = os.path.join(self.traces, 'networks', 'net_m1370_s0100.csv')
        result = self.runner.invoke(script, ['simulate', '--network', network, '--scheme', 'HYSA', '--out', out,
                                             '-p', 'skip_enabled', 'false'])
        self.assertEqual(result.exit_code, 0, msg=result.output)
        for name in ['frames.csv', 'segments.csv', 'summary.csv']:
            self.assertTrue(os.path.isfile(os.path.join(out, name)), msg=name)

        summary = pd.read_csv(os.path.join(out, 'summary.csv'))
        self.assertListEqual(list(summary.columns), SUMMARY_COLUMNS)
        self.assertEqual(summary['video'].iloc[0], 'synthetic_vbr')
        self.assertEqual(summary['skips'].iloc[0], 0)

    def test_batch(self):
        out = os.path.join(self.tmp.name, 'batch')
        result = self.runner.invoke(script, ['batch', '--videos', os.path.join(self.traces, 'videos'),
                                             '--networks', os.path.join(self.traces, 'networks'),
                                             '--schemes', 'FIXED(0)', '--out', out])
        self.assertEqual(result.exit_code, 0, msg=result.output)
        summary = pd.read_csv(os.path.join(out, 'summary.csv'))
        self.assertEqual(len(summary), 4 * 12)
        for metric in CDF_METRICS:
            self.assertTrue(os.path.isfile(os.path.join(out, 'cdf_{}.csv'.format(metric))))

    def test_unknown_scheme(self):
        result = self.runner.invoke(script, ['batch', '--videos', os.path.join(self.traces, 'videos'),
                                             '--networks', os.path.join(self.traces, 'networks'),
                                             '--schemes', 'HYSA,MPC', '--out', self.tmp.name])
        self.assertNotEqual(result.exit_code, 0)
        self.assertIn('unknown scheme', result.output)

    def test_bad_parameter(self):
        network = os.path.join(self.traces, 'networks', 'net_m0800_s0100.csv')
        result = self.runner.invoke(script, ['simulate', '--network', network, '--out', self.tmp.name,
                                             '-p', 'lam', '0'])
        self.assertNotEqual(result.exit_code, 0)
        self.assertIn('lam', result.output)

    def test_prediction_error(self):
        result = self.runner.invoke(script, ['prediction-error', '--videos', os.path.join(self.traces, 'videos')])
        self.assertEqual(result.exit_code, 0, msg=result.output)
        self.assertIn('kama_error', result.output)


if __name__ == '__main__':
    unittest.main()

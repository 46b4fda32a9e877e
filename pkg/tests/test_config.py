import io
import unittest

from livesim.config import ConfigError, SchemeConfig, build_config, load_config, parse_config, parse_value
from livesim.traces import EXAMPLE_CONFIG


class TestSchemeConfig(unittest.TestCase):
    def test_defaults(self):
        cfg = SchemeConfig()
        self.assertEqual(cfg.p_d, cfg.p_l)
        self.assertEqual(cfg.b_th, cfg.b_min_0)
        self.assertEqual(cfg.bt_low, cfg.b_min_1)
        self.assertEqual(cfg.bt_high, cfg.b_max_0)
        self.assertEqual(cfg.ladder, (500e3, 850e3, 1200e3, 1850e3))
        self.assertEqual(cfg.controller, 'HYSA')

    def test_empty_file(self):
        self.assertEqual(parse_config(io.StringIO('')), SchemeConfig())

    def test_band_ordering(self):
        with self.assertRaises(ConfigError):
            build_config({'b_min_1': 0.4})
        with self.assertRaises(ConfigError):
            build_config({'b_target_1': 3.0})

    def test_parameter_ranges(self):
        for params in [{'l_min': 0}, {'l_max': 2}, {'n_1': 0}, {'lam': 0}, {'beta': -1}, {'b_th': -0.1},
                       {'window': 0}, {'l_max': 2.5}, {'skip_enabled': 'yes'}, {'ladder': [1e6]}]:
            with self.assertRaises(ConfigError, msg=str(params)):
                build_config(params)

    def test_unknown_key(self):
        with self.assertRaisesRegex(ConfigError, 'p_x'):
            build_config({'p_x': 1})

    def test_derived_defaults_follow_overrides(self):
        cfg = build_config({'p_l': 0.01, 'b_min_0': 0.3})
        self.assertEqual(cfg.p_d, 0.01)
        self.assertEqual(cfg.b_th, 0.3)

        cfg = build_config({'p_l': 0.01, 'p_d': 0.02})
        self.assertEqual(cfg.p_d, 0.02)

    def test_updated(self):
        cfg = SchemeConfig().updated(p_l=0.5)
        self.assertEqual(cfg.p_d, 0.5)
        explicit = SchemeConfig(p_d=0.1).updated(p_l=0.5)
        self.assertEqual(explicit.p_d, 0.1)


class TestParsing(unittest.TestCase):
    def test_parse_value(self):
        self.assertEqual(parse_value('1.5'), 1.5)
        self.assertEqual(parse_value('true'), True)
        self.assertEqual(parse_value('[1, 2]'), [1, 2])
        self.assertEqual(parse_value('HYSA-N'), 'HYSA-N')

    def test_file(self):
        text = '# comment\n\np_r = 3   # heavier stalls\ncontroller = LOOKAHEAD\nladder = [1000, 2000]\n'
        cfg = parse_config(io.StringIO(text))
        self.assertEqual(cfg.p_r, 3.)
        self.assertIsInstance(cfg.p_r, float)
        self.assertEqual(cfg.controller, 'LOOKAHEAD')
        self.assertEqual(cfg.ladder, (1000., 2000.))

    def test_overrides_win(self):
        cfg = parse_config(io.StringIO('p_r = 3\np_s = 2\n'), overrides={'p_r': 4})
        self.assertEqual(cfg.p_r, 4.)
        self.assertEqual(cfg.p_s, 2.)

    def test_malformed_line(self):
        with self.assertRaisesRegex(ConfigError, 'line 2'):
            parse_config(io.StringIO('p_r = 3\np_s 2\n'))

    def test_duplicate_key(self):
        with self.assertRaisesRegex(ConfigError, 'duplicate'):
            parse_config(io.StringIO('p_r = 3\np_r = 2\n'))

    def test_example_file(self):
        """The bundled example holds the defaults"""
        self.assertEqual(load_config(EXAMPLE_CONFIG), SchemeConfig())


if __name__ == '__main__':
    unittest.main()

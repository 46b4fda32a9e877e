"""Scheme configuration: flat ``key = value`` files layered over documented defaults.

Values are JSON values (``1.5``, ``true``, ``[500000, 850000]``); anything that
does not parse as JSON is kept as a bare string, so ``controller = HYSA`` works.
Unknown keys are rejected to catch typos.
"""
import json
from dataclasses import dataclass, field, fields, replace

from livesim.log import logger
from livesim.qoe import QoeWeights
from livesim.playback import TargetBufferBands
from livesim.traces import DEFAULT_FRAME_DURATION, DEFAULT_GOP_LENGTH, DEFAULT_LADDER, BitrateLadder


class ConfigError(ValueError):
    """Raised for unknown keys or values breaking a configuration invariant"""
    pass


@dataclass(frozen=True)
class SchemeConfig(object):
    """Every tunable of the simulator and the controllers.

    Weights follow the QoE model: quality is scored with bitrates in kbps and
    durations in seconds. `p_d` and `b_th` left as None follow `p_l` and
    `b_min_0` respectively.
    """
    # QoE weights
    p_q: float = 1.0
    p_r: float = 1.5
    p_l: float = 0.005
    p_s: float = 1.0
    p_w: float = 0.02
    p_d: float = None

    # target-buffer tuples, seconds
    b_min_0: float = 0.5
    b_target_0: float = 1.5
    b_max_0: float = 2.5
    b_min_1: float = 1.0
    b_target_1: float = 2.0
    b_max_1: float = 3.5

    # segment bitrate prediction
    l_max: int = 30
    l_min: int = 2
    n_1: int = 10
    window: int = 5

    # bitrate and frame-drop control
    beta: float = 1.0
    b_th: float = None
    lam: float = 1.5
    skip_enabled: bool = True

    # content
    frame_duration: float = DEFAULT_FRAME_DURATION
    gop_length: float = DEFAULT_GOP_LENGTH
    ladder: tuple = field(default=DEFAULT_LADDER)

    # scheme selection and baseline parameters
    controller: str = 'HYSA'
    horizon: int = 5
    bt_low: float = None
    bt_high: float = None

    def __post_init__(self):
        # resolve the derived defaults
        if self.p_d is None:
            object.__setattr__(self, 'p_d', self.p_l)
        if self.b_th is None:
            object.__setattr__(self, 'b_th', self.b_min_0)
        if self.bt_low is None:
            object.__setattr__(self, 'bt_low', self.b_min_1)
        if self.bt_high is None:
            object.__setattr__(self, 'bt_high', self.b_max_0)
        object.__setattr__(self, 'ladder', tuple(float(v) for v in self.ladder))
        self.validate()

    @property
    def weights(self):
        return QoeWeights(p_q=self.p_q, p_r=self.p_r, p_l=self.p_l,
                          p_s=self.p_s, p_w=self.p_w, p_d=self.p_d)

    @property
    def bands(self):
        return TargetBufferBands(b_min_0=self.b_min_0, b_target_0=self.b_target_0, b_max_0=self.b_max_0,
                                 b_min_1=self.b_min_1, b_target_1=self.b_target_1, b_max_1=self.b_max_1)

    @property
    def bitrate_ladder(self):
        return BitrateLadder(self.ladder)

    def validate(self):
        """Checks every invariant, raising ConfigError on the first broken one"""
        try:
            self.weights
            self.bands
            self.bitrate_ladder
        except ValueError as e:
            raise ConfigError(str(e))

        for name in ['l_max', 'l_min', 'n_1', 'window', 'horizon']:
            if not isinstance(getattr(self, name), int) or isinstance(getattr(self, name), bool):
                raise ConfigError('{} must be an integer, got {!r}'.format(name, getattr(self, name)))
        if self.l_min < 1:
            raise ConfigError('l_min must be >= 1, got {}'.format(self.l_min))
        if self.l_max <= self.l_min:
            raise ConfigError('l_max must exceed l_min ({} <= {})'.format(self.l_max, self.l_min))
        if self.n_1 < 1:
            raise ConfigError('n_1 must be >= 1, got {}'.format(self.n_1))
        if self.window < 1:
            raise ConfigError('window must be >= 1, got {}'.format(self.window))
        if self.horizon < 1:
            raise ConfigError('horizon must be >= 1, got {}'.format(self.horizon))
        if not self.lam > 0:
            raise ConfigError('lam must be positive, got {}'.format(self.lam))
        if not self.beta > 0:
            raise ConfigError('beta must be positive, got {}'.format(self.beta))
        if self.b_th < 0:
            raise ConfigError('b_th must be non-negative, got {}'.format(self.b_th))
        if not 0 <= self.bt_low < self.bt_high:
            raise ConfigError('need 0 <= bt_low < bt_high, got {} and {}'.format(self.bt_low, self.bt_high))
        if self.frame_duration <= 0 or self.gop_length <= 0:
            raise ConfigError('frame_duration and gop_length must be positive')
        if not isinstance(self.skip_enabled, bool):
            raise ConfigError('skip_enabled must be true or false, got {!r}'.format(self.skip_enabled))
        if not isinstance(self.controller, str):
            raise ConfigError('controller must be a scheme name, got {!r}'.format(self.controller))

    def updated(self, **params):
        """A copy with the given keys overridden; derived defaults are re-resolved
        unless given explicitly."""
        check_keys(params)
        base = {f.name: getattr(self, f.name) for f in fields(self)}
        for derived, source in DERIVED_DEFAULTS.items():
            if derived not in params and source in params and base[derived] == base[source]:
                base[derived] = None
        base.update(params)
        try:
            return replace(self, **base)
        except TypeError as e:
            raise ConfigError(str(e))


# key -> the key it defaults to
DERIVED_DEFAULTS = {'p_d': 'p_l', 'b_th': 'b_min_0', 'bt_low': 'b_min_1', 'bt_high': 'b_max_0'}


def config_keys():
    return [f.name for f in fields(SchemeConfig)]


def check_keys(params):
    unknown = sorted(set(params) - set(config_keys()))
    if unknown:
        raise ConfigError('unknown configuration key(s): {}'.format(', '.join(unknown)))


def parse_value(text):
    """A JSON value, or the bare string when it is not valid JSON"""
    try:
        return json.loads(text)
    except ValueError:
        return text


def _coerce(name, value):
    """Ints are accepted for float fields; lists become tuples"""
    default = {f.name: f.default for f in fields(SchemeConfig)}[name]
    if isinstance(default, float) and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    if name == 'ladder':
        if not isinstance(value, (list, tuple)):
            raise ConfigError('ladder must be a list of bitrates, got {!r}'.format(value))
        return tuple(value)
    return value


def parse_config_text(source):
    """Parses ``key = value`` lines from a character stream into a dict"""
    params = {}
    for line_no, raw_line in enumerate(source, start=1):
        line = raw_line.split('#', 1)[0].strip()
        if not line:
            continue  # blank or comment
        if '=' not in line:
            raise ConfigError('line {}: expected "key = value", got {!r}'.format(line_no, raw_line.rstrip()))
        key, value = (part.strip() for part in line.split('=', 1))
        if key in params:
            raise ConfigError('line {}: duplicate key {}'.format(line_no, key))
        params[key] = parse_value(value)
    return params


def build_config(params=None, base=None):
    """Builds a validated SchemeConfig from a dict of overrides"""
    params = dict(params or {})
    check_keys(params)
    params = {key: _coerce(key, value) for key, value in params.items()}
    if base is not None:
        return base.updated(**params)
    try:
        return SchemeConfig(**params)
    except TypeError as e:
        raise ConfigError(str(e))


def parse_config(source, overrides=None):
    """Parses a config stream; `overrides` (a dict, e.g. from the CLI) win over the file"""
    params = parse_config_text(source) if source is not None else {}
    params.update(overrides or {})
    logger.debug('Configuration overrides: {}'.format(params))
    return build_config(params)


def load_config(path=None, overrides=None):
    """Reads a config file, or only the defaults and overrides when path is None"""
    if path is None:
        return parse_config(None, overrides)
    with open(path) as f:
        return parse_config(f, overrides)

"""Sweep configuration: presets, flat key-value files and --set overrides.

File format, one setting per line::

    # comments start with '#'
    [model]
    dt = 0.1
    sigma_w = 1e-3              # scalar s means s * I
    prior_mean = [10.0, 0.0]
    [sweep]
    h_list = [0, 1, 2, 5, 10, 20]

Keys may also be written fully dotted (``sweep.horizon = 300``) outside any
section. Values are Python literals; ``true``/``false`` and bare words are
accepted for booleans and strings.
"""

import ast
import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .gaussian import GaussianBelief
from .model import double_integrator

PAPER_H_LIST = (0, 1, 2, 5, 10, 20, 50, 100)


@dataclass
class SweepConfig:
    dt: float = 0.1
    sigma_w: object = 1e-3
    sigma_v: object = 0.1
    q: object = 1.0
    r: object = 0.1
    prior_mean: tuple = (10.0, 0.0)
    prior_cov: object = 1.0
    gamma: float = 0.99
    input_scale: float = 1.0
    open_loop: bool = False
    h_list: tuple = PAPER_H_LIST
    horizon: int = 1000
    seeds: int = 50
    root_seed: int = 20240601
    burn_in: int = 0
    jobs: int = 1
    out_dir: str = "out"
    plots: bool = True
    obs_only: bool = False

    def build_model(self):
        m0 = np.asarray(self.prior_mean, dtype=float)
        n = m0.shape[0]
        model = double_integrator(
            dt=self.dt,
            sigma_w=_matrix(self.sigma_w, n),
            sigma_v=_matrix(self.sigma_v, 1),
            q=_matrix(self.q, n),
            r=_matrix(self.r, 1),
            prior=GaussianBelief(m0, _matrix(self.prior_cov, n)),
            gamma=self.gamma,
        )
        if self.input_scale != 1.0:
            model = model.replace(B=self.input_scale * model.B)
        return model

    def rollout_seed(self, index):
        """64-bit seed of the index-th rollout, derived from root_seed."""
        ss = np.random.SeedSequence([int(self.root_seed), int(index)])
        return int(ss.generate_state(1, dtype=np.uint64)[0])

    def echo(self):
        lines = []
        for key, attr in sorted(KEYS.items()):
            lines.append(f"{key} = {_format(getattr(self, attr))}")
        return "\n".join(lines) + "\n"


def _matrix(value, n):
    a = np.asarray(value, dtype=float)
    if a.ndim == 0:
        return float(a) * np.eye(n)
    if a.ndim == 1:
        return np.diag(a)
    return a


def _format(value):
    if isinstance(value, np.ndarray):
        value = value.tolist()
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    return repr(value)


# scalar s means s * I, a vector means diag, a nested list is taken as is
MATRIX_ATTRS = ("sigma_w", "sigma_v", "q", "r", "prior_cov")

# dotted config key -> SweepConfig attribute
KEYS = {
    "model.dt": "dt",
    "model.sigma_w": "sigma_w",
    "model.sigma_v": "sigma_v",
    "model.q": "q",
    "model.r": "r",
    "model.prior_mean": "prior_mean",
    "model.prior_cov": "prior_cov",
    "model.gamma": "gamma",
    "model.input_scale": "input_scale",
    "controller.open_loop": "open_loop",
    "sweep.h_list": "h_list",
    "sweep.horizon": "horizon",
    "sweep.seeds": "seeds",
    "sweep.root_seed": "root_seed",
    "sweep.burn_in": "burn_in",
    "sweep.jobs": "jobs",
    "sweep.obs_only": "obs_only",
    "output.dir": "out_dir",
    "output.plots": "plots",
}

PRESETS = {
    "desk": {"sweep.horizon": 300, "sweep.seeds": 20,
             "sweep.h_list": (0, 1, 2, 5, 10, 20)},
    "paper": {"sweep.horizon": 1000, "sweep.seeds": 50,
              "sweep.h_list": PAPER_H_LIST},
}


def parse_value(text):
    text = text.strip()
    low = text.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        if text[:1] in "[({\"'":
            raise ConfigError(f"cannot parse value {text!r}")
        return text


def parse_text(text, source="<config>"):
    """Parse config text into ``{dotted_key: (value, line_number)}``."""
    out = {}
    section = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]") or len(line) < 3:
                raise ConfigError(f"malformed section header {raw.strip()!r}", lineno, source)
            section = line[1:-1].strip()
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno, source)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError("empty key", lineno, source)
        if section and "." not in key:
            key = f"{section}.{key}"
        try:
            out[key] = (parse_value(value), lineno)
        except ConfigError as exc:
            raise ConfigError(str(exc), lineno, source) from None
    return out


def parse_override(item):
    if "=" not in item:
        raise ConfigError(f"--set expects key=value, got {item!r}", source="--set")
    key, value = item.split("=", 1)
    return key.strip(), parse_value(value)


def _coerce(attr, value):
    default = SweepConfig.__dataclass_fields__[attr].default
    if attr == "h_list":
        if isinstance(value, int):
            value = (value,)
        return tuple(int(v) for v in value)
    if attr == "prior_mean":
        return tuple(float(v) for v in value)
    if attr in MATRIX_ATTRS:
        if isinstance(value, (list, tuple)):
            return tuple(tuple(float(x) for x in row) if isinstance(row, (list, tuple))
                         else float(row) for row in value)
        return float(value)
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ValueError(f"expected true/false, got {value!r}")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or int(value) != value:
            raise ValueError(f"expected an integer, got {value!r}")
        return int(value)
    if isinstance(default, float):
        return float(value)
    return str(value)


def validate(cfg):
    """Return ``(attr, message)`` for the first invalid setting, or None."""
    h = cfg.h_list
    if not h or list(h) != sorted(set(h)) or h[0] < 0:
        return "h_list", "must be nonempty, sorted, distinct and nonnegative"
    if cfg.horizon < 1:
        return "horizon", "must be >= 1"
    if cfg.seeds < 2:
        return "seeds", "must be >= 2"
    if cfg.jobs < 1:
        return "jobs", "must be >= 1"
    if not 0 <= cfg.burn_in <= cfg.horizon:
        return "burn_in", "must lie in [0, horizon]"
    if not 0.0 < cfg.gamma < 1.0:
        return "gamma", "must lie in (0, 1)"
    if not cfg.dt > 0:
        return "dt", "must be positive"
    if len(cfg.prior_mean) != 2:
        return "prior_mean", "the double integrator needs a 2-vector"
    try:
        cfg.build_model()
    except (ValueError, TypeError) as exc:
        return None, f"model is invalid: {exc}"
    return None


@dataclass
class _Source:
    file_lines: dict = field(default_factory=dict)
    path: str = None
    set_keys: set = field(default_factory=set)

    def locate(self, attr):
        for key, a in KEYS.items():
            if a != attr:
                continue
            if key in self.set_keys:
                return None, "--set"
            if key in self.file_lines:
                return self.file_lines[key], self.path
        return None, None


def load_config(path=None, preset=None, overrides=(), **direct):
    """Build a validated SweepConfig.

    Precedence, lowest first: dataclass defaults, preset, config file,
    ``--set`` overrides, then ``direct`` keyword values (CLI flags).
    """
    cfg = SweepConfig()
    src = _Source(path=path)

    def assign(key, value, line=None, source=None):
        if key not in KEYS:
            raise ConfigError(f"unknown key {key!r}", line, source)
        attr = KEYS[key]
        try:
            setattr(cfg, attr, _coerce(attr, value))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{key}: {exc}", line, source) from None

    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        for key, value in PRESETS[preset].items():
            assign(key, value)

    if path is not None:
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        for key, (value, line) in parse_text(text, path).items():
            assign(key, value, line, path)
            src.file_lines[key] = line

    for item in overrides:
        key, value = parse_override(item)
        assign(key, value, source="--set")
        src.set_keys.add(key)

    for attr, value in direct.items():
        if value is not None:
            setattr(cfg, attr, _coerce(attr, value))

    problem = validate(cfg)
    if problem is not None:
        attr, message = problem
        line, source = src.locate(attr) if attr else (None, None)
        name = next((k for k, a in KEYS.items() if a == attr), "config")
        raise ConfigError(f"{name} {message}" if attr else message, line, source)
    return cfg


def replace(cfg, **changes):
    return dataclasses.replace(cfg, **changes)

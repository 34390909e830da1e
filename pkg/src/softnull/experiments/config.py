"""Experiment configuration: defaults, YAML loading and validation."""

import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import yaml

from ..channels import DEFAULT_REFERENCE_COUPLING_DB, PRESETS
from ..errors import ConfigError
from ..geometry import (
    DEFAULT_CARRIER_HZ,
    DEFAULT_COLS,
    DEFAULT_ROWS,
    DEFAULT_SPACING_M,
    PARTITION_KINDS,
    ArrayGeometry,
)
from ..link import LinkConfig

CHANNEL_SOURCES = ("outdoor-like", "indoor-like", "synthetic", "trace")
OUTPUT_FORMATS = ("csv", "json")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything an experiment runner needs.

    Defaults are desk scale; the 10 000 random partitions and many-trial
    runs of a full study are reachable by raising ``n_random_partitions``
    and ``n_trials``.
    """

    rows: int = DEFAULT_ROWS
    cols: int = DEFAULT_COLS
    spacing_m: float = DEFAULT_SPACING_M
    carrier_hz: float = DEFAULT_CARRIER_HZ
    partition: str = "east-west"
    m_tx: int = None
    channel: str = "outdoor-like"
    kappa: float = PRESETS["outdoor-like"]
    reference_coupling_db: float = DEFAULT_REFERENCE_COUPLING_DB
    trace_path: str = None
    users: int = 4
    users_sweep: tuple = (1, 2, 4, 8, 12, 16)
    path_loss_db: tuple = (85.0,)
    d_tx: tuple = None
    n_trials: int = 20
    n_subcarriers: int = 1
    n_random_partitions: int = 200
    seed: int = 0
    bs_power_dbm: float = 0.0
    user_power_dbm: float = -10.0
    thermal_noise_dbm: float = -95.0
    d0_bs_db: float = 25.0
    d0_user_db: float = 25.0
    include_h_usr: bool = False
    output: str = None
    format: str = "csv"
    workers: int = 1

    def __post_init__(self):
        for name in ("users_sweep", "path_loss_db", "d_tx"):
            value = getattr(self, name)
            if value is not None and not isinstance(value, tuple):
                if isinstance(value, (int, float)):
                    value = (value,)
                object.__setattr__(self, name, tuple(value))
        if isinstance(self.kappa, str):
            object.__setattr__(self, "kappa", _parse_float(self.kappa, "kappa"))

    # derived objects

    def geometry(self):
        return ArrayGeometry(self.rows, self.cols, self.spacing_m, self.carrier_hz)

    @property
    def n_elements(self):
        return self.rows * self.cols

    @property
    def effective_m_tx(self):
        return self.m_tx if self.m_tx is not None else self.n_elements // 2

    @property
    def effective_kappa(self):
        return PRESETS.get(self.channel, self.kappa)

    def d_tx_values(self):
        if self.d_tx is None:
            return tuple(range(1, self.effective_m_tx + 1))
        return self.d_tx

    def link_config(self):
        return LinkConfig(
            bs_power_dbm=self.bs_power_dbm,
            user_power_dbm=self.user_power_dbm,
            thermal_noise_dbm=self.thermal_noise_dbm,
            d0_bs_db=self.d0_bs_db,
            d0_user_db=self.d0_user_db,
            include_h_usr=self.include_h_usr,
        )

    def validate(self):
        """Raise :class:`ConfigError` describing the first problem found."""
        try:
            self.geometry()
        except ValueError as exc:
            raise ConfigError(f"geometry: {exc}") from None
        m = self.n_elements
        m_tx = self.effective_m_tx
        if not (1 <= m_tx < m):
            raise ConfigError(f"m_tx must satisfy 1 <= m_tx < {m}, got {m_tx}")
        if self.partition not in PARTITION_KINDS and self.partition != "random":
            raise ConfigError(
                f"unknown partition {self.partition!r}; choose from "
                f"{', '.join(list(PARTITION_KINDS) + ['random'])}"
            )
        if self.channel not in CHANNEL_SOURCES:
            raise ConfigError(f"unknown channel source {self.channel!r}; choose from {', '.join(CHANNEL_SOURCES)}")
        if not self.effective_kappa >= 0:
            raise ConfigError("kappa must be >= 0")
        if self.channel == "trace":
            if not self.trace_path:
                raise ConfigError("channel source 'trace' needs trace_path")
            if not Path(self.trace_path).is_file():
                raise ConfigError(f"trace file not found: {self.trace_path}")
        for name in ("path_loss_db", "users_sweep"):
            if not getattr(self, name):
                raise ConfigError(f"{name} must be a non-empty list")
        if self.d_tx is not None:
            if not self.d_tx:
                raise ConfigError("d_tx must be a non-empty list")
            bad = [d for d in self.d_tx if not (1 <= d <= m_tx)]
            if bad:
                raise ConfigError(f"d_tx values {bad} outside 1..{m_tx}")
        if any(pl < 0 for pl in self.path_loss_db):
            raise ConfigError("path loss must be >= 0 dB")
        for name in ("n_trials", "n_subcarriers", "n_random_partitions", "workers", "users"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if any(k < 1 for k in self.users_sweep):
            raise ConfigError("users_sweep entries must be >= 1")
        if self.seed < 0:
            raise ConfigError("seed must be a non-negative integer")
        if self.format not in OUTPUT_FORMATS:
            raise ConfigError(f"unknown output format {self.format!r}")
        try:
            self.link_config()
        except ValueError as exc:
            raise ConfigError(f"link: {exc}") from None
        return self

    def to_dict(self):
        return asdict(self)


_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}
_INT_FIELDS = {"rows", "cols", "m_tx", "users", "n_trials", "n_subcarriers",
               "n_random_partitions", "seed", "workers"}
_FLOAT_FIELDS = {"spacing_m", "carrier_hz", "kappa", "reference_coupling_db", "bs_power_dbm",
                 "user_power_dbm", "thermal_noise_dbm", "d0_bs_db", "d0_user_db"}
_LIST_INT_FIELDS = {"users_sweep", "d_tx"}
_LIST_FLOAT_FIELDS = {"path_loss_db"}


def _parse_float(value, name):
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: expected a number, got {value!r}") from None


def _parse_int(value, name):
    if isinstance(value, bool):
        raise ConfigError(f"{name}: expected an integer, got {value!r}")
    try:
        f = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: expected an integer, got {value!r}") from None
    if not math.isfinite(f) or f != int(f):
        raise ConfigError(f"{name}: expected an integer, got {value!r}")
    return int(f)


def coerce(name, value):
    """Convert a raw config/CLI value to the type of field ``name``."""
    if name not in _FIELD_TYPES:
        raise ConfigError(f"unknown config key {name!r}")
    if value is None:
        return None
    if name in _INT_FIELDS:
        return _parse_int(value, name)
    if name in _FLOAT_FIELDS:
        return _parse_float(value, name)
    if name in _LIST_INT_FIELDS or name in _LIST_FLOAT_FIELDS:
        items = value if isinstance(value, (list, tuple)) else [value]
        parse = _parse_int if name in _LIST_INT_FIELDS else _parse_float
        return tuple(parse(v, name) for v in items)
    if name == "include_h_usr":
        if isinstance(value, bool):
            return value
        if str(value).lower() in ("1", "true", "yes", "on"):
            return True
        if str(value).lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"include_h_usr: expected a boolean, got {value!r}")
    return str(value)


def load_config(path):
    """Read a flat YAML mapping into an :class:`ExperimentConfig`."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a key/value mapping")
    return apply_overrides(ExperimentConfig(), raw)


def apply_overrides(cfg, overrides):
    """Return ``cfg`` with every non-``None`` override applied."""
    changes = {}
    for key, value in overrides.items():
        key = str(key).replace("-", "_")
        if isinstance(value, dict):
            raise ConfigError(f"config key {key!r}: nested sections are not supported")
        changes[key] = coerce(key, value)
    try:
        return replace(cfg, **changes)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None

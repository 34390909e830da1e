"""SoftNull: self-interference suppressing beamforming for many-antenna full duplex."""

from .channels import (
    ChannelSet,
    SiChannelParams,
    coupling_map,
    eigenvalue_concentration,
    geometric_self_interference,
    rayleigh_channel,
)
from .errors import (
    CapabilityError,
    ConfigError,
    DimensionMismatchError,
    MagicMismatchError,
    NumericalError,
    RankError,
    SoftNullError,
    TraceFormatError,
    TruncatedTraceError,
)
from .geometry import (
    ArrayGeometry,
    Partition,
    east_west,
    interleaved,
    north_south,
    nw_se,
    random_partition,
)
from .link import (
    LinkConfig,
    RateReport,
    Scheme,
    achievable_rate,
    downlink_sinr,
    dynamic_noise_power,
    link_budget_snr,
    simulate_scheme,
    uplink_sinr,
)
from .numerics import frobenius_norm_sq, pseudoinverse, random_orthonormal_columns, svd
from .precoding import (
    SoftNullPrecoder,
    decorrelator,
    effective_channel,
    matched_filter_precoder,
    softnull_precoder,
    suppression_db,
    zf_precoder,
)
from .trace import load_trace, save_trace

__version__ = "0.1.0"

__all__ = [
    "ChannelSet",
    "SiChannelParams",
    "coupling_map",
    "eigenvalue_concentration",
    "geometric_self_interference",
    "rayleigh_channel",
    "CapabilityError",
    "ConfigError",
    "DimensionMismatchError",
    "MagicMismatchError",
    "NumericalError",
    "RankError",
    "SoftNullError",
    "TraceFormatError",
    "TruncatedTraceError",
    "ArrayGeometry",
    "Partition",
    "east_west",
    "interleaved",
    "north_south",
    "nw_se",
    "random_partition",
    "LinkConfig",
    "RateReport",
    "Scheme",
    "achievable_rate",
    "downlink_sinr",
    "dynamic_noise_power",
    "link_budget_snr",
    "simulate_scheme",
    "uplink_sinr",
    "SoftNullPrecoder",
    "decorrelator",
    "effective_channel",
    "matched_filter_precoder",
    "softnull_precoder",
    "suppression_db",
    "zf_precoder",
    "frobenius_norm_sq",
    "pseudoinverse",
    "random_orthonormal_columns",
    "svd",
    "load_trace",
    "save_trace",
]

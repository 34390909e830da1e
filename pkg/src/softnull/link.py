"""
Receiver dynamic-range model, per-user SINRs and ergodic achievable rates.

Powers are linear milliwatts unless a name ends in ``_dbm`` / ``_db``.
Transmitted symbols are unit power and independent, so a precoder ``P``
radiates ``||P||_F^2``.

Every receive chain (base-station antenna or client) adds Gaussian
"dynamic" noise ``D0`` dB below its total received power, on top of
thermal noise.  Known self-interference is subtracted perfectly after
that, so only the dynamic noise it raised remains.
"""

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import CapabilityError
from .numerics import as_matrix
from .precoding import decorrelator, effective_channel, softnull_precoder, zf_precoder

__all__ = [
    "Scheme",
    "LinkConfig",
    "RateReport",
    "db_to_linear",
    "linear_to_db",
    "dbm_to_mw",
    "mw_to_dbm",
    "dynamic_noise_power",
    "link_budget_snr",
    "uplink_sinr",
    "downlink_sinr",
    "achievable_rate",
    "simulate_scheme",
    "simulate_trial",
]


class Scheme(str, enum.Enum):
    HALF_DUPLEX = "HalfDuplex"
    SOFTNULL = "SoftNull"
    IDEAL_FULL_DUPLEX = "IdealFullDuplex"

    def __str__(self):
        return self.value


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(x)


dbm_to_mw = db_to_linear
mw_to_dbm = linear_to_db


@dataclass(frozen=True)
class LinkConfig:
    bs_power_dbm: float = 0.0
    user_power_dbm: float = -10.0
    thermal_noise_dbm: float = -95.0
    d0_bs_db: float = 25.0
    d0_user_db: float = 25.0
    include_h_usr: bool = False

    def __post_init__(self):
        for name in ("bs_power_dbm", "user_power_dbm", "thermal_noise_dbm"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        # an infinite noise figure is accepted: it switches dynamic noise off
        if not (self.d0_bs_db > 0 and self.d0_user_db > 0):
            raise ValueError("dynamic noise figures must be positive")

    @property
    def bs_power(self):
        return float(dbm_to_mw(self.bs_power_dbm))

    @property
    def user_power(self):
        return float(dbm_to_mw(self.user_power_dbm))

    @property
    def thermal(self):
        return float(dbm_to_mw(self.thermal_noise_dbm))


@dataclass
class RateReport:
    """Ergodic rates of one scheme over a batch of channel realizations.

    ``per_user_sinr_up`` / ``per_user_sinr_down`` are linear SINRs with
    shape (n_realizations, K).
    """

    scheme: Scheme
    d_tx: int
    uplink_rate: float
    downlink_rate: float
    per_user_sinr_up: np.ndarray = field(repr=False)
    per_user_sinr_down: np.ndarray = field(repr=False)
    transmit_power: np.ndarray = field(default=None, repr=False)

    @property
    def sum_rate(self):
        return self.uplink_rate + self.downlink_rate

    @property
    def time_fraction(self):
        return 0.5 if self.scheme == Scheme.HALF_DUPLEX else 1.0


def dynamic_noise_power(received_power, d0_db):
    """Dynamic-range noise: ``received_power`` attenuated by ``d0_db``."""
    received_power = np.asarray(received_power, dtype=float)
    if np.any(received_power < 0):
        raise ValueError("received power must be non-negative")
    out = received_power / db_to_linear(d0_db)
    return float(out) if out.ndim == 0 else out


def _power_sum_db(*levels_db):
    return float(linear_to_db(sum(db_to_linear(x) for x in levels_db)))


def link_budget_snr(tx_dbm, path_loss_db, suppression_db, thermal_dbm, d0_db, mode="sum"):
    """Uplink SNR in dB after perfect digital cancellation.

    The uplink user and the base station both transmit at ``tx_dbm``.  The
    desired signal arrives at ``tx - path_loss`` and the self-interference
    at ``tx - suppression``; the latter raises a dynamic-range floor
    ``d0_db`` below it.

    ``mode="sum"`` power-sums the thermal floor and the dynamic floor.
    ``mode="dominant"`` uses the dynamic floor alone, which is how the
    classic back-of-envelope calculation treats a receiver whose level is
    set by self-interference.
    """
    signal = tx_dbm - path_loss_db
    si = tx_dbm - suppression_db
    floor_dyn = si - d0_db
    if mode == "dominant":
        noise = floor_dyn
    elif mode == "sum":
        noise = _power_sum_db(thermal_dbm, floor_dyn)
    else:
        raise ValueError(f"unknown mode {mode!r}; expected 'dominant' or 'sum'")
    return signal - noise


def _row_power(m):
    return np.sum(np.abs(m) ** 2, axis=1)


def uplink_sinr(ch, precoder, w, cfg):
    """Per-user uplink SINR at the base station.

    Parameters
    ----------
    ch : ChannelSet
        ``h_self`` is ignored when ``precoder`` is ``None``.
    precoder : ndarray or None
        Full downlink precoder ``P_self @ P_down`` (M_Tx x K_Down), or
        ``None`` when the downlink is silent (half duplex).
    w : ndarray, shape (K_Up, M_Rx)
        Uplink equalizer, normally :func:`~softnull.precoding.decorrelator`.
    cfg : LinkConfig
    """
    h_up = ch.h_up
    w = as_matrix(w, "w")
    if w.shape != (h_up.shape[1], h_up.shape[0]):
        raise ValueError(f"equalizer shape {w.shape} does not match h_up {h_up.shape}")
    p_u = cfg.user_power
    thermal = cfg.thermal
    rx_power = _row_power(h_up) * p_u + thermal
    if precoder is not None:
        precoder = as_matrix(precoder, "precoder")
        if precoder.shape[0] != ch.m_tx:
            raise ValueError("precoder rows must equal M_Tx")
        rx_power = rx_power + _row_power(ch.h_self @ precoder)
    noise = thermal + dynamic_noise_power(rx_power, cfg.d0_bs_db)
    g = w @ h_up
    desired = np.abs(np.diag(g)) ** 2 * p_u
    leak = np.maximum(_row_power(g) - np.abs(np.diag(g)) ** 2, 0.0) * p_u
    post_noise = (np.abs(w) ** 2) @ noise
    return desired / (leak + post_noise)


def downlink_sinr(h_eff, p_down, ch, cfg):
    """Per-user downlink SINR at the clients.

    ``h_eff @ p_down`` gives desired (diagonal) and inter-user
    (off-diagonal) amplitudes.  With ``cfg.include_h_usr`` the uplink users
    interfere through ``ch.h_usr``.
    """
    h_eff = as_matrix(h_eff, "h_eff")
    p_down = as_matrix(p_down, "p_down")
    g = h_eff @ p_down
    if g.shape[0] != g.shape[1]:
        raise ValueError(f"h_eff @ p_down must be square, got {g.shape}")
    thermal = cfg.thermal
    desired = np.abs(np.diag(g)) ** 2
    inter = np.maximum(_row_power(g) - desired, 0.0)
    usr = _row_power(ch.h_usr) * cfg.user_power if cfg.include_h_usr else np.zeros_like(desired)
    total = desired + inter + usr + thermal
    noise = thermal + dynamic_noise_power(total, cfg.d0_user_db)
    return desired / (inter + usr + noise)


def achievable_rate(sinrs, alpha=1.0):
    """Ergodic rate ``alpha * mean_p sum_j log2(1 + SINR[p, j])`` in bits/s/Hz."""
    if not (0.0 <= alpha <= 1.0):
        raise ValueError("time fraction must lie in [0, 1]")
    s = np.atleast_2d(np.asarray(sinrs, dtype=float))
    if np.any(s < 0):
        raise ValueError("SINR must be non-negative")
    return alpha * float(np.mean(np.sum(np.log2(1.0 + s), axis=1)))


def _check_users(ch, d_tx):
    if ch.k_down > d_tx:
        raise CapabilityError(f"{ch.k_down} downlink users exceed {d_tx} effective antennas")
    if ch.k_up > ch.m_rx:
        raise CapabilityError(f"{ch.k_up} uplink users exceed {ch.m_rx} receive antennas")


def simulate_trial(scheme, ch, cfg, d_tx=None):
    """SINRs for one channel realization.

    Returns ``(sinr_up, sinr_down, transmit_power)``.
    """
    scheme = Scheme(scheme)
    if scheme == Scheme.SOFTNULL:
        if d_tx is None:
            raise ValueError("SoftNull needs d_tx")
        _check_users(ch, d_tx)
        p_self = softnull_precoder(ch.h_self, d_tx).p_self
    else:
        # half duplex and ideal full duplex use every transmit antenna
        d_tx = ch.m_tx
        _check_users(ch, d_tx)
        p_self = np.eye(ch.m_tx, dtype=np.complex128)
    h_eff = effective_channel(ch.h_down, p_self)
    p_down = zf_precoder(h_eff, cfg.bs_power)
    w = decorrelator(ch.h_up)
    precoder = p_self @ p_down
    if scheme == Scheme.SOFTNULL:
        sinr_up = uplink_sinr(ch, precoder, w, cfg)
    else:
        # HD: downlink silent during uplink slot; ideal FD: no self-interference
        sinr_up = uplink_sinr(ch, None, w, cfg)
    if scheme == Scheme.HALF_DUPLEX:
        # downlink slot: the uplink users are silent
        sinr_down = downlink_sinr(h_eff, p_down, ch, _without_h_usr(cfg))
    else:
        sinr_down = downlink_sinr(h_eff, p_down, ch, cfg)
    return sinr_up, sinr_down, float(np.sum(np.abs(precoder) ** 2))


def _without_h_usr(cfg):
    return replace(cfg, include_h_usr=False) if cfg.include_h_usr else cfg


def simulate_scheme(scheme, channels, cfg, partition=None, d_tx=None):
    """Simulate ``scheme`` over a batch of channel realizations.

    Half duplex expects channel sets spanning the whole array (``h_up`` is
    M x K_Up, ``h_down`` K_Down x M) and splits time evenly between the
    links.  SoftNull and ideal full duplex expect partitioned channels and
    run both links all the time; ideal full duplex drops the
    self-interference and keeps all ``M_Tx`` effective antennas.
    """
    scheme = Scheme(scheme)
    channels = list(channels)
    if not channels:
        raise ValueError("no channel realizations given")
    if partition is not None and scheme != Scheme.HALF_DUPLEX:
        for ch in channels:
            if (ch.m_rx, ch.m_tx) != (partition.m_rx, partition.m_tx):
                raise ValueError(
                    f"channel set is {ch.m_rx}x{ch.m_tx}, partition is {partition.m_rx}x{partition.m_tx}"
                )
    ups, downs, powers = [], [], []
    for ch in channels:
        su, sd, pw = simulate_trial(scheme, ch, cfg, d_tx)
        ups.append(su)
        downs.append(sd)
        powers.append(pw)
    ups = np.array(ups)
    downs = np.array(downs)
    alpha = 0.5 if scheme == Scheme.HALF_DUPLEX else 1.0
    return RateReport(
        scheme=scheme,
        d_tx=int(d_tx) if scheme == Scheme.SOFTNULL else channels[0].m_tx,
        uplink_rate=achievable_rate(ups, alpha),
        downlink_rate=achievable_rate(downs, alpha),
        per_user_sinr_up=ups,
        per_user_sinr_down=downs,
        transmit_power=np.array(powers),
    )

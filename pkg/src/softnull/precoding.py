"""
Self-interference suppressing precoder and standard MU-MIMO precoders.

The transmit chain is ``x_down = P_self @ P_down @ s``.  ``P_self``
(M_Tx x D_Tx, orthonormal columns) minimizes the total self-interference
power ``||H_self P||_F^2``; the minimizer spans the right singular vectors
of ``H_self`` belonging to its ``D_Tx`` smallest singular values.
``P_down`` is an ordinary multi-user precoder designed on the effective
channel ``H_down @ P_self``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapabilityError, RankError
from .numerics import as_matrix, default_rank_tol, hermitian, pseudoinverse, svd

__all__ = [
    "SoftNullPrecoder",
    "softnull_precoder",
    "suppression_db",
    "per_antenna_suppression_db",
    "suppression_profile",
    "effective_channel",
    "zf_precoder",
    "matched_filter_precoder",
    "decorrelator",
]


@dataclass(frozen=True)
class SoftNullPrecoder:
    """Result of :func:`softnull_precoder`.

    Attributes
    ----------
    p_self : ndarray, shape (M_Tx, D_Tx)
        Orthonormal-column precoder.
    d_tx : int
        Number of effective antennas kept for the downlink.
    residual_power : float
        ``||H_self @ p_self||_F^2``.
    sigma : ndarray, shape (M_Tx,)
        Singular values of ``H_self`` in descending order, zero padded to
        ``M_Tx`` when ``M_Rx < M_Tx``.
    """

    p_self: np.ndarray
    d_tx: int
    residual_power: float
    sigma: np.ndarray


def _padded_sigma(sigma, m_tx):
    out = np.zeros(m_tx)
    out[: sigma.size] = sigma[:m_tx]
    return out


def softnull_precoder(h_self, d_tx):
    """Minimum self-interference precoder keeping ``d_tx`` effective antennas.

    Parameters
    ----------
    h_self : array_like, shape (M_Rx, M_Tx)
        Self-interference channel.
    d_tx : int
        ``1 <= d_tx <= M_Tx``.

    Returns
    -------
    SoftNullPrecoder
    """
    h = as_matrix(h_self, "h_self")
    m_tx = h.shape[1]
    if not (1 <= d_tx <= m_tx):
        raise ValueError(f"d_tx must satisfy 1 <= d_tx <= {m_tx}, got {d_tx}")
    res = svd(h)
    p = res.v[:, m_tx - d_tx:]
    residual = float(np.sum(np.abs(h @ p) ** 2))
    return SoftNullPrecoder(
        p_self=p, d_tx=int(d_tx), residual_power=residual, sigma=_padded_sigma(res.sigma, m_tx)
    )


def _to_db(inv_power):
    return 10.0 * np.log10(inv_power)


def _null_floor(precoder, shape):
    # residual below this is numerically indistinguishable from a perfect null
    smax = precoder.sigma[0] if precoder.sigma.size else 0.0
    return precoder.d_tx * (default_rank_tol(shape) * smax) ** 2


def suppression_db(h_self, precoder, m_rx=None):
    """Self-interference reduction in dB for a unit transmit power.

    The unit power is split evenly over the ``d_tx`` effective antennas and
    the resulting self-interference power is averaged over the ``m_rx``
    receive antennas; the reduction is ``-10 log10`` of that average.
    Returns ``inf`` when the precoder nulls the channel.
    """
    h = as_matrix(h_self, "h_self")
    if m_rx is None:
        m_rx = h.shape[0]
    if m_rx != h.shape[0] or precoder.p_self.shape[0] != h.shape[1]:
        raise ValueError("precoder, channel and m_rx dimensions are inconsistent")
    residual = float(np.sum(np.abs(h @ precoder.p_self) ** 2))
    if residual <= _null_floor(precoder, h.shape):
        return math.inf
    mean_si = residual / precoder.d_tx / m_rx
    return float(_to_db(1.0 / mean_si))


def per_antenna_suppression_db(h_self, precoder):
    """Per receive antenna version of :func:`suppression_db`."""
    h = as_matrix(h_self, "h_self")
    si = np.sum(np.abs(h @ precoder.p_self) ** 2, axis=1) / precoder.d_tx
    out = np.full(si.shape, np.inf)
    floor = _null_floor(precoder, h.shape)
    ok = si > floor
    out[ok] = _to_db(1.0 / si[ok])
    return out


def suppression_profile(h_self, d_tx_values):
    """Suppression for many ``d_tx`` values from a single SVD.

    Returns
    -------
    per_antenna : ndarray, shape (len(d_tx_values), M_Rx)
        Per receive antenna suppression in dB.
    mean : ndarray, shape (len(d_tx_values),)
        Suppression of the antenna-averaged self-interference power in dB,
        i.e. the value :func:`suppression_db` returns.
    """
    h = as_matrix(h_self, "h_self")
    m_rx, m_tx = h.shape
    res = svd(h)
    # column i of h @ v carries the power of mode i; keeping the d smallest
    # modes means summing the last d columns
    mode_power = np.abs(h @ res.v) ** 2
    tail = np.cumsum(mode_power[:, ::-1], axis=1)[:, ::-1]
    smax = res.sigma[0]
    per_antenna, mean = [], []
    for d in d_tx_values:
        if not (1 <= d <= m_tx):
            raise ValueError(f"d_tx must satisfy 1 <= d_tx <= {m_tx}, got {d}")
        si = tail[:, m_tx - d] / d
        floor = d * (default_rank_tol(h.shape) * smax) ** 2
        pa = np.full(m_rx, np.inf)
        ok = si > floor
        pa[ok] = _to_db(1.0 / si[ok])
        total = si.sum()
        per_antenna.append(pa)
        mean.append(_to_db(m_rx / total) if total * d > floor else np.inf)
    return np.array(per_antenna), np.array(mean)


def effective_channel(h_down, p_self):
    """Downlink channel seen through the self-interference precoder."""
    h_down = as_matrix(h_down, "h_down")
    p_self = as_matrix(p_self, "p_self")
    if h_down.shape[1] != p_self.shape[0]:
        raise ValueError(
            f"h_down has {h_down.shape[1]} columns but p_self has {p_self.shape[0]} rows"
        )
    return h_down @ p_self


def _check_full_rank(a, what):
    s = svd(a).sigma
    if s[0] == 0 or s[-1] <= default_rank_tol(a.shape) * s[0]:
        raise RankError(f"{what} is rank deficient (singular values {s.min():.3g}..{s.max():.3g})")


def zf_precoder(h_eff, total_power):
    """Zero-forcing precoder ``alpha * h^H (h h^H)^-1``.

    ``alpha`` is real and positive and makes ``||P||_F^2 = total_power``,
    which is the expected transmit power for unit-power user symbols.
    Every user then sees gain ``alpha`` and no inter-user interference.
    """
    h = as_matrix(h_eff, "h_eff")
    k, d = h.shape
    if k > d:
        raise CapabilityError(f"zero forcing {k} users needs at least {k} effective antennas, got {d}")
    if total_power < 0:
        raise ValueError("total_power must be >= 0")
    _check_full_rank(h, "effective downlink channel")
    p0 = pseudoinverse(h, rank_tol=0.0)
    alpha = math.sqrt(total_power / np.sum(np.abs(p0) ** 2))
    return alpha * p0


def matched_filter_precoder(h_eff, total_power):
    """Matched-filter (maximum ratio) precoder ``beta * h^H``."""
    h = as_matrix(h_eff, "h_eff")
    norm_sq = np.sum(np.abs(h) ** 2)
    if norm_sq == 0:
        raise ValueError("matched filter needs a nonzero channel")
    if total_power < 0:
        raise ValueError("total_power must be >= 0")
    return math.sqrt(total_power / norm_sq) * hermitian(h)


def decorrelator(h_up):
    """Linear decorrelating equalizer ``(h^H h)^-1 h^H``."""
    h = as_matrix(h_up, "h_up")
    m_rx, k = h.shape
    if k > m_rx:
        raise CapabilityError(f"decorrelating {k} users needs at least {k} receive antennas, got {m_rx}")
    _check_full_rank(h, "uplink channel")
    return pseudoinverse(h, rank_tol=0.0)

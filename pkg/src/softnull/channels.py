"""
Synthetic channel generation and channel-structure analysis.

The self-interference channel is a Rician-style mixture of a deterministic
near-field line-of-sight term between array elements and an i.i.d.
scattered term.  User links are i.i.d. Rayleigh with a fixed path loss.
"""

import math
from dataclasses import dataclass

import numpy as np

from .numerics import as_matrix, svd

__all__ = [
    "ChannelSet",
    "SiChannelParams",
    "geometric_self_interference",
    "rayleigh_channel",
    "coupling_map",
    "eigenvalue_concentration",
    "PRESETS",
]

DEFAULT_REFERENCE_COUPLING_DB = -15.0

# Named environments: outdoor has little backscatter, indoor a lot.
PRESETS = {
    "outdoor-like": 100.0,
    "indoor-like": 1.0,
}


@dataclass
class ChannelSet:
    """Channel matrices for one trial on one subcarrier.

    Shapes: ``h_self`` (M_Rx, M_Tx), ``h_up`` (M_Rx, K_Up),
    ``h_down`` (K_Down, M_Tx), ``h_usr`` (K_Down, K_Up).  A missing
    ``h_usr`` is replaced by zeros.
    """

    h_self: np.ndarray
    h_up: np.ndarray
    h_down: np.ndarray
    h_usr: np.ndarray = None
    subcarrier_index: int = 0

    def __post_init__(self):
        self.h_self = as_matrix(self.h_self, "h_self")
        self.h_up = as_matrix(self.h_up, "h_up")
        self.h_down = as_matrix(self.h_down, "h_down")
        if self.h_usr is None:
            self.h_usr = np.zeros((self.h_down.shape[0], self.h_up.shape[1]), np.complex128)
        self.h_usr = as_matrix(self.h_usr, "h_usr")
        m_rx, m_tx = self.h_self.shape
        if self.h_up.shape[0] != m_rx:
            raise ValueError(f"h_up has {self.h_up.shape[0]} rows, expected M_Rx={m_rx}")
        if self.h_down.shape[1] != m_tx:
            raise ValueError(f"h_down has {self.h_down.shape[1]} columns, expected M_Tx={m_tx}")
        if self.h_usr.shape != (self.k_down, self.k_up):
            raise ValueError(
                f"h_usr has shape {self.h_usr.shape}, expected {(self.k_down, self.k_up)}"
            )

    @property
    def m_rx(self):
        return self.h_self.shape[0]

    @property
    def m_tx(self):
        return self.h_self.shape[1]

    @property
    def k_up(self):
        return self.h_up.shape[1]

    @property
    def k_down(self):
        return self.h_down.shape[0]

    @property
    def dims(self):
        return (self.m_rx, self.m_tx, self.k_up, self.k_down)


@dataclass(frozen=True)
class SiChannelParams:
    """Parameters of the synthetic self-interference model.

    ``backscatter_ratio`` is the power ratio of the direct (line-of-sight)
    component to the scattered one; ``math.inf`` gives pure line of sight.
    """

    wavelength: float
    backscatter_ratio: float = PRESETS["outdoor-like"]
    reference_coupling_db: float = DEFAULT_REFERENCE_COUPLING_DB
    seed: object = None

    def __post_init__(self):
        if not self.wavelength > 0:
            raise ValueError("wavelength must be positive")
        if not self.backscatter_ratio >= 0:
            raise ValueError("backscatter ratio must be >= 0")


def _complex_gaussian(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def _mixture_weights(kappa):
    if math.isinf(kappa):
        return 1.0, 0.0
    return math.sqrt(kappa / (1.0 + kappa)), math.sqrt(1.0 / (1.0 + kappa))


def geometric_self_interference(geom, part, params):
    """Synthesize an ``M_Rx x M_Tx`` self-interference channel.

    The direct term between receive element ``r`` and transmit element ``t``
    at distance ``d`` is ``g * (pitch / d) * exp(-2j*pi*d / wavelength)``,
    with ``g`` chosen so two elements one pitch apart couple at
    ``reference_coupling_db``.  The scattered term is circular complex
    Gaussian with the same mean per-entry power as the direct term.
    """
    if part.n_elements != geom.n_elements:
        raise ValueError("partition does not belong to this geometry")
    pos = geom.positions
    rx = pos[list(part.rx_indices)]
    tx = pos[list(part.tx_indices)]
    dist = np.linalg.norm(rx[:, None, :] - tx[None, :, :], axis=2)
    if np.any(dist == 0):
        raise ValueError("a transmit and a receive element share a position")
    g = 10.0 ** (params.reference_coupling_db / 20.0)
    h_los = g * (geom.spacing / dist) * np.exp(-2j * np.pi * dist / params.wavelength)

    w_los, w_scat = _mixture_weights(params.backscatter_ratio)
    rng = np.random.default_rng(params.seed)
    # drawn unconditionally so the random stream does not depend on kappa
    scat = _complex_gaussian(rng, h_los.shape)
    if w_scat == 0.0:
        return h_los
    scat *= math.sqrt(np.mean(np.abs(h_los) ** 2))
    return w_los * h_los + w_scat * scat


def rayleigh_channel(rows, cols, path_loss_db, seed=None):
    """I.i.d. circular complex Gaussian matrix with mean entry power ``10^(-PL/10)``."""
    if path_loss_db < 0:
        raise ValueError("path loss must be >= 0 dB")
    rng = np.random.default_rng(seed)
    return _complex_gaussian(rng, (rows, cols)) * 10.0 ** (-path_loss_db / 20.0)


def coupling_map(h_self):
    """Entry-wise coupling strength ``20*log10|h|`` in dB (``-inf`` for zeros)."""
    h = as_matrix(h_self, "h_self")
    mag = np.abs(h)
    out = np.full(mag.shape, -np.inf)
    nz = mag > 0
    out[nz] = 20.0 * np.log10(mag[nz])
    return out


def eigenvalue_concentration(h, n):
    """Fraction of ``||h||_F^2`` carried by the ``n`` strongest singular modes."""
    h = as_matrix(h)
    k = min(h.shape)
    if not (1 <= n <= k):
        raise ValueError(f"n must satisfy 1 <= n <= {k}, got {n}")
    s2 = svd(h).sigma ** 2
    total = s2.sum()
    if total == 0:
        raise ValueError("eigenvalue concentration is undefined for a zero matrix")
    return float(min(1.0, s2[:n].sum() / total))

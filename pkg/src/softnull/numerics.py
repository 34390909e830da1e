"""
Dense complex linear algebra used throughout the simulator.

Matrices are plain 2-D ``numpy.ndarray`` objects of dtype ``complex128``.
The decomposition itself is delegated to LAPACK (``numpy.linalg.svd``);
this module adds the input checks, a deterministic phase convention and
the numerical-rank handling the precoders rely on.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError

__all__ = [
    "SvdResult",
    "as_matrix",
    "svd",
    "pseudoinverse",
    "random_orthonormal_columns",
    "frobenius_norm_sq",
    "hermitian",
]


def as_matrix(a, name="matrix"):
    """Return ``a`` as a finite 2-D complex128 array, raising on bad input."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return m


def hermitian(a):
    """Conjugate transpose."""
    return np.conj(np.swapaxes(a, -1, -2))


@dataclass(frozen=True)
class SvdResult:
    """Thin singular value decomposition ``a = u @ diag(sigma) @ v^H``.

    Attributes
    ----------
    u : ndarray, shape (rows, k)
        Left singular vectors, ``k = min(rows, cols)``.
    sigma : ndarray, shape (k,)
        Singular values in descending order.
    v : ndarray, shape (cols, cols)
        Right singular vectors as *columns*.  All ``cols`` vectors are
        returned (the trailing ``cols - k`` span the null space), because
        the self-interference precoder needs them when ``rows < cols``.
    """

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    def reconstruct(self):
        k = self.sigma.size
        return (self.u * self.sigma) @ hermitian(self.v[:, :k])


def _normalize_phase(u, v):
    # Largest-magnitude entry of every right singular vector made real
    # positive; the matching left vector gets the same rotation so that
    # u diag(s) v^H is unchanged.
    idx = np.argmax(np.abs(v), axis=0)
    pivots = v[idx, np.arange(v.shape[1])]
    mags = np.abs(pivots)
    phases = np.where(mags > 0, pivots / np.where(mags > 0, mags, 1.0), 1.0)
    v = v * np.conj(phases)
    k = u.shape[1]
    u = u * np.conj(phases[:k])
    return u, v


def svd(a):
    """Singular value decomposition with a reproducible phase convention.

    Parameters
    ----------
    a : array_like, shape (rows, cols)
        Finite complex matrix, ``rows, cols >= 1``.

    Returns
    -------
    SvdResult

    Raises
    ------
    NumericalError
        If LAPACK does not converge.
    """
    a = as_matrix(a)
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"svd needs a non-empty matrix, got shape {a.shape}")
    try:
        u, s, vh = np.linalg.svd(a, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}") from exc
    k = s.size
    u = u[:, :k]
    v = hermitian(vh)
    u, v = _normalize_phase(u, v)
    return SvdResult(u=u, sigma=s, v=v)


def default_rank_tol(shape):
    return 1e-12 * max(shape)


def pseudoinverse(a, rank_tol=None):
    """Moore-Penrose pseudoinverse.

    Singular values ``<= rank_tol * sigma_max`` are treated as zero.  The
    default tolerance is ``1e-12 * max(rows, cols)``.
    """
    a = as_matrix(a)
    if rank_tol is None:
        rank_tol = default_rank_tol(a.shape)
    if rank_tol < 0:
        raise ValueError("rank_tol must be non-negative")
    res = svd(a)
    k = res.sigma.size
    smax = res.sigma[0] if k else 0.0
    keep = res.sigma > rank_tol * smax
    if smax == 0.0:
        keep[:] = False
    inv_s = np.zeros_like(res.sigma)
    inv_s[keep] = 1.0 / res.sigma[keep]
    return (res.v[:, :k] * inv_s) @ hermitian(res.u)


def random_orthonormal_columns(m, d, seed=None, batch=None):
    """Haar-distributed ``m x d`` matrix with orthonormal columns.

    QR of a complex Gaussian matrix, with the phases of ``diag(R)`` folded
    back into ``Q`` so the distribution is exactly Haar.  With ``batch``
    an array of shape ``(batch, m, d)`` of independent draws is returned.
    """
    if not (1 <= d <= m):
        raise ValueError(f"need 1 <= d <= m, got m={m}, d={d}")
    rng = np.random.default_rng(seed)
    shape = (m, d) if batch is None else (batch, m, d)
    z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    ph = diag / np.abs(diag)
    return q * ph[..., None, :]


def frobenius_norm_sq(a):
    """Sum of squared entry magnitudes."""
    a = as_matrix(a)
    return float(np.sum(a.real ** 2 + a.imag ** 2))

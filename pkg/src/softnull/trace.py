"""
Binary channel trace files.

Layout (all integers little-endian u32)::

    offset  size  field
    0       4     magic b"SNCT"
    4       4     version (1)
    8       4     m_rx
    12      4     m_tx
    16      4     k_up
    20      4     k_down
    24      4     n_subcarriers
    28      ...   per subcarrier: h_self, h_up, h_down, h_usr

Each matrix is stored row-major, every entry as two IEEE-754
little-endian float64 values (real, imag).  An optional sidecar with the
same stem and suffix ``.meta`` holds UTF-8 ``key=value`` lines.
"""

import struct
from pathlib import Path

import numpy as np

from .channels import ChannelSet
from .errors import (
    DimensionMismatchError,
    MagicMismatchError,
    TruncatedTraceError,
    UnsupportedVersionError,
)

MAGIC = b"SNCT"
VERSION = 1
_HEADER = struct.Struct("<4s6I")
_ENTRY = np.dtype("<c16")

__all__ = ["save_trace", "load_trace", "read_header", "write_metadata", "read_metadata"]


def _shapes(m_rx, m_tx, k_up, k_down):
    return [(m_rx, m_tx), (m_rx, k_up), (k_down, m_tx), (k_down, k_up)]


def save_trace(path, sets, metadata=None):
    """Write channel sets (one per subcarrier) to ``path``.

    All sets must share the same dimensions.
    """
    sets = list(sets)
    if not sets:
        raise ValueError("cannot write an empty trace")
    dims = sets[0].dims
    for i, cs in enumerate(sets):
        if cs.dims != dims:
            raise DimensionMismatchError(
                f"channel set {i} has dims {cs.dims}, expected {dims} (m_rx, m_tx, k_up, k_down)"
            )
    m_rx, m_tx, k_up, k_down = dims
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, m_rx, m_tx, k_up, k_down, len(sets)))
        for cs in sets:
            for mat in (cs.h_self, cs.h_up, cs.h_down, cs.h_usr):
                fh.write(np.ascontiguousarray(mat, dtype=_ENTRY).tobytes())
    if metadata is not None:
        write_metadata(path, metadata)


def read_header(data):
    """Parse the fixed header; returns ``(m_rx, m_tx, k_up, k_down, n_subcarriers)``."""
    if len(data) < 4 or data[:4] != MAGIC:
        raise MagicMismatchError(f"bad magic {bytes(data[:4])!r}, expected {MAGIC!r}", 0)
    if len(data) < _HEADER.size:
        raise TruncatedTraceError(
            f"header needs {_HEADER.size} bytes, file has {len(data)}", len(data)
        )
    _, version, *dims = _HEADER.unpack_from(data, 0)
    if version != VERSION:
        raise UnsupportedVersionError(f"unsupported trace version {version}", 4)
    return tuple(dims)


def load_trace(path):
    """Read every subcarrier's channel set from a trace file."""
    data = Path(path).read_bytes()
    m_rx, m_tx, k_up, k_down, n_sub = read_header(data)
    if min(m_rx, m_tx) == 0:
        raise DimensionMismatchError(
            f"header declares an empty self-interference channel ({m_rx}x{m_tx})", 8
        )
    shapes = _shapes(m_rx, m_tx, k_up, k_down)
    per_sub = sum(r * c for r, c in shapes) * _ENTRY.itemsize
    expected = _HEADER.size + n_sub * per_sub
    if len(data) < expected:
        complete = (len(data) - _HEADER.size) // per_sub if per_sub else 0
        raise TruncatedTraceError(
            f"header declares {n_sub} subcarriers of {per_sub} bytes but payload holds "
            f"{complete} complete subcarrier(s)",
            len(data),
        )
    if len(data) > expected:
        raise DimensionMismatchError(
            f"{len(data) - expected} trailing bytes beyond the declared dimensions "
            f"(m_rx={m_rx}, m_tx={m_tx}, k_up={k_up}, k_down={k_down}, n_subcarriers={n_sub})",
            expected,
        )
    out = []
    offset = _HEADER.size
    for sub in range(n_sub):
        mats = []
        for rows, cols in shapes:
            n = rows * cols
            arr = np.frombuffer(data, dtype=_ENTRY, count=n, offset=offset)
            mats.append(arr.reshape(rows, cols).astype(np.complex128))
            offset += n * _ENTRY.itemsize
        if not all(np.all(np.isfinite(m)) for m in mats):
            raise DimensionMismatchError(f"non-finite entry in subcarrier {sub}", offset)
        out.append(ChannelSet(*mats, subcarrier_index=sub))
    return out


def _meta_path(path):
    return Path(path).with_suffix(".meta")


def write_metadata(path, metadata):
    lines = []
    for key, value in metadata.items():
        key = str(key)
        if "=" in key or "\n" in key or "\n" in str(value):
            raise ValueError(f"metadata key/value not representable: {key!r}")
        lines.append(f"{key}={value}\n")
    _meta_path(path).write_text("".join(lines), encoding="utf-8")


def read_metadata(path):
    """Sidecar metadata as a dict of strings, or ``{}`` when absent."""
    mp = _meta_path(path)
    if not mp.exists():
        return {}
    meta = {}
    for line in mp.read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"malformed metadata line {line!r} in {mp}")
        meta[key.strip()] = value.strip()
    return meta

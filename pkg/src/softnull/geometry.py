"""
Planar array geometry and transmit/receive partition heuristics.

Elements are indexed row-major: element ``(row, col)`` has index
``row * n_cols + col``.  Row 0 is the northern (top) edge and column 0 the
western (left) edge of the array.
"""

from dataclasses import dataclass, field

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0

DEFAULT_ROWS = 8
DEFAULT_COLS = 9
DEFAULT_CARRIER_HZ = 2.4e9
DEFAULT_SPACING_M = 0.076

__all__ = [
    "ArrayGeometry",
    "Partition",
    "east_west",
    "north_south",
    "nw_se",
    "interleaved",
    "random_partition",
    "make_partition",
    "PARTITION_KINDS",
]


@dataclass(frozen=True)
class ArrayGeometry:
    """Rectangular planar array in the z = 0 plane.

    ``x`` grows eastward with the column index and ``y`` grows northward,
    so row 0 sits at the largest ``y``.
    """

    n_rows: int = DEFAULT_ROWS
    n_cols: int = DEFAULT_COLS
    spacing: float = DEFAULT_SPACING_M
    carrier_hz: float = DEFAULT_CARRIER_HZ
    positions: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n_rows < 1 or self.n_cols < 1:
            raise ValueError("array needs at least one row and one column")
        if not self.spacing > 0:
            raise ValueError("element spacing must be positive")
        if not self.carrier_hz > 0:
            raise ValueError("carrier frequency must be positive")
        rows, cols = np.divmod(np.arange(self.n_elements), self.n_cols)
        pos = np.stack(
            [cols * self.spacing, -rows * self.spacing, np.zeros(self.n_elements)],
            axis=1,
        )
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    @property
    def n_elements(self):
        return self.n_rows * self.n_cols

    @property
    def wavelength(self):
        return SPEED_OF_LIGHT / self.carrier_hz

    def index(self, row, col):
        return row * self.n_cols + col

    def coords(self, index):
        return divmod(index, self.n_cols)


@dataclass(frozen=True)
class Partition:
    """Disjoint transmit and receive element sets, each sorted ascending."""

    tx_indices: tuple
    rx_indices: tuple
    n_elements: int

    def __post_init__(self):
        tx = tuple(int(i) for i in self.tx_indices)
        rx = tuple(int(i) for i in self.rx_indices)
        object.__setattr__(self, "tx_indices", tuple(sorted(tx)))
        object.__setattr__(self, "rx_indices", tuple(sorted(rx)))
        if len(set(tx)) != len(tx) or len(set(rx)) != len(rx):
            raise ValueError("partition index sets contain duplicates")
        if set(tx) & set(rx):
            raise ValueError("transmit and receive sets overlap")
        if not tx or not rx:
            raise ValueError("both transmit and receive sets must be non-empty")
        if len(tx) + len(rx) > self.n_elements:
            raise ValueError("M_Tx + M_Rx exceeds the number of elements")
        if min(tx + rx) < 0 or max(tx + rx) >= self.n_elements:
            raise ValueError("element index out of range")

    @property
    def m_tx(self):
        return len(self.tx_indices)

    @property
    def m_rx(self):
        return len(self.rx_indices)


def _check_m_tx(geom, m_tx):
    m = geom.n_elements
    if not (1 <= m_tx < m):
        raise ValueError(f"m_tx must satisfy 1 <= m_tx < {m}, got {m_tx}")


def _split(geom, order, m_tx):
    order = list(order)
    return Partition(order[:m_tx], order[m_tx:], geom.n_elements)


def east_west(geom, m_tx):
    """Transmit on the western columns.

    Columns are filled left to right, each column top to bottom, so only
    the last transmit column may be partial.
    """
    _check_m_tx(geom, m_tx)
    order = [geom.index(r, c) for c in range(geom.n_cols) for r in range(geom.n_rows)]
    return _split(geom, order, m_tx)


def north_south(geom, m_tx):
    """Transmit on the northern rows, filled top to bottom, left to right."""
    _check_m_tx(geom, m_tx)
    return _split(geom, range(geom.n_elements), m_tx)


def nw_se(geom, m_tx):
    """Northwest corner transmits, southeast receives.

    Elements are ranked by anti-diagonal ``row + col``; ties go to the
    smaller column.
    """
    _check_m_tx(geom, m_tx)
    order = sorted(
        range(geom.n_elements),
        key=lambda i: (sum(geom.coords(i)), geom.coords(i)[1]),
    )
    return _split(geom, order, m_tx)


def interleaved(geom, m_tx):
    """Checkerboard partition: even ``row + col`` parity transmits.

    ``m_tx`` must be ``floor(M/2)`` or ``ceil(M/2)``.  When the parity class
    has the wrong size, the surplus is trimmed from (or the deficit taken
    from) the end of the row-major order.
    """
    m = geom.n_elements
    if m_tx not in (m // 2, (m + 1) // 2) or not (1 <= m_tx < m):
        raise ValueError(
            f"interleaved partition needs m_tx in {{{m // 2}, {(m + 1) // 2}}}, got {m_tx}"
        )
    even = [i for i in range(m) if sum(geom.coords(i)) % 2 == 0]
    odd = [i for i in range(m) if sum(geom.coords(i)) % 2 == 1]
    if len(even) >= m_tx:
        tx = even[:m_tx]
    else:
        tx = even + odd[: m_tx - len(even)]
    tx_set = set(tx)
    rx = [i for i in range(m) if i not in tx_set]
    return Partition(tx, rx, m)


def random_partition(geom, m_tx, seed=None):
    """Uniformly random ``m_tx``-subset of elements as the transmit set."""
    _check_m_tx(geom, m_tx)
    rng = np.random.default_rng(seed)
    perm = rng.permutation(geom.n_elements)
    return _split(geom, perm, m_tx)


PARTITION_KINDS = {
    "east-west": east_west,
    "north-south": north_south,
    "nw-se": nw_se,
    "interleaved": interleaved,
}


def make_partition(kind, geom, m_tx, seed=None):
    """Build a partition by name (one of ``PARTITION_KINDS`` or ``"random"``)."""
    if kind == "random":
        return random_partition(geom, m_tx, seed)
    try:
        fn = PARTITION_KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown partition kind {kind!r}") from None
    return fn(geom, m_tx)

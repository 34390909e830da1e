"""
Experiment runners.

Each runner returns ``(columns, rows)`` where ``rows`` is a list of dicts
keyed by ``columns``.  All randomness derives from ``cfg.seed`` through
``numpy.random.SeedSequence`` keyed by (realization, stream, ...), so
results do not depend on evaluation order or on ``cfg.workers``.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..channels import ChannelSet, SiChannelParams, geometric_self_interference, rayleigh_channel
from ..errors import CapabilityError, ConfigError, DimensionMismatchError
from ..geometry import PARTITION_KINDS, interleaved, make_partition, random_partition
from ..link import Scheme, achievable_rate, simulate_trial
from ..precoding import suppression_profile
from ..trace import load_trace

# SeedSequence stream identifiers
STREAM_SI = 0
STREAM_UP = 1
STREAM_DOWN = 2
STREAM_USR = 3
STREAM_PARTITION = 4

PARTITION_LABELS = ("east-west", "north-south", "nw-se", "interleaved", "random")


def seed_for(cfg, *key):
    return np.random.SeedSequence([cfg.seed, *key])


def _parallel_map(fn, items, workers):
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _realizations(cfg):
    return [(t, s) for t in range(cfg.n_trials) for s in range(cfg.n_subcarriers)]


def _si_params(cfg, geom, realization):
    return SiChannelParams(
        wavelength=geom.wavelength,
        backscatter_ratio=cfg.effective_kappa,
        reference_coupling_db=cfg.reference_coupling_db,
        seed=seed_for(cfg, *realization, STREAM_SI),
    )


def self_interference_channels(cfg, geom, part):
    """One self-interference matrix per realization, synthetic or from a trace."""
    if cfg.channel == "trace":
        sets = load_trace(cfg.trace_path)
        for i, cs in enumerate(sets):
            if (cs.m_rx, cs.m_tx) != (part.m_rx, part.m_tx):
                raise DimensionMismatchError(
                    f"trace {cfg.trace_path}: subcarrier {i} self-interference channel is "
                    f"{cs.m_rx}x{cs.m_tx} (M_Rx x M_Tx) but the {cfg.partition} partition "
                    f"needs {part.m_rx}x{part.m_tx}"
                )
        return [cs.h_self for cs in sets]
    return [
        geometric_self_interference(geom, part, _si_params(cfg, geom, r))
        for r in _realizations(cfg)
    ]


def build_partition(cfg, geom):
    try:
        return make_partition(cfg.partition, geom, cfg.effective_m_tx, seed_for(cfg, STREAM_PARTITION))
    except ValueError as exc:
        raise ConfigError(f"partition: {exc}") from None


def _fmt_d_tx(values, m_tx):
    out = [d for d in values if 1 <= d <= m_tx]
    if len(out) != len(values):
        raise ConfigError(f"d_tx values must lie in 1..{m_tx}")
    return sorted(set(out))


def run_suppression_curve(cfg):
    """Per receive antenna and mean suppression versus ``d_tx``.

    Values are in dB and averaged (in dB) over all realizations.
    """
    cfg.validate()
    geom = cfg.geometry()
    part = build_partition(cfg, geom)
    d_values = _fmt_d_tx(cfg.d_tx_values(), part.m_tx)
    channels = self_interference_channels(cfg, geom, part)
    profiles = _parallel_map(lambda h: suppression_profile(h, d_values), channels, cfg.workers)
    per_antenna = np.mean([p[0] for p in profiles], axis=0)
    mean = np.mean([p[1] for p in profiles], axis=0)
    ant_cols = [f"rx{idx}_suppression_db" for idx in part.rx_indices]
    columns = ["d_tx", *ant_cols, "mean_suppression_db"]
    rows = []
    for i, d in enumerate(d_values):
        row = {"d_tx": d}
        row.update(zip(ant_cols, per_antenna[i]))
        row["mean_suppression_db"] = mean[i]
        rows.append(row)
    return columns, rows


def _mean_curve(cfg, geom, part, d_values):
    curves = [
        suppression_profile(geometric_self_interference(geom, part, _si_params(cfg, geom, r)), d_values)[1]
        for r in _realizations(cfg)
    ]
    return np.mean(curves, axis=0)


def run_partition_compare(cfg):
    """Mean suppression versus ``d_tx`` for every partition heuristic.

    The ``random`` entry averages ``cfg.n_random_partitions`` uniformly
    drawn partitions.
    """
    cfg.validate()
    if cfg.channel == "trace":
        raise ConfigError("partition comparison needs synthetic channels (a trace fixes one partition)")
    geom = cfg.geometry()
    m_tx = cfg.effective_m_tx
    try:
        interleaved(geom, m_tx)
    except ValueError as exc:
        raise ConfigError(f"partition comparison: {exc}") from None
    d_values = _fmt_d_tx(cfg.d_tx_values(), m_tx)

    def heuristic(label):
        return _mean_curve(cfg, geom, PARTITION_KINDS[label](geom, m_tx), d_values)

    def random_one(i):
        part = random_partition(geom, m_tx, seed_for(cfg, STREAM_PARTITION, i))
        return _mean_curve(cfg, geom, part, d_values)

    curves = dict(zip(PARTITION_LABELS[:4], _parallel_map(heuristic, PARTITION_LABELS[:4], cfg.workers)))
    rand = _parallel_map(random_one, range(cfg.n_random_partitions), cfg.workers)
    curves["random"] = np.mean(rand, axis=0)

    columns = ["partition", "d_tx", "mean_suppression_db"]
    rows = [
        {"partition": label, "d_tx": d, "mean_suppression_db": curves[label][i]}
        for label in PARTITION_LABELS
        for i, d in enumerate(d_values)
    ]
    return columns, rows


def _check_capability(k, part):
    if k > part.m_tx or k > part.m_rx:
        raise CapabilityError(
            f"{k} users cannot be served with M_Tx={part.m_tx}, M_Rx={part.m_rx}"
        )


def trial_channels(cfg, part, h_self, realization, k, path_loss_db):
    """Half-duplex (whole array) and full-duplex (partitioned) channel sets.

    User links are drawn once over the whole array; the full-duplex set
    keeps the receive rows of the uplink and transmit columns of the
    downlink, so both schemes see the same propagation.
    """
    m = part.n_elements
    h_up = rayleigh_channel(m, k, path_loss_db, seed_for(cfg, *realization, STREAM_UP, k))
    h_down = rayleigh_channel(k, m, path_loss_db, seed_for(cfg, *realization, STREAM_DOWN, k))
    h_usr = None
    if cfg.include_h_usr:
        h_usr = rayleigh_channel(k, k, path_loss_db, seed_for(cfg, *realization, STREAM_USR, k))
    rx, tx = list(part.rx_indices), list(part.tx_indices)
    hd = ChannelSet(np.zeros((m, m), np.complex128), h_up, h_down, h_usr)
    fd = ChannelSet(h_self, h_up[rx], h_down[:, tx], h_usr)
    return hd, fd


def _scheme_rates(cfg, part, si_channels, k, path_loss_db, d_values):
    """Sum/uplink/downlink rates for HD, ideal FD and SoftNull at each d_tx."""
    link = cfg.link_config()
    n = len(si_channels)
    realizations = _realizations(cfg) if cfg.channel != "trace" else [(i, 0) for i in range(n)]
    feasible = [d for d in d_values if d >= k]

    def one(idx):
        hd, fd = trial_channels(cfg, part, si_channels[idx], realizations[idx], k, path_loss_db)
        out = {
            Scheme.HALF_DUPLEX: simulate_trial(Scheme.HALF_DUPLEX, hd, link)[:2],
            Scheme.IDEAL_FULL_DUPLEX: simulate_trial(Scheme.IDEAL_FULL_DUPLEX, fd, link)[:2],
        }
        for d in feasible:
            out[(Scheme.SOFTNULL, d)] = simulate_trial(Scheme.SOFTNULL, fd, link, d)[:2]
        return out

    per_trial = _parallel_map(one, range(n), cfg.workers)

    def rates(key, alpha):
        up = np.array([t[key][0] for t in per_trial])
        down = np.array([t[key][1] for t in per_trial])
        u, dn = achievable_rate(up, alpha), achievable_rate(down, alpha)
        return u, dn, u + dn

    result = {
        Scheme.HALF_DUPLEX: rates(Scheme.HALF_DUPLEX, 0.5),
        Scheme.IDEAL_FULL_DUPLEX: rates(Scheme.IDEAL_FULL_DUPLEX, 1.0),
    }
    for d in feasible:
        result[(Scheme.SOFTNULL, d)] = rates((Scheme.SOFTNULL, d), 1.0)
    return feasible, result


def _rate_setup(cfg):
    cfg.validate()
    geom = cfg.geometry()
    part = build_partition(cfg, geom)
    d_values = _fmt_d_tx(cfg.d_tx_values(), part.m_tx)
    si = self_interference_channels(cfg, geom, part)
    return part, d_values, si


RATE_COLUMNS = ["path_loss_db", "d_tx", "scheme", "uplink_bps_hz", "downlink_bps_hz", "sum_bps_hz"]


def run_rate_curve(cfg):
    """Achievable rates versus ``d_tx`` for each path loss.

    Half duplex and ideal full duplex do not depend on ``d_tx``; their
    values are repeated on every ``d_tx`` so each row is self-contained.
    ``d_tx < users`` cannot be zero-forced and is skipped.
    """
    part, d_values, si = _rate_setup(cfg)
    k = cfg.users
    _check_capability(k, part)
    rows = []
    for pl in cfg.path_loss_db:
        feasible, res = _scheme_rates(cfg, part, si, k, pl, d_values)
        for d in feasible:
            for scheme, key in (
                (Scheme.HALF_DUPLEX, Scheme.HALF_DUPLEX),
                (Scheme.SOFTNULL, (Scheme.SOFTNULL, d)),
                (Scheme.IDEAL_FULL_DUPLEX, Scheme.IDEAL_FULL_DUPLEX),
            ):
                up, down, total = res[key]
                rows.append({
                    "path_loss_db": pl, "d_tx": d, "scheme": scheme.value,
                    "uplink_bps_hz": up, "downlink_bps_hz": down, "sum_bps_hz": total,
                })
    return RATE_COLUMNS, rows


def run_users_sweep(cfg):
    """Sum rate versus number of users, SoftNull at its best ``d_tx``.

    Raises :class:`CapabilityError` when a swept user count exceeds the
    transmit or receive antenna count.
    """
    part, d_values, si = _rate_setup(cfg)
    for k in cfg.users_sweep:
        _check_capability(k, part)
    columns = ["path_loss_db", "users", "scheme", "best_d_tx", "sum_bps_hz"]
    rows = []
    for pl in cfg.path_loss_db:
        for k in cfg.users_sweep:
            feasible, res = _scheme_rates(cfg, part, si, k, pl, d_values)
            if not feasible:
                raise CapabilityError(f"no d_tx in the sweep can serve {k} users")
            sums = [res[(Scheme.SOFTNULL, d)][2] for d in feasible]
            best = int(np.argmax(sums))
            rows.append({"path_loss_db": pl, "users": k, "scheme": Scheme.HALF_DUPLEX.value,
                         "best_d_tx": None, "sum_bps_hz": res[Scheme.HALF_DUPLEX][2]})
            rows.append({"path_loss_db": pl, "users": k, "scheme": Scheme.SOFTNULL.value,
                         "best_d_tx": feasible[best], "sum_bps_hz": sums[best]})
            rows.append({"path_loss_db": pl, "users": k, "scheme": Scheme.IDEAL_FULL_DUPLEX.value,
                         "best_d_tx": part.m_tx, "sum_bps_hz": res[Scheme.IDEAL_FULL_DUPLEX][2]})
    return columns, rows

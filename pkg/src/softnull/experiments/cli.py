"""
Command line entry point.

Exit codes: 0 success, 1 configuration / usage error, 2 runtime or
numerical error.
"""

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from ..channels import ChannelSet
from ..errors import ConfigError, SoftNullError
from ..link import link_budget_snr
from ..trace import load_trace, read_metadata, save_trace
from .config import ExperimentConfig, apply_overrides, load_config
from .output import write_table
from .runners import (
    build_partition,
    run_partition_compare,
    run_rate_curve,
    run_suppression_curve,
    run_users_sweep,
    self_interference_channels,
)

log = logging.getLogger("softnull")

RUNNERS = {
    "suppression": run_suppression_curve,
    "partitions": run_partition_compare,
    "rates": run_rate_curve,
    "users": run_users_sweep,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"{self.format_usage()}{self.prog}: {message}")


# (flag, config field, type, nargs, help)
_EXPERIMENT_FLAGS = [
    ("--rows", "rows", int, None, "array rows"),
    ("--cols", "cols", int, None, "array columns"),
    ("--spacing", "spacing_m", float, None, "element pitch in meters"),
    ("--carrier", "carrier_hz", float, None, "carrier frequency in Hz"),
    ("--partition", "partition", str, None, "east-west | north-south | nw-se | interleaved | random"),
    ("--m-tx", "m_tx", int, None, "number of transmit elements (default M/2)"),
    ("--channel", "channel", str, None, "outdoor-like | indoor-like | synthetic | trace"),
    ("--kappa", "kappa", float, None, "backscatter ratio for --channel synthetic"),
    ("--reference-coupling", "reference_coupling_db", float, None, "adjacent-element coupling in dB"),
    ("--trace", "trace_path", str, None, "trace file for --channel trace"),
    ("--users", "users", int, None, "uplink = downlink users K"),
    ("--users-sweep", "users_sweep", int, "+", "K values for the users sweep"),
    ("--path-loss", "path_loss_db", float, "+", "user path loss(es) in dB"),
    ("--d-tx", "d_tx", int, "+", "effective antenna counts to sweep (default 1..M_Tx)"),
    ("--trials", "n_trials", int, None, "number of channel trials"),
    ("--subcarriers", "n_subcarriers", int, None, "independent subcarriers per trial"),
    ("--random-partitions", "n_random_partitions", int, None, "random partitions to average"),
    ("--bs-power", "bs_power_dbm", float, None, "array sum power in dBm"),
    ("--user-power", "user_power_dbm", float, None, "per-user transmit power in dBm"),
    ("--thermal", "thermal_noise_dbm", float, None, "thermal noise per receiver in dBm"),
    ("--d0-bs", "d0_bs_db", float, None, "base-station dynamic noise figure in dB"),
    ("--d0-user", "d0_user_db", float, None, "client dynamic noise figure in dB"),
    ("--output", "output", str, None, "output file (default stdout)"),
    ("--format", "format", str, None, "csv | json"),
    ("--workers", "workers", int, None, "worker threads"),
]


def _add_experiment_args(p):
    p.add_argument("--config", help="flat YAML config file")
    p.add_argument("--seed", type=int, default=None, help="master RNG seed (default 0)")
    for flag, dest, typ, nargs, help_ in _EXPERIMENT_FLAGS:
        p.add_argument(flag, dest=dest, type=typ, nargs=nargs, default=None, help=help_)
    p.add_argument("--include-h-usr", dest="include_h_usr", action="store_true", default=None,
                   help="model uplink-to-downlink user interference")


def build_parser():
    parser = _Parser(prog="softnull", description="SoftNull full-duplex simulation experiments")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    for name, help_ in (
        ("suppression", "self-interference reduction versus effective antennas"),
        ("partitions", "compare Tx/Rx partition heuristics"),
        ("rates", "achievable rates versus effective antennas"),
        ("users", "best-d_tx sum rate versus number of users"),
    ):
        _add_experiment_args(sub.add_parser(name, help=help_))

    b = sub.add_parser("budget", help="uplink SNR link budget under a dynamic-range limit")
    b.add_argument("--tx", type=float, required=True, help="transmit power in dBm")
    b.add_argument("--pl", type=float, required=True, help="path loss in dB")
    b.add_argument("--supp", type=float, required=True, help="self-interference suppression in dB")
    b.add_argument("--thermal", type=float, required=True, help="thermal noise floor in dBm")
    b.add_argument("--dr", type=float, required=True, help="dynamic noise figure in dB")
    b.add_argument("--mode", choices=("sum", "dominant"), default="sum")

    t = sub.add_parser("trace", help="inspect, convert or generate channel traces")
    tsub = t.add_subparsers(dest="trace_command", parser_class=_Parser, required=True)
    ins = tsub.add_parser("inspect", help="print trace dimensions and channel powers")
    ins.add_argument("path")
    conv = tsub.add_parser("convert", help="convert between .snct and .npz")
    conv.add_argument("src")
    conv.add_argument("dst")
    gen = tsub.add_parser("generate", help="write synthetic self-interference channels as a trace")
    _add_experiment_args(gen)
    gen.add_argument("dst")
    return parser


def _experiment_config(args):
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    overrides = {"seed": args.seed}
    for _, dest, *_ in _EXPERIMENT_FLAGS:
        overrides[dest] = getattr(args, dest)
    overrides["include_h_usr"] = args.include_h_usr
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return apply_overrides(cfg, overrides).validate()


def _run_experiment(args, out):
    cfg = _experiment_config(args)
    columns, rows = RUNNERS[args.command](cfg)
    write_table(columns, rows, cfg.output, cfg.format, stream=out)
    if cfg.output:
        log.info("wrote %d rows to %s", len(rows), cfg.output)


def _power_cell(m):
    # blank for channels with no users
    if m.size == 0:
        return ""
    p = np.mean(np.abs(m) ** 2)
    return f"{10 * np.log10(p):.6f}" if p > 0 else "-inf"


def _trace_inspect(path, out):
    if not Path(path).is_file():
        raise ConfigError(f"trace file not found: {path}")
    sets = load_trace(path)
    cs = sets[0]
    out.write(f"m_rx={cs.m_rx} m_tx={cs.m_tx} k_up={cs.k_up} k_down={cs.k_down} "
              f"n_subcarriers={len(sets)}\n")
    for key, value in read_metadata(path).items():
        out.write(f"meta {key}={value}\n")
    out.write("subcarrier,h_self_power_db,h_up_power_db,h_down_power_db\n")
    for s in sets:
        cells = [_power_cell(m) for m in (s.h_self, s.h_up, s.h_down)]
        out.write(f"{s.subcarrier_index},{','.join(cells)}\n")


_NPZ_KEYS = ("h_self", "h_up", "h_down", "h_usr")


def _trace_convert(src, dst):
    src, dst = Path(src), Path(dst)
    if not src.is_file():
        raise ConfigError(f"source file not found: {src}")
    if src.suffix == ".npz" and dst.suffix == ".snct":
        with np.load(src) as data:
            missing = [k for k in _NPZ_KEYS[:3] if k not in data]
            if missing:
                raise ConfigError(f"{src} lacks arrays {missing}")
            stacks = [data[k] if k in data else None for k in _NPZ_KEYS]
        n = stacks[0].shape[0]
        sets = [ChannelSet(*[None if s is None else s[i] for s in stacks], subcarrier_index=i)
                for i in range(n)]
        save_trace(dst, sets)
    elif src.suffix == ".snct" and dst.suffix == ".npz":
        sets = load_trace(src)
        np.savez(dst, **{k: np.stack([getattr(s, k) for s in sets]) for k in _NPZ_KEYS})
    else:
        raise ConfigError("convert supports .npz -> .snct and .snct -> .npz")


def _trace_generate(args):
    cfg = _experiment_config(args)
    geom = cfg.geometry()
    part = build_partition(cfg, geom)
    channels = self_interference_channels(cfg, geom, part)
    empty_up = np.zeros((part.m_rx, 0))
    empty_down = np.zeros((0, part.m_tx))
    sets = [ChannelSet(h, empty_up, empty_down, subcarrier_index=i) for i, h in enumerate(channels)]
    save_trace(args.dst, sets, metadata={
        "source": "synthetic",
        "partition": cfg.partition,
        "kappa": cfg.effective_kappa,
        "seed": cfg.seed,
        "rows": cfg.rows,
        "cols": cfg.cols,
    })


def run(argv, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(message)s", stream=err)
        if args.command in RUNNERS:
            _run_experiment(args, out)
        elif args.command == "budget":
            snr = link_budget_snr(args.tx, args.pl, args.supp, args.thermal, args.dr, args.mode)
            out.write(f"{snr:.1f} dB\n")
        elif args.trace_command == "inspect":
            _trace_inspect(args.path, out)
        elif args.trace_command == "convert":
            _trace_convert(args.src, args.dst)
        else:
            _trace_generate(args)
    except SystemExit as exc:
        # --help
        return int(exc.code or 0)
    except ConfigError as exc:
        err.write(f"error: {exc}\n")
        return 1
    except (SoftNullError, ValueError, OSError, np.linalg.LinAlgError) as exc:
        err.write(f"error: {exc}\n")
        return 2
    return 0


def main(argv=None):
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())

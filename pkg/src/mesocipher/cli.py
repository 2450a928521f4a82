"""Command-line entry point.

Exit codes: 0 success, 1 invalid input or configuration, 2 runtime fault.
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .attacks.grover import grover_estimate
from .bits import bits_to_bytes, bits_to_hex, bytes_to_bits, hex_to_bits
from .channel import ChannelModel, transmit
from .cipher import SignalSequence, bob_decode, encode, otp_generate_and_wrap
from .harness.config import CONVERTERS, ConfigError, load_config
from .harness.experiment import format_csv, run_experiment, sweep
from .harness.rng import RngStream
from .keystream import SeedKey, expand_running_key
from .optics import Constellation, flip_probability, general_overlap, pair_overlap

SIGNAL_HEADER = ["index", "phase_index", "amplitude"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _seed_args(p):
    p.add_argument("--seed-hex", required=True, help="seed key, hexadecimal, MSB first")
    p.add_argument("--seed-bits", type=int, required=True, help="seed key length k")


def _constellation_args(p):
    p.add_argument("--M", type=int, default=32)
    p.add_argument("--alpha0", type=float, default=5.0)


def _config_args(p):
    p.add_argument("--config", help="key = value file; flags override it")
    for name in CONVERTERS:
        flags = [f"--{name}"]
        if "_" in name:
            flags.append(f"--{name.replace('_', '-')}")
        if name == "output_path":
            flags.append("--output")
        p.add_argument(*flags, dest=name, default=None, metavar=name.upper())


def _load(args, **fixed):
    overrides = {name: CONVERTERS[name](getattr(args, name))
                 for name in CONVERTERS if getattr(args, name) is not None}
    overrides.update(fixed)
    return load_config(args.config, **overrides)


def _read_plaintext(args) -> np.ndarray:
    if args.plaintext_hex is not None:
        return hex_to_bits(args.plaintext_hex)
    return bytes_to_bits(Path(args.infile).read_bytes())


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def signal_to_csv(signal: SignalSequence) -> str:
    rows = [{"index": i, "phase_index": int(l), "amplitude": signal.amplitude}
            for i, l in enumerate(signal.phase_indices)]
    return format_csv(SIGNAL_HEADER, rows)


def signal_from_csv(text: str, constellation: Constellation) -> SignalSequence:
    reader = csv.DictReader(text.splitlines())
    if reader.fieldnames != SIGNAL_HEADER:
        raise ValueError(f"signal file must have header {','.join(SIGNAL_HEADER)}")
    rows = list(reader)
    if not rows:
        raise ValueError("signal file holds no symbols")
    if [int(r["index"]) for r in rows] != list(range(len(rows))):
        raise ValueError("signal indices must run 0, 1, 2, ...")
    amplitudes = {float(r["amplitude"]) for r in rows}
    if len(amplitudes) != 1:
        raise ValueError("all symbols of a signal share one amplitude")
    return SignalSequence(np.array([int(r["phase_index"]) for r in rows]), amplitudes.pop(),
                          constellation)


def cmd_keystream(args):
    key = SeedKey.from_hex(args.seed_hex, args.seed_bits)
    symbols = expand_running_key(key, args.M, args.n).symbols
    width = max(1, (args.M.bit_length() - 1 + 3) // 4)
    print(f"{key.k} {key.value:x} {args.M} {args.n} " + "".join(f"{s:0{width}x}" for s in symbols))


def cmd_encode(args):
    key = SeedKey.from_hex(args.seed_hex, args.seed_bits)
    signal = encode(key, _read_plaintext(args), Constellation(args.M, args.alpha0))
    if args.eta != 1.0:
        signal = transmit(signal, ChannelModel(args.eta))
    _emit(signal_to_csv(signal), args.out)


def cmd_decode(args):
    key = SeedKey.from_hex(args.seed_hex, args.seed_bits)
    signal = signal_from_csv(Path(args.signal).read_text(), Constellation(args.M, args.alpha0))
    bits = bob_decode(key, signal, RngStream(args.rng_seed, "decode"))
    if args.out:
        Path(args.out).write_bytes(bits_to_bytes(bits))
    else:
        print(bits_to_hex(bits) if bits.size % 8 == 0 else "".join(map(str, bits)))


def cmd_otp_wrap(args):
    key = SeedKey.from_hex(args.seed_hex, args.seed_bits)
    message = _read_plaintext(args)
    signal, session = otp_generate_and_wrap(key, message.size, message,
                                            Constellation(args.M, args.alpha0),
                                            RngStream(args.rng_seed, "otp"))
    Path(args.signal_out).write_text(signal_to_csv(signal))
    if args.pad_out:
        Path(args.pad_out).write_text(bits_to_hex(session.R) + "\n")
    print(bits_to_hex(session.C))


def cmd_attack(args):
    if args.kind == "grover":
        cfg = _load(args)
        if cfg.eta is None and cfg.t is None:
            raise ConfigError("give either eta or t")
        eta = cfg.eta if cfg.eta is not None else 1 / (cfg.t + 1)
        est = grover_estimate(cfg.k, eta)
        row = {"k": cfg.k, "N": est.N, "eta": eta, "iterations": est.iterations,
               "success_prob": est.success_prob, "feasible": est.feasible}
        _emit(format_csv(list(row), [row]), cfg.output_path)
        return
    cfg = _load(args, attack=args.kind)
    _, summary = run_experiment(cfg, append=True)
    for field, value in summary.__dict__.items():
        print(f"{field}: {value}")


def cmd_sweep(args):
    cfg = _load(args)
    values = [CONVERTERS[args.axis](v) for v in args.values.split(",") if v.strip()]
    curve = sweep(cfg, args.axis, values)
    if not cfg.output_path:
        from .harness.experiment import SWEEP_COLUMNS
        sys.stdout.write(format_csv(SWEEP_COLUMNS, curve))


def cmd_tables(args):
    if args.table == "overlap":
        steps = args.steps
        rows = []
        for alpha0 in _floats(args.alpha0):
            for i in range(steps + 1):
                delta = math.pi * i / steps
                rep = general_overlap(alpha0, delta)
                rows.append({"alpha0": alpha0, "delta_theta": delta,
                             "log_magnitude": rep.log_magnitude, "magnitude": rep.magnitude,
                             "pair_overlap": pair_overlap(alpha0)})
        cols = ["alpha0", "delta_theta", "log_magnitude", "magnitude", "pair_overlap"]
    else:
        rows = [{"amplitude": a, "delta": d, "flip_probability": flip_probability(a, d)}
                for a in _floats(args.amplitudes) for d in _floats(args.deltas)]
        cols = ["amplitude", "delta", "flip_probability"]
    sys.stdout.write(format_csv(cols, rows))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mesocipher", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("keystream", help="print running-key symbols in golden-vector format")
    _seed_args(p)
    p.add_argument("--M", type=int, default=32)
    p.add_argument("--n", type=int, default=16)
    p.set_defaults(func=cmd_keystream)

    for name, func, help_ in (("encode", cmd_encode, "encode plaintext to a signal CSV"),
                              ("otp-wrap", cmd_otp_wrap, "send a random pad and print C = R xor message")):
        p = sub.add_parser(name, help=help_)
        _seed_args(p)
        _constellation_args(p)
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--plaintext-hex", "--message-hex", dest="plaintext_hex")
        src.add_argument("--infile", help="raw bytes")
        if name == "encode":
            p.add_argument("--eta", type=float, default=1.0, help="channel transmission")
            p.add_argument("--out")
        else:
            p.add_argument("--rng-seed", type=int, default=0)
            p.add_argument("--signal-out", required=True)
            p.add_argument("--pad-out")
        p.set_defaults(func=func)

    p = sub.add_parser("decode", help="decode a signal CSV with the seed key")
    _seed_args(p)
    _constellation_args(p)
    p.add_argument("--signal", required=True)
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--out", help="write raw bytes here instead of printing hex")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("attack", help="run an attack experiment, appending rows to a CSV")
    p.add_argument("kind", choices=["exhaustive", "multiwindow", "prune", "grover"])
    _config_args(p)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("sweep", help="success rate against one parameter")
    p.add_argument("--axis", required=True, choices=["t", "r", "k", "alpha0", "eta", "b"])
    p.add_argument("--values", required=True, help="comma separated")
    _config_args(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("tables", help="overlap or flip-probability tables as CSV")
    p.add_argument("table", choices=["overlap", "flip"])
    p.add_argument("--alpha0", default="0.5,1,2,5")
    p.add_argument("--steps", type=int, default=8)
    p.add_argument("--amplitudes", default="0,1,2,4")
    p.add_argument("--deltas", default=",".join(repr(math.pi * i / 4) for i in range(5)))
    p.set_defaults(func=cmd_tables)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ValueError, IndexError, FileNotFoundError) as exc:
        print(f"mesocipher: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        print(f"mesocipher: fault: {exc!r}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

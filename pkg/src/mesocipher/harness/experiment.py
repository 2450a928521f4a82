"""Monte-Carlo experiment runner and parameter sweeps.

One run draws a fresh seed key and plaintext, encodes, lets Eve tap the
channel, runs the configured attack and lets Bob decode his share.  Every
random draw is addressed through ``RngStream(master_seed, run_id, ...)``, so
runs can execute in any order or in parallel and still give identical rows.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import math
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import erfc
from scipy.stats import binomtest

from ..attacks.english import sample_corpus
from ..attacks.pruning import pruning_search
from ..attacks.search import exhaustive_search, multi_window_attack
from ..bits import bytes_to_bits
from ..channel import ChannelModel, intercept_channel
from ..cipher import bob_decode, encode, otp_generate_and_wrap, variant_reduce_known_plaintext
from ..keystream import SeedKey, stream_xor
from ..optics import Constellation
from .config import ConfigError, ExperimentConfig
from .rng import RngStream

RUN_COLUMNS = [
    "run_id", "k", "M", "alpha0", "eta", "t", "r", "v", "tau", "b", "scorer", "success",
    "trials_tested", "copies_consumed", "symbols_consumed", "wall_ms",
    "bob_ber", "wilson_low", "wilson_high",
]
SWEEP_AXES = ("t", "r", "k", "alpha0", "eta", "b")
SWEEP_COLUMNS = [
    "axis", "value", "runs", "successes", "success_rate", "wilson_low", "wilson_high",
    "mean_trials_tested", "mean_copies_consumed", "mean_symbols_consumed",
    "bob_ber", "bob_ber_theory",
]


@dataclass(frozen=True)
class ExperimentSummary:
    runs: int
    successes: int
    success_rate: float
    wilson_low: float
    wilson_high: float
    mean_trials_tested: float
    mean_copies_consumed: float
    mean_symbols_consumed: float
    bob_ber: float
    bob_ber_theory: float


def wilson_interval(successes: int, runs: int) -> tuple[float, float]:
    ci = binomtest(successes, runs).proportion_ci(confidence_level=0.95, method="wilson")
    return float(ci.low), float(ci.high)


def _message(cfg: ExperimentConfig, setup: RngStream) -> np.ndarray:
    if cfg.scorer == "english":
        corpus = sample_corpus()
        start = setup.below(len(corpus))
        need = cfg.n // 8
        text = (corpus[start:] + corpus * (need // len(corpus) + 1))[:need]
        return bytes_to_bits(text)
    return setup.bits(cfg.n)


def run_one(cfg: ExperimentConfig, run_id: int) -> dict:
    """Execute a single run of a validated config and return its CSV row."""
    started = time.perf_counter()
    root = RngStream(cfg.master_seed, run_id)
    setup = root.spawn("setup")
    seed = SeedKey(cfg.k, setup.getrandbits(cfg.k))
    constellation = Constellation(cfg.M, cfg.alpha0)
    message = _message(cfg, setup)

    payload = message
    if cfg.double_encrypt:
        key2 = SeedKey(cfg.key2_bits, setup.getrandbits(cfg.key2_bits))
        payload = stream_xor(key2, message)

    if cfg.variant == "otp":
        signal, session = otp_generate_and_wrap(seed, cfg.n, payload, constellation, setup)
        sent = session.R
        reference = variant_reduce_known_plaintext(session.C, message)
    else:
        signal = encode(seed, payload, constellation)
        sent = payload
        reference = message

    channel = ChannelModel(cfg.eta)
    width = cfg.window
    taps = [intercept_channel(signal.window(w * width, (w + 1) * width), channel)
            for w in range(cfg.r)]
    refs = [reference[w * width:(w + 1) * width] for w in range(cfg.r)]

    bob = root.spawn("bob")
    decoded = np.concatenate([bob_decode(seed, tap.bob_copy, bob) for tap in taps])
    bob_ber = float(np.mean(decoded != sent))

    eve = root.spawn("eve")
    attack_cfg = cfg.attack_config()
    if cfg.attack == "prune":
        ref = refs[0] if cfg.scorer == "known-plaintext" else None
        outcome = pruning_search(taps[0], ref, cfg.k, attack_cfg, eve)
    elif cfg.attack == "multiwindow":
        outcome = multi_window_attack(taps, refs, cfg.k, attack_cfg, eve)
    else:
        outcome = exhaustive_search(taps[0], refs[0], cfg.k, attack_cfg, eve)
    outcome = outcome.judged(seed)
    if outcome.symbols_consumed != sum(tap.grants for tap in taps):
        raise RuntimeError("attack resource count disagrees with the channel ledger")

    wall = (time.perf_counter() - started) * 1000 if cfg.record_timing else None
    return {
        "run_id": run_id, "k": cfg.k, "M": cfg.M, "alpha0": cfg.alpha0, "eta": cfg.eta,
        "t": cfg.t, "r": cfg.r, "v": cfg.v, "tau": cfg.tau, "b": cfg.b, "scorer": cfg.scorer,
        "success": outcome.success, "trials_tested": outcome.trials_tested,
        "copies_consumed": outcome.copies_consumed, "symbols_consumed": outcome.symbols_consumed,
        "wall_ms": wall, "bob_ber": bob_ber, "wilson_low": None, "wilson_high": None,
    }


def _run_star(args):
    return run_one(*args)


def summarize(cfg: ExperimentConfig, rows: list[dict]) -> ExperimentSummary:
    runs = len(rows)
    successes = sum(bool(row["success"]) for row in rows)
    low, high = wilson_interval(successes, runs)

    def mean(col):
        return float(np.mean([row[col] for row in rows]))

    theory = 0.5 * float(erfc(math.sqrt(cfg.eta) * cfg.alpha0))
    return ExperimentSummary(runs, successes, successes / runs, low, high, mean("trials_tested"),
                             mean("copies_consumed"), mean("symbols_consumed"), mean("bob_ber"),
                             theory)


def aggregate_row(cfg: ExperimentConfig, summary: ExperimentSummary) -> dict:
    return {
        "run_id": "aggregate", "k": cfg.k, "M": cfg.M, "alpha0": cfg.alpha0, "eta": cfg.eta,
        "t": cfg.t, "r": cfg.r, "v": cfg.v, "tau": cfg.tau, "b": cfg.b, "scorer": cfg.scorer,
        "success": summary.success_rate, "trials_tested": summary.mean_trials_tested,
        "copies_consumed": summary.mean_copies_consumed,
        "symbols_consumed": summary.mean_symbols_consumed, "wall_ms": None,
        "bob_ber": summary.bob_ber, "wilson_low": summary.wilson_low,
        "wilson_high": summary.wilson_high,
    }


def run_experiment(cfg: ExperimentConfig, append: bool = False) -> tuple[list[dict], ExperimentSummary]:
    """Run ``cfg.runs`` independent trials; rows come back ordered by run_id.

    Writes the CSV (per-run rows plus an aggregate row) when ``output_path``
    is set.
    """
    cfg = cfg.validated()
    jobs = [(cfg, run_id) for run_id in range(cfg.runs)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(_run_star, jobs))
    else:
        rows = [run_one(*job) for job in jobs]
    rows.sort(key=lambda row: row["run_id"])
    summary = summarize(cfg, rows)
    rows.append(aggregate_row(cfg, summary))
    if cfg.output_path:
        write_csv(cfg.output_path, RUN_COLUMNS, rows, append=append)
    return rows, summary


def sweep(cfg: ExperimentConfig, axis: str, values) -> list[dict]:
    """Run one experiment per axis value and return the transition curve."""
    if axis not in SWEEP_AXES:
        raise ConfigError(f"cannot sweep {axis!r}; choose from {SWEEP_AXES}")
    curve = []
    for value in values:
        changes = {axis: value, "output_path": None}
        if axis == "t":
            changes["eta"] = None
        elif axis == "eta":
            changes["t"] = None
        point = dataclasses.replace(cfg, **changes)
        _, s = run_experiment(point)
        curve.append({
            "axis": axis, "value": value, "runs": s.runs, "successes": s.successes,
            "success_rate": s.success_rate, "wilson_low": s.wilson_low,
            "wilson_high": s.wilson_high, "mean_trials_tested": s.mean_trials_tested,
            "mean_copies_consumed": s.mean_copies_consumed,
            "mean_symbols_consumed": s.mean_symbols_consumed, "bob_ber": s.bob_ber,
            "bob_ber_theory": s.bob_ber_theory,
        })
    if cfg.output_path:
        write_csv(cfg.output_path, SWEEP_COLUMNS, curve)
    return curve


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def format_csv(columns: list[str], rows: list[dict], header: bool = True) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if header:
        writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row[col]) for col in columns])
    return buf.getvalue()


def write_csv(path, columns: list[str], rows: list[dict], append: bool = False) -> None:
    """Write atomically: the target is replaced only by a complete file."""
    path = Path(path)
    existing = ""
    if append and path.exists():
        existing = path.read_text(encoding="utf-8")
        first = existing.split("\n", 1)[0]
        if first != ",".join(columns):
            raise ConfigError(f"{path} has a different header; refusing to append")
    body = format_csv(columns, rows, header=not existing)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(existing + body)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise

"""Exhaustive key search: one trial seed per intercepted copy.

A copy measured under a trial seed is committed to that seed, so after the
v-symbol check the rest of the copy is retired.  With r windows of t copies
each, trials are handed out window-major: trial g uses window g // t,
copy g % t.
"""
from __future__ import annotations

import numpy as np

from ..channel import EveTap
from ..harness.rng import RngStream
from ..keystream import SeedKey, registers_for
from .core import AttackConfig, AttackOutcome, decode_under, trial_values


def multi_window_attack(windows: list[EveTap], references: list, k: int, cfg: AttackConfig,
                        rng: RngStream) -> AttackOutcome:
    if len(windows) != len(references):
        raise ValueError("need one reference plaintext per window")
    if not windows:
        raise ValueError("no windows to attack")
    for tap, ref in zip(windows, references):
        if tap.n < cfg.v:
            raise ValueError(f"window of {tap.n} symbols is shorter than v={cfg.v}")
        if len(ref) != tap.n:
            raise ValueError("reference length does not match its window")
        if tap.grants:
            raise ValueError("windows must be fresh")

    total = sum(tap.t for tap in windows)
    order = trial_values(k, total, cfg, rng)
    positions = np.arange(cfg.v)
    tested = 0
    for w, (tap, ref) in enumerate(zip(windows, references)):
        stream = rng.spawn(w)
        ref_v = np.asarray(ref, dtype=np.uint8)[:cfg.v]
        for c0 in range(0, tap.t, cfg.batch):
            if tested >= order.size:
                break
            c1 = min(tap.t, c0 + cfg.batch, c0 + order.size - tested)
            copies = np.arange(c0, c1)
            trials = order[tested:tested + copies.size]
            decoded = decode_under(tap, stream, registers_for(trials, k), copies[:, None],
                                   np.broadcast_to(positions, (copies.size, cfg.v)))
            agreement = (decoded == ref_v).mean(axis=1)
            hits = np.flatnonzero(agreement >= cfg.tau)
            used = copies.size if hits.size == 0 else hits[0] + 1
            tap.consume_block(copies[:used, None], positions[None, :])
            for c in copies[:used]:
                tap.retire_copy(int(c))
            tested += int(used)
            if hits.size:
                return _outcome(windows, SeedKey(k, int(trials[hits[0]])), tested)
    return _outcome(windows, None, tested)


def exhaustive_search(tap: EveTap, reference, k: int, cfg: AttackConfig,
                      rng: RngStream) -> AttackOutcome:
    return multi_window_attack([tap], [reference], k, cfg, rng)


def _outcome(windows, recovered, tested) -> AttackOutcome:
    copies = sum(int(np.count_nonzero(tap.consumed.any(axis=1))) for tap in windows)
    symbols = sum(tap.grants for tap in windows)
    return AttackOutcome(recovered, tested, copies, symbols)

"""Attack configuration, outcomes and single-trial verification.

Eve's measurement noise for window ``w``, copy ``c`` and symbol ``p`` is the
uniform addressed by ``rng.spawn(w)`` / child ``c`` / counter ``p``.  Every
engine and ``verify_trial_key`` read the same address, so a trial's result
does not depend on how the engine batches its work.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from ..channel import EveTap, ResourceExhaustedError
from ..harness.rng import RngStream, uniforms
from ..keystream import SeedKey, registers_for, symbols_at
from ..optics import measure_bits
from . import english

SCORERS = ("known-plaintext", "english")
ORDERS = ("ascending", "random")
MAX_RANDOM_ORDER_BITS = 26


@dataclass(frozen=True)
class AttackConfig:
    v: int = 128
    tau: float = 0.75
    b: int = 16
    scorer: str = "known-plaintext"
    order: str = "ascending"
    english_threshold: float = english.PASS_THRESHOLD
    english_weight: float = english.PRINTABLE_WEIGHT
    batch: int = 256

    def __post_init__(self):
        if self.v < 1 or self.b < 1:
            raise ValueError("v and b must be positive")
        if not 0.5 < self.tau < 1:
            raise ValueError(f"tau must lie in (0.5, 1), got {self.tau}")
        if self.b > self.v:
            raise ValueError(f"prefix bits b={self.b} exceed verify bits v={self.v}")
        if self.scorer not in SCORERS:
            raise ValueError(f"unknown scorer {self.scorer!r}; expected one of {SCORERS}")
        if self.order not in ORDERS:
            raise ValueError(f"unknown trial order {self.order!r}; expected one of {ORDERS}")
        if self.scorer == "english" and (self.b % 8 or self.v % 8):
            raise ValueError("the english scorer needs b and v to be whole bytes")
        if self.batch < 1:
            raise ValueError("batch must be positive")


@dataclass(frozen=True)
class AttackOutcome:
    recovered: SeedKey | None
    trials_tested: int
    copies_consumed: int
    symbols_consumed: int
    success: bool | None = None

    def judged(self, true_seed: SeedKey) -> "AttackOutcome":
        return dataclasses.replace(self, success=self.recovered == true_seed)


def trial_values(k: int, count: int, cfg: AttackConfig, rng: RngStream) -> np.ndarray:
    """The first ``count`` seed values Eve will try, all distinct."""
    count = min(count, 1 << k)
    if cfg.order == "ascending":
        return np.arange(count, dtype=np.uint64)
    if k > MAX_RANDOM_ORDER_BITS:
        raise ValueError(f"random trial order is limited to k <= {MAX_RANDOM_ORDER_BITS}")
    return rng.spawn("order").permutation(1 << k)[:count].astype(np.uint64)


def decode_under(tap: EveTap, window_stream: RngStream, registers, copies, positions) -> np.ndarray:
    """Eve's measured bits for trial registers at (copy, symbol) addresses.

    ``registers`` has shape (B,); ``copies`` and ``positions`` shape (B, L).
    Does not touch the consumption ledger.
    """
    signal = tap.copy
    M = signal.constellation.M
    positions = np.asarray(positions, dtype=np.int64)
    basis = symbols_at(registers, signal.offset + positions, M)
    u = uniforms(window_stream.child_keys(copies), positions)
    return measure_bits(signal.phase_indices[positions], signal.amplitude, basis, M, u)


def verify_trial_key(tap: EveTap, copy_index: int, trial: SeedKey, reference, cfg: AttackConfig,
                     rng: RngStream, window: int = 0) -> tuple[bool, float]:
    """Measure the next v unmeasured symbols of one copy under a trial seed.

    Returns (accepted, fraction of decoded bits matching ``reference``).
    """
    free = tap.unconsumed(copy_index)
    if free.size < cfg.v:
        raise ResourceExhaustedError(
            f"copy {copy_index} has {free.size} unmeasured symbols, need {cfg.v}")
    positions = free[:cfg.v][None, :]
    reference = np.asarray(reference, dtype=np.uint8)
    decoded = decode_under(tap, rng.spawn(window), registers_for([trial.value], trial.k),
                           np.full_like(positions, copy_index), positions)
    tap.consume_block(copy_index, positions[0])
    agreement = float(np.mean(decoded[0] == reference[positions[0]]))
    return agreement >= cfg.tau, agreement

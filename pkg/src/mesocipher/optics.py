"""Constellation geometry, coherent-state overlaps and the committed phase measurement.

Amplitudes are in square-root-of-photon-number units.  Measurement noise is
Gaussian with variance 1/2 per quadrature, so deciding on the sign of the
in-phase quadrature of |a e^{i phi}> relative to a reference basis fails with
probability erfc(a cos phi) / 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .keystream import SeedKey, check_alphabet, expand_running_key


@dataclass(frozen=True)
class Constellation:
    M: int
    alpha0: float

    def __post_init__(self):
        check_alphabet(self.M)
        if not self.alpha0 > 0:
            raise ValueError(f"alpha0 must be positive, got {self.alpha0}")

    def phase(self, l: int) -> float:
        return phase_of(l, self.M)


@dataclass(frozen=True)
class SymbolState:
    phase_index: int
    amplitude: float


@dataclass(frozen=True)
class OverlapReport:
    log_magnitude: float

    @property
    def magnitude(self) -> float:
        return math.exp(self.log_magnitude)


def phase_of(l: int, M: int) -> float:
    if not 0 <= l < M:
        raise IndexError(f"phase index {l} outside [0, {M})")
    return 2 * math.pi * l / M


def pair_overlap(alpha0: float) -> float:
    """|<alpha|-alpha>| for the two members of one signal pair."""
    return math.exp(-2 * alpha0**2)


def general_overlap(alpha0: float, delta_theta: float) -> OverlapReport:
    return OverlapReport(-(alpha0**2) * (1 - math.cos(delta_theta)))


def encoded_indices(running_symbols, bits, M: int) -> np.ndarray:
    """Phase index K'_i for a 0 bit, K'_i + M/2 for a 1 bit."""
    running_symbols = np.asarray(running_symbols, dtype=np.int64)
    bits = np.asarray(bits, dtype=np.int64)
    return (running_symbols + bits * (M // 2)) % M


def codeword_overlap(seed_a: SeedKey, seed_b: SeedKey, plaintext, constellation: Constellation,
                     n: int) -> OverlapReport:
    """Overlap of the n-symbol codewords that two seeds produce for the same plaintext.

    Only the first ``n`` plaintext bits are used.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    bits = np.asarray(plaintext, dtype=np.int64)[:n]
    if bits.size < n:
        raise ValueError(f"plaintext has {bits.size} bits, need {n}")
    M = constellation.M
    la = encoded_indices(expand_running_key(seed_a, M, n).symbols, bits, M)
    lb = encoded_indices(expand_running_key(seed_b, M, n).symbols, bits, M)
    delta = 2 * np.pi * (la - lb) / M
    # fsum is correctly rounded, so the result cannot grow as n grows.
    return OverlapReport(-(constellation.alpha0**2) * math.fsum(1 - np.cos(delta)))


def flip_probability(a, delta):
    """Chance that committed binary discrimination picks the wrong pair member.

    ``a`` is the received amplitude, ``delta`` the misalignment between the
    signal's basis and the receiver's basis.  Accepts scalars or arrays.
    """
    p = 0.5 * erfc(np.multiply(a, np.cos(delta)))
    return float(p) if np.ndim(p) == 0 else p


def measure_bits(phase_indices, amplitude, trial_indices, M: int, uniforms) -> np.ndarray:
    """Vectorised committed measurement given pre-drawn uniforms.

    Returns which member of the trial pair {trial, trial + M/2} was observed
    (0 for the trial phase itself).  Inputs broadcast together.
    """
    delta = 2 * np.pi * (np.asarray(phase_indices) - np.asarray(trial_indices)) / M
    p_one = 0.5 * erfc(np.multiply(amplitude, np.cos(delta)))
    return (np.asarray(uniforms) < p_one).astype(np.uint8)


def measure_bit(state: SymbolState, trial_phase_index: int, M: int, rng) -> int:
    """Measure one symbol in the basis picked by ``trial_phase_index``.

    ``rng`` needs a ``random()`` method; one draw is consumed.
    """
    if not 0 <= trial_phase_index < M:
        raise IndexError(f"trial phase index {trial_phase_index} outside [0, {M})")
    return int(measure_bits(state.phase_index, state.amplitude, trial_phase_index, M, rng.random()))

"""Alice's encoder, Bob's decoder and the key-generation/one-time-pad variant."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bits import as_bits
from .keystream import SeedKey, expand_running_key
from .optics import Constellation, SymbolState, encoded_indices, measure_bits


@dataclass(frozen=True)
class SignalSequence:
    """A codeword: one phase index per symbol and a common amplitude.

    ``offset`` is the running-key position of the first symbol, nonzero when
    a long transmission is cut into windows.
    """

    phase_indices: np.ndarray
    amplitude: float
    constellation: Constellation
    offset: int = 0

    def __post_init__(self):
        idx = np.asarray(self.phase_indices, dtype=np.int64)
        if idx.ndim != 1 or idx.size == 0:
            raise ValueError("a signal needs at least one symbol")
        if idx.min() < 0 or idx.max() >= self.constellation.M:
            raise ValueError("phase index outside the constellation")
        if self.amplitude < 0 or self.amplitude > self.constellation.alpha0 * (1 + 1e-12):
            raise ValueError("amplitude must lie in [0, alpha0]")
        idx.setflags(write=False)
        object.__setattr__(self, "phase_indices", idx)

    def __len__(self):
        return self.phase_indices.size

    @property
    def symbols(self) -> list[SymbolState]:
        return [SymbolState(int(l), self.amplitude) for l in self.phase_indices]

    def window(self, start: int, stop: int) -> "SignalSequence":
        """Symbols [start, stop) as a signal of their own, keeping running-key alignment."""
        if not 0 <= start < stop <= len(self):
            raise IndexError(f"window [{start}, {stop}) outside a {len(self)}-symbol signal")
        return SignalSequence(self.phase_indices[start:stop], self.amplitude, self.constellation,
                              self.offset + start)

    def with_amplitude(self, amplitude: float) -> "SignalSequence":
        return SignalSequence(self.phase_indices, amplitude, self.constellation, self.offset)


@dataclass(frozen=True)
class OtpSession:
    R: np.ndarray
    C: np.ndarray


def running_key(seed: SeedKey, M: int, n: int, offset: int = 0) -> np.ndarray:
    return expand_running_key(seed, M, offset + n).symbols[offset:]


def encode(seed: SeedKey, x, constellation: Constellation, offset: int = 0) -> SignalSequence:
    x = as_bits(x)
    if x.size == 0:
        raise ValueError("plaintext must hold at least one bit")
    M = constellation.M
    idx = encoded_indices(running_key(seed, M, x.size, offset), x, M)
    return SignalSequence(idx, constellation.alpha0, constellation, offset)


def bob_decode(seed: SeedKey, received: SignalSequence, rng) -> np.ndarray:
    """Measure every symbol in the basis named by Bob's running key."""
    M = received.constellation.M
    basis = running_key(seed, M, len(received), received.offset)
    u = rng.random(len(received))
    return measure_bits(received.phase_indices, received.amplitude, basis, M, u)


def otp_generate_and_wrap(seed: SeedKey, pad_length: int, message, constellation: Constellation,
                          rng) -> tuple[SignalSequence, OtpSession]:
    """Send a fresh random pad R through the cipher and return C = R xor message."""
    message = as_bits(message)
    if pad_length != message.size:
        raise ValueError(f"pad length {pad_length} != message length {message.size}")
    R = (rng.random(pad_length) < 0.5).astype(np.uint8)
    return encode(seed, R, constellation), OtpSession(R, R ^ message)


def variant_reduce_known_plaintext(C, message) -> np.ndarray:
    """Known (message, C) pairs give back the pad, i.e. the quantum layer's plaintext."""
    C, message = as_bits(C), as_bits(message)
    if C.size != message.size:
        raise ValueError(f"length mismatch: {C.size} != {message.size}")
    return C ^ message

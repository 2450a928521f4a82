"""Lossy channel, Eve's lossless substitution with beamsplitting, and copy bookkeeping."""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

import numpy as np

from .cipher import SignalSequence


class AlreadyConsumedError(RuntimeError):
    """A symbol of an intercepted copy was measured twice."""


class ResourceExhaustedError(RuntimeError):
    pass


@dataclass(frozen=True)
class ChannelModel:
    transmission: float

    def __post_init__(self):
        if not 0 < self.transmission <= 1:
            raise ValueError(f"transmission must be in (0, 1], got {self.transmission}")

    @classmethod
    def for_copies(cls, t: int) -> "ChannelModel":
        return cls(1 / (t + 1))

    @property
    def copies(self) -> int:
        """Whole copies of Bob's signal Eve gains by removing the loss; remainder discarded."""
        # Tolerance keeps 1/(1/(t+1)) from flooring to t.
        return math.floor(1 / self.transmission + 1e-9) - 1


def transmit(signal: SignalSequence, channel: ChannelModel) -> SignalSequence:
    return signal.with_amplitude(signal.amplitude * math.sqrt(channel.transmission))


@dataclass
class EveTap:
    """Bob's copy plus t identical copies held by Eve.

    The Eve copies share one immutable SignalSequence; ``consumed`` records
    which (copy, symbol) pairs have been measured.  Grants are serialised by a
    lock, but attacks are expected to partition copies between workers anyway.
    """

    bob_copy: SignalSequence
    copy: SignalSequence
    t: int
    consumed: np.ndarray = field(repr=False)
    grants: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    @property
    def n(self) -> int:
        return len(self.copy)

    @property
    def eve_copies(self) -> tuple[SignalSequence, ...]:
        return (self.copy,) * self.t

    def _check(self, copy_index, symbol_index):
        if not 0 <= copy_index < self.t:
            raise IndexError(f"copy {copy_index} outside [0, {self.t})")
        if not 0 <= symbol_index < self.n:
            raise IndexError(f"symbol {symbol_index} outside [0, {self.n})")

    def consume_symbol(self, copy_index: int, symbol_index: int) -> bool:
        self._check(copy_index, symbol_index)
        with self._lock:
            if self.consumed[copy_index, symbol_index]:
                raise AlreadyConsumedError(f"copy {copy_index} symbol {symbol_index} already measured")
            self.consumed[copy_index, symbol_index] = True
            self.grants += 1
        return True

    def consume_block(self, copy_indices, symbol_indices) -> int:
        """Grant a batch of (copy, symbol) pairs at once; all or nothing."""
        copies = np.asarray(copy_indices, dtype=np.int64)
        symbols = np.asarray(symbol_indices, dtype=np.int64)
        copies, symbols = np.broadcast_arrays(copies, symbols)
        if copies.size == 0:
            return 0
        if copies.min() < 0 or copies.max() >= self.t or symbols.min() < 0 or symbols.max() >= self.n:
            raise IndexError("copy or symbol index out of range")
        flat = (copies * self.n + symbols).ravel()
        if np.unique(flat).size != flat.size:
            raise AlreadyConsumedError("the same symbol was requested twice in one block")
        with self._lock:
            view = self.consumed.reshape(-1)
            if view[flat].any():
                raise AlreadyConsumedError("block contains already-measured symbols")
            view[flat] = True
            self.grants += flat.size
        return flat.size

    def retire_copy(self, copy_index: int) -> int:
        """Mark the rest of a copy as used up; returns the number of new grants."""
        self._check(copy_index, 0)
        with self._lock:
            row = self.consumed[copy_index]
            fresh = int(np.count_nonzero(~row))
            row[:] = True
            self.grants += fresh
        return fresh

    def unconsumed(self, copy_index: int) -> np.ndarray:
        self._check(copy_index, 0)
        return np.flatnonzero(~self.consumed[copy_index])


def eve_intercept(signal: SignalSequence, t: int, transmission: float | None = None) -> EveTap:
    """Split the full-strength signal into t + 1 equal parts, one of which goes to Bob.

    With ``transmission`` given, every part carries Bob's usual amplitude
    sqrt(transmission) * alpha0 and any leftover energy is dropped.
    """
    if t < 1:
        raise ValueError(f"Eve needs at least one copy, got t={t}")
    if transmission is None:
        amplitude = signal.amplitude / math.sqrt(t + 1)
    else:
        if (t + 1) * transmission > 1 + 1e-9:
            raise ValueError(f"{t} copies at transmission {transmission} exceed the signal energy")
        amplitude = signal.amplitude * math.sqrt(transmission)
    share = signal.with_amplitude(amplitude)
    consumed = np.zeros((t, len(signal)), dtype=bool)
    return EveTap(bob_copy=share, copy=share, t=t, consumed=consumed)


def intercept_channel(signal: SignalSequence, channel: ChannelModel) -> EveTap:
    t = channel.copies
    if t < 1:
        raise ValueError(f"transmission {channel.transmission} leaves Eve no whole copy")
    return eve_intercept(signal, t, channel.transmission)

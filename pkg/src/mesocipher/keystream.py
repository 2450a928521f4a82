"""Seed-key expansion and the auxiliary XOR stream.

The generator is a 64-bit Fibonacci LFSR with feedback polynomial
x^64 + x^63 + x^61 + x^60 + 1.  Each step emits the feedback bit
(register bits 63, 62, 60 and 59 XORed), shifts the register left and
feeds the bit in at position 0.  An M-ary symbol is log2(M) consecutive
feedback bits, first-emitted bit most significant.

Seeding XORs the key into the low register bits, where the taps cannot see
it for dozens of steps and where nearby keys stay correlated for thousands.
The first WARM_UP_STEPS feedback bits after seeding are therefore discarded
before the running key starts.

Two expansion paths exist: ``next_symbol`` steps one register at a time
and is the reference, while ``expand_running_key`` and
``symbols_at`` are vectorised over keys and positions for the attack
engines.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

SEED_MASK = 0xA5A5_A5A5_A5A5_A5A5
REGISTER_BITS = 64
_MASK64 = (1 << 64) - 1
WARM_UP_STEPS = 1 << 16
# Emitted stream obeys x_j = x_{j-64} ^ x_{j-63} ^ x_{j-61} ^ x_{j-60}.
_CHUNK = 60


class InvalidKeyLengthError(ValueError):
    pass


class UnsupportedAlphabetError(ValueError):
    pass


@dataclass(frozen=True)
class SeedKey:
    """A k-bit shared secret stored as an integer, bit order MSB-first."""

    k: int
    value: int

    def __post_init__(self):
        if not 1 <= self.k <= 64:
            raise InvalidKeyLengthError(f"seed key length must be in [1, 64], got {self.k}")
        if not 0 <= self.value < (1 << self.k):
            raise ValueError(f"key value {self.value:#x} does not fit in {self.k} bits")

    @classmethod
    def from_bits(cls, bits) -> "SeedKey":
        bits = [int(b) for b in bits]
        value = 0
        for b in bits:
            if b not in (0, 1):
                raise ValueError("key bits must be 0 or 1")
            value = (value << 1) | b
        return cls(len(bits), value)

    @classmethod
    def from_hex(cls, text: str, k: int) -> "SeedKey":
        return cls(k, int(text, 16))

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.value >> (self.k - 1 - i)) & 1 for i in range(self.k))

    def hex(self) -> str:
        return f"{self.value:0{(self.k + 3) // 4}x}"


@dataclass(frozen=True)
class GeneratorState:
    register: int

    def __post_init__(self):
        if not 0 < self.register <= _MASK64:
            raise ValueError("LFSR register must be a nonzero 64-bit value")


@dataclass(frozen=True)
class RunningKey:
    symbols: np.ndarray
    M: int

    def __post_init__(self):
        check_alphabet(self.M)
        if len(self.symbols) and (self.symbols.min() < 0 or self.symbols.max() >= self.M):
            raise ValueError("running-key symbol outside [0, M)")

    def __len__(self):
        return len(self.symbols)


def check_alphabet(M: int) -> int:
    """Return log2(M), raising if M is not a power of two >= 2."""
    if not isinstance(M, (int, np.integer)) or M < 2 or M & (M - 1):
        raise UnsupportedAlphabetError(f"alphabet size must be a power of two >= 2, got {M!r}")
    return int(M).bit_length() - 1


def initial_register(key: SeedKey) -> int:
    reg = key.value ^ SEED_MASK
    # Only k=64, key=0xA5..A5 lands here.
    return reg if reg else 1


def seed_generator(key: SeedKey) -> GeneratorState:
    return GeneratorState(initial_register(key))


def warm_up(state: GeneratorState) -> GeneratorState:
    """Advance a freshly seeded generator past the discarded prefix."""
    return GeneratorState(int(warmed_registers(np.array([state.register], dtype=np.uint64))[0]))


def _step(reg: int) -> tuple[int, int]:
    fb = ((reg >> 63) ^ (reg >> 62) ^ (reg >> 60) ^ (reg >> 59)) & 1
    return fb, ((reg << 1) | fb) & _MASK64


def next_symbol(state: GeneratorState, M: int) -> tuple[int, GeneratorState]:
    width = check_alphabet(M)
    reg = state.register
    symbol = 0
    for _ in range(width):
        fb, reg = _step(reg)
        symbol = (symbol << 1) | fb
    return symbol, GeneratorState(reg)


def _register_history(registers: np.ndarray) -> np.ndarray:
    """Columns 0..63 hold x_{-64}..x_{-1}; bit i of the register is x_{-(i+1)}."""
    shifts = np.arange(REGISTER_BITS - 1, -1, -1, dtype=np.uint64)
    return ((registers[:, None] >> shifts[None, :]) & np.uint64(1)).astype(np.uint8)


def _extend(history: np.ndarray, nbits: int) -> np.ndarray:
    """Run the tap recurrence forward ``nbits`` steps on each row of ``history``.

    Works for uint8 bit rows and for uint64 mask rows alike, since only XOR is used.
    Chunks of 60 are safe because the shortest delay is 60.
    """
    rows = history.shape[0]
    out = np.empty((rows, REGISTER_BITS + nbits), dtype=history.dtype)
    out[:, :REGISTER_BITS] = history
    j = REGISTER_BITS
    end = REGISTER_BITS + nbits
    while j < end:
        m = min(_CHUNK, end - j)
        out[:, j:j + m] = (
            out[:, j - 64:j - 64 + m]
            ^ out[:, j - 63:j - 63 + m]
            ^ out[:, j - 61:j - 61 + m]
            ^ out[:, j - 60:j - 60 + m]
        )
        j += m
    return out[:, REGISTER_BITS:]


def _pack(bits: np.ndarray, width: int) -> np.ndarray:
    """Group rows of feedback bits into MSB-first symbols of ``width`` bits."""
    rows, nbits = bits.shape
    grouped = bits.reshape(rows, nbits // width, width).astype(np.int64)
    weights = 1 << np.arange(width - 1, -1, -1, dtype=np.int64)
    return grouped @ weights


@lru_cache(maxsize=8)
def _tap_masks(nbits: int) -> np.ndarray:
    """mask[j] has bit i set iff output bit x_j depends on seeded register bit i."""
    history = (np.uint64(1) << np.arange(REGISTER_BITS - 1, -1, -1, dtype=np.uint64))[None, :]
    masks = _extend(history, nbits)[0]
    masks.setflags(write=False)
    return masks


def _masks_covering(nbits: int) -> np.ndarray:
    # Round up so the cache is reused across calls.
    return _tap_masks(max(1 << 16, 1 << max(nbits - 1, 1).bit_length()))


def _parity(x: np.ndarray) -> np.ndarray:
    return np.bitwise_count(x) & np.uint8(1)


def registers_for(keys, k: int) -> np.ndarray:
    """Seeded (not yet warmed) registers for integer key values."""
    if not 1 <= k <= 64:
        raise InvalidKeyLengthError(f"seed key length must be in [1, 64], got {k}")
    regs = np.asarray(keys, dtype=np.uint64) ^ np.uint64(SEED_MASK)
    regs[regs == 0] = 1
    return regs


def warmed_registers(registers: np.ndarray) -> np.ndarray:
    """Registers after WARM_UP_STEPS steps: bit i then holds x_{W-1-i}."""
    masks = _masks_covering(WARM_UP_STEPS)[WARM_UP_STEPS - REGISTER_BITS:WARM_UP_STEPS]
    bits = _parity(masks[None, :] & np.asarray(registers, dtype=np.uint64)[:, None])
    weights = np.uint64(1) << np.arange(REGISTER_BITS - 1, -1, -1, dtype=np.uint64)
    return np.bitwise_or.reduce(bits.astype(np.uint64) * weights, axis=1)


def keystream_bits(key: SeedKey, nbits: int) -> np.ndarray:
    reg = warmed_registers(np.array([initial_register(key)], dtype=np.uint64))
    return _extend(_register_history(reg), nbits)[0]


def expand_running_key(key: SeedKey, M: int, n: int) -> RunningKey:
    width = check_alphabet(M)
    if n < 1:
        raise ValueError("running key length must be >= 1")
    bits = keystream_bits(key, n * width)
    return RunningKey(_pack(bits[None, :], width)[0], M)


def expand_many(keys: np.ndarray, k: int, M: int, n: int) -> np.ndarray:
    """Running keys for a batch of integer seed values, shape (len(keys), n)."""
    width = check_alphabet(M)
    regs = warmed_registers(registers_for(keys, k))
    return _pack(_extend(_register_history(regs), n * width), width)


def symbols_at(registers: np.ndarray, positions: np.ndarray, M: int) -> np.ndarray:
    """Running-key symbols at arbitrary positions for a batch of seeded registers.

    ``registers`` has shape (B,), ``positions`` shape (B, L); returns (B, L).
    Uses the linearity of the LFSR over GF(2): each output bit is the parity
    of the seeded register under a fixed mask.
    """
    width = check_alphabet(M)
    positions = np.asarray(positions, dtype=np.int64)
    needed = (int(positions.max()) + 1) * width if positions.size else 0
    masks = _masks_covering(WARM_UP_STEPS + needed)
    regs = np.asarray(registers, dtype=np.uint64)[:, None, None]
    bit_index = WARM_UP_STEPS + positions[..., None] * width + np.arange(width)
    bits = _parity(masks[bit_index] & regs)
    weights = 1 << np.arange(width - 1, -1, -1, dtype=np.int64)
    return bits.astype(np.int64) @ weights


def stream_xor(key2: SeedKey, data) -> np.ndarray:
    """XOR ``data`` bits with the binary keystream of ``key2``; an involution."""
    data = np.asarray(data, dtype=np.uint8)
    if data.size == 0:
        return data.copy()
    return data ^ keystream_bits(key2, data.size).astype(np.uint8)

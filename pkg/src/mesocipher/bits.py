"""MSB-first conversions between bytes, hex strings and bit arrays."""
import numpy as np


def bytes_to_bits(data: bytes) -> np.ndarray:
    return np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8))


def bits_to_bytes(bits) -> bytes:
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size % 8:
        raise ValueError(f"bit count {bits.size} is not a multiple of 8")
    return np.packbits(bits).tobytes()


def hex_to_bits(text: str) -> np.ndarray:
    return bytes_to_bits(bytes.fromhex(text))


def bits_to_hex(bits) -> str:
    return bits_to_bytes(bits).hex()


def as_bits(x) -> np.ndarray:
    bits = np.asarray(x, dtype=np.uint8)
    if bits.ndim != 1:
        raise ValueError("bit sequences must be one-dimensional")
    if bits.size and bits.max() > 1:
        raise ValueError("bit sequences may only contain 0 and 1")
    return bits

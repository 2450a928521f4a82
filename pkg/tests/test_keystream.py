from importlib import resources

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mesocipher.keystream import (
    GeneratorState,
    InvalidKeyLengthError,
    SeedKey,
    UnsupportedAlphabetError,
    expand_many,
    expand_running_key,
    initial_register,
    keystream_bits,
    next_symbol,
    registers_for,
    seed_generator,
    stream_xor,
    symbols_at,
    warm_up,
)

from _reference import lfsr_symbols


def golden_lines():
    text = resources.files("mesocipher.data").joinpath("keystream_golden.txt").read_text()
    for line in text.splitlines():
        if line.strip() and not line.startswith("#"):
            k, key, M, n, hexed = line.split()
            yield int(k), int(key, 16), int(M), int(n), hexed


def decode_golden(M, n, hexed):
    width = max(1, (M.bit_length() - 1 + 3) // 4)
    return [int(hexed[i * width:(i + 1) * width], 16) for i in range(n)]


GOLDEN = list(golden_lines())


@pytest.mark.parametrize("k,key,M,n,hexed", GOLDEN)
def test_golden_vectors_vectorised(k, key, M, n, hexed):
    assert list(expand_running_key(SeedKey(k, key), M, n).symbols) == decode_golden(M, n, hexed)


@pytest.mark.parametrize("k,key,M,n,hexed", GOLDEN)
def test_golden_vectors_stepwise(k, key, M, n, hexed):
    state = warm_up(seed_generator(SeedKey(k, key)))
    out = []
    for _ in range(n):
        s, state = next_symbol(state, M)
        out.append(s)
    assert out == decode_golden(M, n, hexed)


def test_golden_first_example():
    assert list(expand_running_key(SeedKey(8, 0x01), 16, 4).symbols) == [14, 1, 13, 3]


def test_seed_register_examples():
    assert initial_register(SeedKey.from_bits([0])) == 0xA5A5A5A5A5A5A5A5
    assert initial_register(SeedKey(8, 0xA5)) == 0xA5A5A5A5A5A5A500
    assert seed_generator(SeedKey(64, 0xA5A5A5A5A5A5A5A5)).register == 1


def test_next_symbol_hand_step():
    reg = 1 << 63
    sym, state = next_symbol(GeneratorState(reg), 2)
    assert sym == 1
    assert state.register == ((reg << 1) | 1) & ((1 << 64) - 1)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, (1 << 64) - 1))
def test_two_binary_symbols_make_one_quaternary(reg):
    a, s1 = next_symbol(GeneratorState(reg), 2)
    b, s2 = next_symbol(s1, 2)
    c, s3 = next_symbol(GeneratorState(reg), 4)
    assert (a << 1) | b == c
    assert s2 == s3


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 64).flatmap(lambda k: st.tuples(st.just(k), st.integers(0, (1 << k) - 1))),
       st.sampled_from([2, 4, 32, 256]), st.integers(1, 40))
def test_prefix_property(key, M, n):
    seed = SeedKey(*key)
    short = expand_running_key(seed, M, n).symbols
    longer = expand_running_key(seed, M, n + 1).symbols
    assert np.array_equal(short, longer[:n])


@settings(max_examples=10, deadline=None)
@given(st.integers(1, 16).flatmap(lambda k: st.tuples(st.just(k), st.integers(0, (1 << k) - 1))),
       st.sampled_from([2, 8, 32]))
def test_matches_bit_list_oracle(key, M):
    assert list(expand_running_key(SeedKey(*key), M, 24).symbols) == lfsr_symbols(*key, M, 24)


def test_one_bit_difference_decorrelates():
    # The generator is linear, so the symbol-difference pattern depends only
    # on which register bit was flipped, not on the base key.  The 100 pairs
    # therefore carry at most 64 independent patterns; the binomial band is
    # taken over those.
    rng = np.random.default_rng(1)
    M, n, pairs, k = 32, 1000, 100, 64
    by_bit = {}
    for _ in range(pairs):
        key = int(rng.integers(1 << 62)) << 2 | int(rng.integers(4))
        bit = int(rng.integers(k))
        a = expand_running_key(SeedKey(k, key), M, n).symbols
        b = expand_running_key(SeedKey(k, key ^ (1 << bit)), M, n).symbols
        diffs = int(np.count_nonzero(a != b))
        assert by_bit.setdefault(bit, diffs) == diffs
    total = len(by_bit) * n
    p = 1 - 1 / M
    assert abs(sum(by_bit.values()) - total * p) <= 5 * np.sqrt(total * p * (1 - p))


def test_symbol_balance():
    n = 100_000
    s = expand_running_key(SeedKey(12, 0x5A5), 32, n).symbols
    counts = np.bincount(s, minlength=32)
    p = 1 / 32
    assert np.all(np.abs(counts - n * p) <= 5 * np.sqrt(n * p * (1 - p)))


def test_register_does_not_return_within_2_20_steps():
    start = seed_generator(SeedKey(16, 0xBEEF)).register
    bits = keystream_bits(SeedKey(16, 0xBEEF), 1 << 20)
    # A 64-bit window of the emitted stream identifies the register; a repeat of
    # the first window would mean the state came back.
    first = bits[:64]
    view = np.lib.stride_tricks.sliding_window_view(bits, 64)[1:]
    assert not np.any(np.all(view == first, axis=1))
    assert start != 0


def test_expand_many_and_symbols_at_match_scalar_path():
    keys = np.array([0, 1, 77, 4095], dtype=np.uint64)
    many = expand_many(keys, 12, 32, 50)
    for row, key in zip(many, keys):
        assert np.array_equal(row, expand_running_key(SeedKey(12, int(key)), 32, 50).symbols)
    pos = np.array([[0, 7, 49], [3, 3, 10], [1, 2, 3], [40, 0, 5]])
    picked = symbols_at(registers_for(keys, 12), pos, 32)
    assert np.array_equal(picked, np.take_along_axis(many, pos, axis=1))


def test_stream_xor_identity_and_involution():
    key2 = SeedKey(64, 0x0123456789ABCDEF)
    assert np.array_equal(stream_xor(key2, np.zeros(64, np.uint8)), keystream_bits(key2, 64))
    d = np.random.default_rng(3).integers(0, 2, 1024).astype(np.uint8)
    assert np.array_equal(stream_xor(key2, stream_xor(key2, d)), d)
    assert np.array_equal(keystream_bits(key2, 64), expand_running_key(key2, 2, 64).symbols)


def test_stream_xor_different_keys_disagree_half_the_time():
    n = 10_000
    d = np.zeros(n, np.uint8)
    diff = np.count_nonzero(stream_xor(SeedKey(64, 1), d) != stream_xor(SeedKey(64, 2), d))
    assert abs(diff - n / 2) <= 5 * np.sqrt(n / 4)


def test_errors():
    with pytest.raises(InvalidKeyLengthError):
        SeedKey(0, 0)
    with pytest.raises(InvalidKeyLengthError):
        SeedKey(65, 0)
    with pytest.raises(ValueError):
        SeedKey(4, 16)
    for M in (0, 1, 3, 12):
        with pytest.raises(UnsupportedAlphabetError):
            expand_running_key(SeedKey(8, 1), M, 4)
    with pytest.raises(UnsupportedAlphabetError):
        next_symbol(GeneratorState(5), 6)


def test_seed_key_round_trips():
    key = SeedKey.from_bits([1, 0, 1, 1])
    assert key.value == 0b1011 and key.bits == (1, 0, 1, 1)
    assert SeedKey.from_hex(key.hex(), 4) == key

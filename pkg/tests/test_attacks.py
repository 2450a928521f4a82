import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import binom

from mesocipher.attacks import (
    AttackConfig,
    english_score,
    english_scores,
    exhaustive_search,
    grover_estimate,
    grover_success_by_rotation,
    grover_success_prob,
    multi_window_attack,
    pruning_search,
    verify_trial_key,
)
from mesocipher.attacks.english import LETTER_FREQ, SPACE_FREQ, sample_corpus
from mesocipher.attacks.grover import optimal_iterations
from mesocipher.bits import bytes_to_bits
from mesocipher.channel import ResourceExhaustedError, eve_intercept
from mesocipher.cipher import encode
from mesocipher.harness.rng import RngStream
from mesocipher.keystream import SeedKey, stream_xor
from mesocipher.optics import Constellation

from _reference import grover_by_matrix


def make_tap(seed, n, t, received=3.0, message=None, offset=0, salt=0):
    if message is None:
        message = RngStream(salt, "msg", seed.value).bits(n)
    c = Constellation(32, received * math.sqrt(t + 1))
    return eve_intercept(encode(seed, message, c, offset), t), message


def test_hoeffding_numbers():
    pe = 0.5 * math.erfc(3)
    assert pe == pytest.approx(1.1e-5, rel=0.05)
    assert 1 - math.exp(-2 * 128 * (0.25 - pe) ** 2) >= 1 - 2e-7
    assert math.exp(-2 * 128 * 0.25**2) == pytest.approx(1.1e-7, rel=0.05)


def test_verify_accepts_true_key_and_rejects_others():
    cfg = AttackConfig()
    seed = SeedKey(12, 1234)
    tap, ref = make_tap(seed, 128, 200)
    rng = RngStream(0, "eve")
    for c in range(100):
        ok, agree = verify_trial_key(tap, c, seed, ref, cfg, rng)
        assert ok and agree > 0.95
    for c in range(100, 200):
        ok, agree = verify_trial_key(tap, c, SeedKey(12, c), ref, cfg, rng)
        assert not ok and agree < 0.75
    assert tap.grants == 200 * 128
    with pytest.raises(ResourceExhaustedError):
        verify_trial_key(tap, 0, seed, ref, cfg, rng)


def test_vacuum_agreement_is_half():
    cfg = AttackConfig(v=4096)
    seed = SeedKey(12, 77)
    tap, ref = make_tap(seed, 4096, 1)
    tap.copy = tap.copy.with_amplitude(0.0)
    _, agree = verify_trial_key(tap, 0, seed, ref, cfg, RngStream(1))
    assert abs(agree - 0.5) <= 5 * math.sqrt(0.25 / 4096)


def test_engine_agrees_with_verify():
    cfg = AttackConfig()
    seed = SeedKey(12, 9)
    n, t = 256, 16
    tap, ref = make_tap(seed, n, t)
    out = exhaustive_search(tap, ref, 12, cfg, RngStream(3)).judged(seed)
    assert out.success and out.trials_tested == 10
    assert out.copies_consumed == 10 and out.symbols_consumed == 10 * n == tap.grants

    fresh, _ = make_tap(seed, n, t)
    verdicts = [verify_trial_key(fresh, c, SeedKey(12, c), ref, cfg, RngStream(3))[0]
                for c in range(10)]
    assert verdicts == [False] * 9 + [True]


def test_key_outside_tried_range_fails_cleanly():
    seed = SeedKey(12, 4000)
    tap, ref = make_tap(seed, 128, 64)
    out = exhaustive_search(tap, ref, 12, AttackConfig(), RngStream(4)).judged(seed)
    assert not out.success and out.recovered is None
    assert out.trials_tested == 64 and out.copies_consumed == 64
    assert out.symbols_consumed == 64 * 128 == tap.grants


def test_single_window_is_exhaustive():
    seed = SeedKey(10, 321)
    cfg = AttackConfig()
    a, ref = make_tap(seed, 256, 512)
    b, _ = make_tap(seed, 256, 512)
    one = exhaustive_search(a, ref, 10, cfg, RngStream(5))
    two = multi_window_attack([b], [ref], 10, cfg, RngStream(5))
    assert one == two
    assert np.array_equal(a.consumed, b.consumed)


def test_multi_window_covers_rt_keys():
    k, t, r, w = 6, 8, 8, 128
    cfg = AttackConfig()
    for value in (0, 37, 63):
        seed = SeedKey(k, value)
        message = RngStream(6).bits(r * w)
        taps, refs = [], []
        for i in range(r):
            tap, _ = make_tap(seed, w, t, message=message[i * w:(i + 1) * w], offset=i * w)
            taps.append(tap)
            refs.append(message[i * w:(i + 1) * w])
        out = multi_window_attack(taps, refs, k, cfg, RngStream(7)).judged(seed)
        assert out.success
        assert out.trials_tested == value + 1
        assert out.symbols_consumed == sum(tap.grants for tap in taps) == (value + 1) * w


def test_order_does_not_change_success_law():
    k = 8
    rates = {}
    for order in ("ascending", "random"):
        cfg = AttackConfig(order=order)
        wins = 0
        for run in range(200):
            seed = SeedKey(k, RngStream(run, "seed").getrandbits(k))
            tap, ref = make_tap(seed, 128, 1 << k, salt=run)
            wins += bool(exhaustive_search(tap, ref, k, cfg, RngStream(run, "eve")).judged(seed).success)
        rates[order] = wins / 200
    assert abs(rates["ascending"] - rates["random"]) <= 0.05
    assert rates["random"] >= 0.99


def test_random_order_is_a_permutation():
    from mesocipher.attacks.core import trial_values
    vals = trial_values(8, 256, AttackConfig(order="random"), RngStream(9))
    assert sorted(vals.tolist()) == list(range(256))
    assert vals.tolist() != list(range(256))


def test_false_pass_rate_and_symbols_per_wrong_key():
    p = binom.sf(11, 16, 0.5)
    assert p == pytest.approx(0.0384, abs=1e-4)
    seed = SeedKey(12, 4095)
    tap, ref = make_tap(seed, 4096, 64)
    out = pruning_search(tap, ref, 12, AttackConfig(), RngStream(10), max_trials=4000)
    assert not out.judged(seed).success
    per_key = out.symbols_consumed / out.trials_tested
    assert per_key == pytest.approx(16 / (1 - p), abs=0.4)


def test_pruning_recovers_key_with_few_copies():
    for value in (0, 2047, 4095):
        seed = SeedKey(12, value)
        tap, ref = make_tap(seed, 4096, 4096)
        out = pruning_search(tap, ref, 12, AttackConfig(), RngStream(11)).judged(seed)
        assert out.success
        assert out.trials_tested == value + 1
        assert out.copies_consumed <= 20
        assert out.symbols_consumed == tap.grants == int(tap.consumed.sum())


def test_pruning_runs_out_of_copies():
    seed = SeedKey(12, 4095)
    tap, ref = make_tap(seed, 256, 4)
    out = pruning_search(tap, ref, 12, AttackConfig(), RngStream(12)).judged(seed)
    assert not out.success
    assert out.symbols_consumed <= 4 * 256
    assert out.trials_tested < 4096


def test_pruning_with_english_scorer():
    cfg = AttackConfig(scorer="english", b=256, v=512)
    text = (sample_corpus() * 2)[:512]
    message = bytes_to_bits(text)
    seed = SeedKey(10, 700)
    tap, _ = make_tap(seed, message.size, 256, message=message)
    assert pruning_search(tap, None, 10, cfg, RngStream(13)).judged(seed).success

    hidden = stream_xor(SeedKey(64, 0xDEADBEEF12345678), message)
    tap, _ = make_tap(seed, message.size, 256, message=hidden)
    assert not pruning_search(tap, None, 10, cfg, RngStream(13)).judged(seed).success


def test_pruning_rejects_used_tap_and_bad_reference():
    seed = SeedKey(8, 1)
    tap, ref = make_tap(seed, 128, 2)
    with pytest.raises(ValueError):
        pruning_search(tap, ref[:-1], 8, AttackConfig(), RngStream(0))
    tap.consume_symbol(0, 0)
    with pytest.raises(ValueError):
        pruning_search(tap, ref, 8, AttackConfig(), RngStream(0))


@pytest.mark.parametrize("kwargs", [dict(tau=0.5), dict(tau=1.0), dict(b=200), dict(v=0),
                                    dict(scorer="x"), dict(order="x"),
                                    dict(scorer="english", b=12, v=128)])
def test_attack_config_validation(kwargs):
    with pytest.raises(ValueError):
        AttackConfig(**kwargs)


def test_english_scorer_calibration():
    assert english_score(sample_corpus()) >= 0.9
    rng = np.random.default_rng(14)
    rows = rng.integers(0, 256, (20_000, 32), dtype=np.uint8)
    assert np.mean(english_scores(rows) > 0.45) <= 1e-3
    with pytest.raises(ValueError):
        english_score(b"")


def test_all_space_score_is_the_blend():
    norm = math.sqrt(sum(f * f for f in LETTER_FREQ.values()) + SPACE_FREQ**2)
    expected = 0.5 * 1.0 + 0.5 * SPACE_FREQ / norm
    assert english_score(b" " * 40) == pytest.approx(expected, rel=1e-12)
    assert english_score(b" " * 40) == english_score(b" " * 40)


@settings(max_examples=50)
@given(st.binary(min_size=1, max_size=200))
def test_english_score_in_unit_interval(data):
    s = english_score(data)
    assert 0 <= s <= 1 + 1e-12
    assert s == pytest.approx(float(english_scores(np.frombuffer(data, np.uint8))[0]))


@pytest.mark.parametrize("N", [2, 4, 16, 1 << 10, 1 << 16])
def test_grover_closed_form_matches_rotation(N):
    for j in range(2 * optimal_iterations(N) + 1):
        assert abs(grover_success_prob(N, j) - grover_success_by_rotation(N, j)) <= 1e-12


@pytest.mark.parametrize("N,j", [(2, 1), (4, 1), (8, 2), (16, 3), (16, 5), (64, 6)])
def test_grover_matches_explicit_vector(N, j):
    assert grover_success_prob(N, j) == pytest.approx(grover_by_matrix(N, j), abs=1e-12)


def test_grover_examples():
    est = grover_estimate(4, 0.3)
    assert est.N == 16 and est.iterations == 3
    assert est.success_prob == pytest.approx(0.9613, abs=1e-4)
    assert math.asin(0.25) == pytest.approx(0.25268, abs=1e-5)
    one = grover_estimate(1, 0.5)
    assert one.iterations == 1 and one.success_prob == pytest.approx(0.5, abs=1e-15)
    assert grover_success_prob(4, 1) == pytest.approx(1.0, abs=1e-15)
    for N in (2, 16, 1000):
        assert grover_success_prob(N, 0) == pytest.approx(1 / N, rel=1e-12)
    assert grover_estimate(12, 0.5).feasible
    assert not grover_estimate(12, 0.51).feasible
    assert not grover_estimate(12, math.nextafter(0.5, 1)).feasible


def test_grover_rises_to_optimum():
    N = 1 << 10
    p = [grover_success_prob(N, j) for j in range(optimal_iterations(N) + 1)]
    assert all(b > a for a, b in zip(p, p[1:]))
    assert optimal_iterations(N) == math.floor(math.pi * math.sqrt(N) / 4)

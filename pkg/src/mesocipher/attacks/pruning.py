"""Sequential trial-key pruning inside one copy.

Eve walks through her copies as one long run of symbols.  Each trial seed
gets b symbols; if the decoded prefix scores badly she moves on to the next
seed at the very next unmeasured symbol.  A seed that keeps passing is
extended b symbols at a time, re-scored over everything it has decoded, and
accepted once it has survived v symbols.

Most trial seeds die in their first stage, so the engine screens a batch of
first stages at once and only walks through the first survivor one stage
at a time.  Batching changes nothing observable: noise is addressed by
(copy, symbol), not drawn in sequence.
"""
from __future__ import annotations

import numpy as np

from ..channel import EveTap
from ..harness.rng import RngStream
from ..keystream import SeedKey, registers_for
from .core import AttackConfig, AttackOutcome, decode_under, trial_values
from .english import english_scores


def _scores(cfg: AttackConfig, decoded: np.ndarray, expected: np.ndarray | None) -> np.ndarray:
    """Pass/fail for each row of decoded bits."""
    if cfg.scorer == "known-plaintext":
        return (decoded == expected).mean(axis=1) >= cfg.tau
    rows = np.packbits(decoded, axis=1)
    return english_scores(rows, cfg.english_weight) >= cfg.english_threshold


def pruning_search(tap: EveTap, reference, k: int, cfg: AttackConfig, rng: RngStream,
                   max_trials: int | None = None) -> AttackOutcome:
    """Run the pruning attack on a fresh tap.

    ``reference`` is the known plaintext for the known-plaintext scorer and
    is ignored (may be None) for the english scorer.
    """
    if tap.grants:
        raise ValueError("tap must be fresh")
    if cfg.scorer == "known-plaintext":
        if reference is None or len(reference) != tap.n:
            raise ValueError("known-plaintext pruning needs a reference of the signal's length")
        reference = np.asarray(reference, dtype=np.uint8)
    elif tap.n % 8:
        raise ValueError("the english scorer needs a whole number of bytes per copy")

    n = tap.n
    capacity = tap.t * n
    stream = rng.spawn(0)
    order = trial_values(k, (1 << k) if max_trials is None else max_trials, cfg, rng)
    first = min(cfg.b, cfg.v)
    cursor = 0
    tested = 0

    def spans(start, count, width):
        lin = start + np.arange(count)[:, None] * width + np.arange(width)[None, :]
        return lin // n, lin % n

    def consume(start, length):
        copies, pos = spans(start, 1, length)
        tap.consume_block(copies[0], pos[0])

    def decode(trials, copies, pos):
        return decode_under(tap, stream, registers_for(trials, k), copies, pos)

    def expected(pos):
        return None if reference is None else reference[pos]

    while tested < order.size:
        room = (capacity - cursor) // first
        count = min(cfg.batch, order.size - tested, room)
        if count <= 0:
            break
        trials = order[tested:tested + count]
        copies, pos = spans(cursor, count, first)
        passed = np.flatnonzero(_scores(cfg, decode(trials, copies, pos), expected(pos)))
        skip = count if passed.size == 0 else int(passed[0])
        if skip:
            consume(cursor, skip * first)
            cursor += skip * first
            tested += skip
        if passed.size == 0:
            continue

        # Walk the surviving trial stage by stage.
        trial = order[tested:tested + 1]
        tested += 1
        addr_c, addr_p = [], []
        used = 0
        while used < cfg.v:
            length = min(cfg.b, cfg.v - used)
            if cursor + length > capacity:
                return _outcome(tap, None, tested)
            c, p = spans(cursor, 1, length)
            consume(cursor, length)
            cursor += length
            used += length
            addr_c.append(c)
            addr_p.append(p)
            got = decode(trial, np.hstack(addr_c), np.hstack(addr_p))
            if not _scores(cfg, got, expected(np.hstack(addr_p)))[0]:
                break
        else:
            return _outcome(tap, SeedKey(k, int(trial[0])), tested)
    return _outcome(tap, None, tested)


def _outcome(tap: EveTap, recovered, tested) -> AttackOutcome:
    copies = int(np.count_nonzero(tap.consumed.any(axis=1)))
    return AttackOutcome(recovered, tested, copies, tap.grants)

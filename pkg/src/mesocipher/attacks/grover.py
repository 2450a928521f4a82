"""Success-probability bookkeeping for a quantum key search over 2^k seeds."""
from __future__ import annotations

import math
from dataclasses import dataclass

# Eve keeps a copy as good as Bob's once the channel passes at most half the light.
GROVER_MAX_TRANSMISSION = 0.5


@dataclass(frozen=True)
class GroverEstimate:
    N: int
    iterations: int
    success_prob: float
    feasible: bool


def _angle(N: int) -> float:
    if N < 2:
        raise ValueError(f"search space must hold at least 2 items, got {N}")
    return math.asin(1 / math.sqrt(N))


def grover_success_prob(N: int, j: int) -> float:
    if j < 0:
        raise ValueError("iteration count must be >= 0")
    return math.sin((2 * j + 1) * _angle(N)) ** 2


def grover_success_by_rotation(N: int, j: int) -> float:
    """Same quantity by iterating the two-amplitude picture.

    The state is tracked as (marked, unmarked) amplitudes; each iteration
    flips the marked sign and reflects about the uniform superposition.
    """
    if j < 0:
        raise ValueError("iteration count must be >= 0")
    s_marked, s_rest = 1 / math.sqrt(N), math.sqrt((N - 1) / N)
    marked, rest = s_marked, s_rest
    for _ in range(j):
        marked = -marked
        proj = marked * s_marked + rest * s_rest
        marked, rest = 2 * proj * s_marked - marked, 2 * proj * s_rest - rest
    return marked * marked


def optimal_iterations(N: int) -> int:
    # Guard against asin rounding just under an exact quarter turn (N = 2).
    return math.floor(math.pi / (4 * _angle(N)) + 1e-12)


def grover_estimate(k: int, transmission: float) -> GroverEstimate:
    if not 1 <= k <= 64:
        raise ValueError(f"seed key length must be in [1, 64], got {k}")
    if not 0 < transmission <= 1:
        raise ValueError(f"transmission must be in (0, 1], got {transmission}")
    N = 1 << k
    j = optimal_iterations(N)
    return GroverEstimate(N, j, grover_success_prob(N, j), transmission <= GROVER_MAX_TRANSMISSION)

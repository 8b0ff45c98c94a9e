"""Gray-code Sobol sequence for dimensions 1..50.

Direction numbers come from the packaged Joe-Kuo table
(``data/joe-kuo-d50.txt``, one record per dimension: polynomial degree,
coefficient mask, initial direction integers).  Dimension 1 is the base-2
van der Corput sequence.  Points are emitted in Gray-code order with the
origin as point 0, which is the convention of most production generators.
"""

from __future__ import annotations

import functools
from importlib import resources

import numpy as np

__all__ = ["MAX_DIMENSION", "sobol_points"]

MAX_DIMENSION = 50

# 32 direction integers per dimension: supports point indices below 2^31,
# since index k consumes direction number bit_length(k)+1 at most.
_BITS = 32
_MAX_INDEX = 1 << 31


def _parse_table(text: str) -> list[tuple[int, int, list[int]]]:
    records = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [int(tok) for tok in line.split()]
        dim, s, a, m = parts[0], parts[1], parts[2], parts[3:]
        if len(m) != s:
            raise ValueError(f"malformed direction-number record for dimension {dim}")
        records.append((s, a, m))
    return records


@functools.lru_cache(maxsize=1)
def _direction_numbers() -> np.ndarray:
    """Direction integers V[dim, i] = m_i * 2^(_BITS - i), shape (50, _BITS)."""
    text = resources.files("cubecover.data").joinpath("joe-kuo-d50.txt").read_text()
    records = _parse_table(text)
    if len(records) != MAX_DIMENSION - 1:
        raise ValueError(f"expected {MAX_DIMENSION - 1} records, got {len(records)}")

    table = np.zeros((MAX_DIMENSION, _BITS), dtype=np.uint64)
    table[0] = [1 << (_BITS - i) for i in range(1, _BITS + 1)]  # van der Corput
    for row, (s, a, minit) in enumerate(records, start=1):
        m = [0] + list(minit)  # 1-based
        for i in range(s + 1, _BITS + 1):
            val = m[i - s] ^ (m[i - s] << s)
            for k in range(1, s):
                if (a >> (s - 1 - k)) & 1:
                    val ^= m[i - k] << k
            m.append(val)
        table[row] = [m[i] << (_BITS - i) for i in range(1, _BITS + 1)]
    return table


def _lowest_zero_bit(k: int) -> int:
    """0-based position of the lowest zero bit of k."""
    return (~k & (k + 1)).bit_length() - 1


def sobol_points(d: int, n: int, skip: int = 0) -> np.ndarray:
    """First ``n`` Sobol points in [0,1)^d after skipping ``skip`` of them.

    Deterministic: no randomization or scrambling.  Raises for d > 50 (the
    direction-number table bound) and for indices at or beyond 2^31.
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if d > MAX_DIMENSION:
        raise ValueError(f"unsupported dimension {d}: direction-number table covers d <= {MAX_DIMENSION}")
    if n < 1:
        raise ValueError(f"need n >= 1 points, got {n}")
    if skip < 0:
        raise ValueError(f"skip must be >= 0, got {skip}")
    if n + skip > _MAX_INDEX:
        raise ValueError(f"n + skip must be <= 2^31, got {n + skip}")

    V = _direction_numbers()[:d]
    out = np.empty((n, d), dtype=np.uint64)

    # Fast-forward: the point at rank k is the XOR of V_j over the set bits
    # of gray(k) = k ^ (k >> 1); continue with the one-flip recurrence.
    state = np.zeros(d, dtype=np.uint64)
    gray = skip ^ (skip >> 1)
    bit = 0
    while gray:
        if gray & 1:
            state ^= V[:, bit]
        gray >>= 1
        bit += 1
    out[0] = state
    for i in range(1, n):
        state = state ^ V[:, _lowest_zero_bit(skip + i - 1)]
        out[i] = state
    return out.astype(np.float64) / float(1 << _BITS)

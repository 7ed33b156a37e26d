"""Pure backend: numpy-vectorized counter-based bit generator.

The generator is three rounds of the splitmix64 finalizer:

    h = mix(mix(mix(seed) ^ sample) ^ position),  bit = h & 1

All arithmetic is mod 2**64, which numpy's uint64 wraparound gives us
directly.  Sample indices are processed in chunks to bound memory.
"""

from __future__ import annotations

import numpy as np

BACKEND = "pure"

_MASK = (1 << 64) - 1
_C1 = 0x9E3779B97F4A7C15
_C2 = 0xBF58476D1CE4E5B9
_C3 = 0x94D049BB133111EB

_CHUNK = 1 << 14


def _mix_int(z: int) -> int:
    z = (z + _C1) & _MASK
    z = ((z ^ (z >> 30)) * _C2) & _MASK
    z = ((z ^ (z >> 27)) * _C3) & _MASK
    return z ^ (z >> 31)


def bit_at(seed: int, sample: int, position: int) -> int:
    h = _mix_int(_mix_int(_mix_int(seed & _MASK) ^ sample) ^ position)
    return h & 1


def _mix_arr(z):
    with np.errstate(over="ignore"):
        z = z + np.uint64(_C1)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_C2)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_C3)
        return z ^ (z >> np.uint64(31))


def _chunk_bits(seed: int, lo: int, hi: int, positions: np.ndarray) -> np.ndarray:
    """Bit matrix for samples [lo, hi): shape (hi-lo, len(positions)), uint8."""
    s0 = _mix_int(seed & _MASK)
    samples = np.arange(lo, hi, dtype=np.uint64)
    inner = _mix_arr(np.uint64(s0) ^ samples)
    pos = positions.astype(np.uint64)
    h = _mix_arr(inner[:, None] ^ pos[None, :])
    return (h & np.uint64(1)).astype(np.uint8)


def bit_matrix(seed: int, n_samples: int, positions) -> np.ndarray:
    positions = np.asarray(positions, dtype=np.int64)
    out = np.empty((n_samples, len(positions)), dtype=np.uint8)
    for lo in range(0, n_samples, _CHUNK):
        hi = min(lo + _CHUNK, n_samples)
        out[lo:hi] = _chunk_bits(seed, lo, hi, positions)
    return out


def count_follow_hits(seed, n_samples, positions, starts, member_pos, member_want):
    """Count samples whose bit pattern matches at least one block.

    positions: sorted distinct bit positions actually sampled.
    starts: block b covers member slots starts[b]..starts[b+1].
    member_pos[slot]: column index into positions; member_want[slot]: 0/1.
    A sample hits when some block has every slot bit equal to its want.
    """
    positions = np.asarray(positions, dtype=np.int64)
    starts = np.asarray(starts, dtype=np.int64)
    member_pos = np.asarray(member_pos, dtype=np.int64)
    member_want = np.asarray(member_want, dtype=np.uint8)
    n_blocks = len(starts) - 1
    hits = 0
    for lo in range(0, n_samples, _CHUNK):
        hi = min(lo + _CHUNK, n_samples)
        bits = _chunk_bits(seed, lo, hi, positions)
        any_match = np.zeros(hi - lo, dtype=bool)
        for b in range(n_blocks):
            ok = np.ones(hi - lo, dtype=bool)
            for slot in range(starts[b], starts[b + 1]):
                ok &= bits[:, member_pos[slot]] == member_want[slot]
            any_match |= ok
        hits += int(any_match.sum())
    return hits

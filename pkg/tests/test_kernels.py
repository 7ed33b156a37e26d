"""Counter-based bit kernels: reference oracle, backend parity, overrides."""

from __future__ import annotations

import os
import subprocess
import sys

import numpy as np
import pytest

from rulekit import kernels
from rulekit.kernels import load_backend

_MASK = (1 << 64) - 1


def _mix(z: int) -> int:
    """splitmix64 finalizer, restated here as an independent oracle."""
    z = (z + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _ref_bit(seed: int, sample: int, position: int) -> int:
    return _mix(_mix(_mix(seed & _MASK) ^ sample) ^ position) & 1


GOLDEN_BITS = {
    (0, 0, 0): 1,
    (0, 0, 1): 0,
    (0, 1, 0): 0,
    (1, 0, 0): 1,
    (7, 3, 11): 1,
    (42, 1000, 63): 1,
    (1 << 63, 5, 2): 1,
    (12345, 67890, 4095): 1,
}

GOLDEN_ROW_SEED9_POS5 = [
    1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 1, 1, 0, 1, 0, 0,
    0, 1, 1, 1, 0, 0, 0, 1, 1, 0, 0, 1, 0, 0, 1, 0,
]


def _backends():
    return [load_backend("pure"), load_backend("compiled")]


def test_backend_names():
    pure = load_backend("pure")
    compiled = load_backend("compiled")
    assert pure.BACKEND == "pure"
    assert compiled.BACKEND == "compiled"
    assert kernels.BACKEND in ("pure", "compiled")
    with pytest.raises(ValueError):
        load_backend("nope")


def test_bit_at_matches_golden_values():
    for backend in _backends():
        for triple, want in GOLDEN_BITS.items():
            assert backend.bit_at(*triple) == want, (backend.BACKEND, triple)


def test_bit_at_matches_reference_oracle():
    for backend in _backends():
        for seed in (0, 1, 99):
            for sample in (0, 1, 2, 1000):
                for position in (0, 1, 31, 64, 4096):
                    assert backend.bit_at(seed, sample, position) == _ref_bit(
                        seed, sample, position
                    )


def test_bit_matrix_matches_golden_row():
    for backend in _backends():
        got = backend.bit_matrix(9, 32, [5])
        assert got.shape == (32, 1)
        assert got.dtype == np.uint8
        assert [int(b) for b in got[:, 0]] == GOLDEN_ROW_SEED9_POS5


def test_bit_matrix_agrees_with_bit_at_across_chunk_boundary():
    n = (1 << 14) + 37
    positions = [3, 100, 4095]
    for backend in _backends():
        mat = backend.bit_matrix(21, n, positions)
        assert mat.shape == (n, 3)
        for s in ((1 << 14) - 1, 1 << 14, (1 << 14) + 1, 0, n - 1):
            for c, p in enumerate(positions):
                assert mat[s, c] == _ref_bit(21, s, p)


def test_backends_are_bit_identical():
    pure, compiled = _backends()
    positions = list(range(0, 200, 7))
    a = pure.bit_matrix(1234, 5000, positions)
    b = compiled.bit_matrix(1234, 5000, positions)
    assert np.array_equal(a, b)


def test_count_follow_hits_matches_reference():
    positions = [2, 5, 9, 14]
    starts = [0, 2, 4]
    member_pos = [0, 1, 2, 3]
    member_want = [1, 0, 1, 1]
    n = 700
    expected = 0
    for s in range(n):
        row = [_ref_bit(31, s, p) for p in positions]
        hit = False
        for b in range(len(starts) - 1):
            if all(
                row[member_pos[i]] == member_want[i]
                for i in range(starts[b], starts[b + 1])
            ):
                hit = True
                break
        if hit:
            expected += 1
    for backend in _backends():
        got = backend.count_follow_hits(
            31, n, positions, starts, member_pos, member_want
        )
        assert got == expected


def test_count_follow_hits_edge_blocks():
    for backend in _backends():
        assert backend.count_follow_hits(5, 100, [0], [0], [], []) == 0
        # a block with no members matches vacuously
        assert backend.count_follow_hits(5, 100, [0], [0, 0], [], []) == 100


def test_count_follow_hits_spans_chunks():
    n = (1 << 14) + 11
    positions = [1, 6]
    args = (77, n, positions, [0, 2], [0, 1], [1, 1])
    pure, compiled = _backends()
    got = pure.count_follow_hits(*args)
    assert got == compiled.count_follow_hits(*args)
    expected = sum(
        1
        for s in range(n)
        if _ref_bit(77, s, 1) == 1 and _ref_bit(77, s, 6) == 1
    )
    assert got == expected


def test_bits_are_roughly_balanced():
    mat = kernels.bit_matrix(0, 4096, list(range(8)))
    mean = float(mat.mean())
    assert 0.45 < mean < 0.55


def _backend_in_subprocess(value: str | None) -> str:
    env = dict(os.environ)
    if value is None:
        env.pop("RULEKIT_BACKEND", None)
    else:
        env["RULEKIT_BACKEND"] = value
    out = subprocess.run(
        [sys.executable, "-c", "import rulekit.kernels as k; print(k.BACKEND)"],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    return out.stdout.strip()


def test_backend_env_override():
    assert _backend_in_subprocess("pure") == "pure"
    assert _backend_in_subprocess("compiled") == "compiled"
    assert _backend_in_subprocess(None) in ("pure", "compiled")
    assert _backend_in_subprocess("unrecognized") in ("pure", "compiled")

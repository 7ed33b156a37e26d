"""Benchmark the compiled kernels against the pure-numpy fallback.

Run as a script:

    python benchmarks/bench_kernels.py [--samples 200000] [--blocks 64]

Both backends are loaded explicitly (ignoring RULEKIT_BACKEND), checked
for agreement on the workload, then timed.  The workload mirrors what
mc_follow_estimate does: fill a sample x position bit matrix, and count
samples hitting at least one block of a rule.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from rulekit.kernels import load_backend


def _workload(n_blocks: int, width: int = 2, spread: int = 7):
    positions = []
    starts = [0]
    member_pos = []
    member_want = []
    for i in range(n_blocks):
        base = spread * i + 1
        block = [base + 2 * t for t in range(width)]
        positions.extend(block)
        for t, p in enumerate(block):
            member_pos.append(len(member_pos))
            member_want.append(1 if t == 0 else 0)
        starts.append(len(member_pos))
    return positions, starts, member_pos, member_want


def _time(fn, repeats: int = 3) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=200_000)
    parser.add_argument("--blocks", type=int, default=64)
    parser.add_argument("--seed", type=int, default=2024)
    args = parser.parse_args()

    backends = {}
    for name in ("pure", "compiled"):
        try:
            backends[name] = load_backend(name)
        except ImportError as exc:
            print(f"{name}: unavailable ({exc})")
    if len(backends) < 2:
        print("only one backend available; nothing to compare")

    positions, starts, member_pos, member_want = _workload(args.blocks)
    matrix_positions = positions[: min(len(positions), 64)]

    results = {}
    for name, mod in backends.items():
        hits = mod.count_follow_hits(
            args.seed, args.samples, positions, starts, member_pos, member_want
        )
        matrix = mod.bit_matrix(args.seed, 4096, matrix_positions)
        results[name] = (hits, np.asarray(matrix).sum())
    agreed = len(set(results.values())) == 1
    print(f"agreement across backends: {agreed} {results}")
    if not agreed:
        raise SystemExit("backends disagree; benchmark aborted")

    print(f"\nworkload: {args.samples} samples, {args.blocks} blocks, seed {args.seed}")
    print(f"{'backend':>10s} {'count_follow_hits':>18s} {'bit_matrix(4096)':>17s}")
    timings = {}
    for name, mod in backends.items():
        t_count = _time(
            lambda m=mod: m.count_follow_hits(
                args.seed, args.samples, positions, starts, member_pos, member_want
            )
        )
        t_matrix = _time(lambda m=mod: m.bit_matrix(args.seed, 4096, matrix_positions))
        timings[name] = (t_count, t_matrix)
        print(f"{name:>10s} {t_count * 1000:>15.1f} ms {t_matrix * 1000:>14.1f} ms")
    if "pure" in timings and "compiled" in timings:
        ratio = timings["pure"][0] / timings["compiled"][0]
        print(f"\ncompiled speedup on count_follow_hits: {ratio:.1f}x")


if __name__ == "__main__":
    main()

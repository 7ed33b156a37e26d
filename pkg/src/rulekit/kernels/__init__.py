"""Hot-loop kernels with a compiled core and a pure fallback.

The Monte-Carlo sampler draws millions of pseudo-random bits from a
counter-based generator; that inner loop lives here.  At import time we
prefer the Cython extension (_speedups) and fall back to the numpy
implementation (_fallback).  Set RULEKIT_BACKEND=pure to force the
fallback, RULEKIT_BACKEND=compiled to insist on the extension.

Both backends implement the same three functions and are bit-for-bit
identical:

    bit_at(seed, sample, position) -> 0 or 1
    bit_matrix(seed, n_samples, positions) -> uint8 array (n_samples, len(positions))
    count_follow_hits(seed, n_samples, positions, starts, member_pos, member_want) -> int
"""

from __future__ import annotations

import os


def load_backend(name: str):
    """Import a backend module by name ('compiled' or 'pure')."""
    if name == "compiled":
        from . import _speedups

        return _speedups
    if name == "pure":
        from . import _fallback

        return _fallback
    raise ValueError(f"unknown backend {name!r}")


def _select():
    forced = os.environ.get("RULEKIT_BACKEND", "").strip().lower()
    if forced in ("pure", "fallback"):
        return load_backend("pure")
    if forced in ("compiled", "speedups"):
        return load_backend("compiled")
    try:
        return load_backend("compiled")
    except ImportError:
        return load_backend("pure")


_impl = _select()

BACKEND: str = _impl.BACKEND
bit_at = _impl.bit_at
bit_matrix = _impl.bit_matrix
count_follow_hits = _impl.count_follow_hits

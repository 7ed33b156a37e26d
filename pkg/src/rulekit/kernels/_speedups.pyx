# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled backend: counter-based bit generator, scalar C loops.

Must stay bit-for-bit identical to _fallback; the parity tests enumerate
both over shared inputs.
"""

from libc.stdlib cimport free, malloc

import numpy as np

BACKEND = "compiled"

ctypedef unsigned long long u64

cdef u64 C1 = 0x9E3779B97F4A7C15ULL
cdef u64 C2 = 0xBF58476D1CE4E5B9ULL
cdef u64 C3 = 0x94D049BB133111EBULL


cdef inline u64 _mix(u64 z) noexcept nogil:
    z = z + C1
    z = (z ^ (z >> 30)) * C2
    z = (z ^ (z >> 27)) * C3
    return z ^ (z >> 31)


def bit_at(seed, sample, position):
    cdef u64 h = _mix(_mix(_mix(<u64> (seed & 0xFFFFFFFFFFFFFFFF)) ^ <u64> sample) ^ <u64> position)
    return int(h & 1)


def bit_matrix(seed, n_samples, positions):
    pos_arr = np.ascontiguousarray(positions, dtype=np.int64)
    cdef long long[::1] pos = pos_arr
    cdef Py_ssize_t n_pos = pos.shape[0]
    cdef Py_ssize_t n = n_samples
    out = np.empty((n, n_pos), dtype=np.uint8)
    cdef unsigned char[:, ::1] o = out
    cdef u64 s0 = _mix(<u64> (seed & 0xFFFFFFFFFFFFFFFF))
    cdef u64 inner
    cdef Py_ssize_t s, t
    with nogil:
        for s in range(n):
            inner = _mix(s0 ^ <u64> s)
            for t in range(n_pos):
                o[s, t] = <unsigned char> (_mix(inner ^ <u64> pos[t]) & 1)
    return out


def count_follow_hits(seed, n_samples, positions, starts, member_pos, member_want):
    pos_arr = np.ascontiguousarray(positions, dtype=np.int64)
    starts_arr = np.ascontiguousarray(starts, dtype=np.int64)
    mpos_arr = np.ascontiguousarray(member_pos, dtype=np.int64)
    mwant_arr = np.ascontiguousarray(member_want, dtype=np.uint8)
    cdef long long[::1] pos = pos_arr
    cdef long long[::1] st = starts_arr
    cdef long long[::1] mpos = mpos_arr
    cdef unsigned char[::1] mwant = mwant_arr
    cdef Py_ssize_t n_pos = pos.shape[0]
    cdef Py_ssize_t n_blocks = st.shape[0] - 1
    cdef Py_ssize_t n = n_samples
    cdef u64 s0 = _mix(<u64> (seed & 0xFFFFFFFFFFFFFFFF))
    cdef u64 inner
    cdef Py_ssize_t s, t, b, slot
    cdef long long hits = 0
    cdef int ok, matched
    cdef unsigned char * bits = <unsigned char *> malloc(n_pos if n_pos > 0 else 1)
    if bits == NULL:
        raise MemoryError()
    try:
        with nogil:
            for s in range(n):
                inner = _mix(s0 ^ <u64> s)
                for t in range(n_pos):
                    bits[t] = <unsigned char> (_mix(inner ^ <u64> pos[t]) & 1)
                matched = 0
                for b in range(n_blocks):
                    ok = 1
                    for slot in range(st[b], st[b + 1]):
                        if bits[mpos[slot]] != mwant[slot]:
                            ok = 0
                            break
                    if ok:
                        matched = 1
                        break
                if matched:
                    hits += 1
    finally:
        free(bits)
    return int(hits)

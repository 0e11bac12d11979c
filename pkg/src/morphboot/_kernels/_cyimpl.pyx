# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled transducer kernels.

Bit-for-bit mirror of ``_pyimpl``: same splitmix64 stream, same traversal
order, same results. Only the inner loops are statically typed.
"""

from libc.stdint cimport int32_t, int64_t, uint8_t, uint64_t

import numpy as np

BACKEND = "cython"

_M64 = (1 << 64) - 1


cdef inline uint64_t _rng_step(uint64_t* state) noexcept nogil:
    state[0] = state[0] + <uint64_t>0x9E3779B97F4A7C15
    cdef uint64_t z = state[0]
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    z = z ^ (z >> 31)
    return z


def rng_next(state):
    """Advance a splitmix64 state; returns (new_state, 64-bit draw)."""
    cdef uint64_t s = <uint64_t>(state & _M64)
    cdef uint64_t z = _rng_step(&s)
    return s, z


def stream_state(seed, index):
    """Derive the RNG state for one independent sample stream."""
    cdef uint64_t s = (
        (<uint64_t>(seed & _M64)) * <uint64_t>0x9E3779B97F4A7C15
        + (<uint64_t>(index & _M64)) * <uint64_t>0xBF58476D1CE4E5B9
        + <uint64_t>0x94D049BB133111EB
    )
    _rng_step(&s)
    return s


def prepare_csr(arc_off, arc_in, arc_out, arc_dst, final_mask):
    """Convert CSR arrays to this backend's preferred containers."""
    return (
        np.ascontiguousarray(arc_off, dtype=np.int32),
        np.ascontiguousarray(arc_in, dtype=np.int32),
        np.ascontiguousarray(arc_out, dtype=np.int32),
        np.ascontiguousarray(arc_dst, dtype=np.int32),
        np.ascontiguousarray(final_mask, dtype=np.uint8),
    )


def apply_string(arc_off, arc_in, arc_out, arc_dst, final_mask, start, input_ids, match_output):
    """All emitted label sequences for accepting walks consuming ``input_ids``.

    See ``_pyimpl.apply_string`` for the algorithm; this version types the
    product-graph bookkeeping.
    """
    cdef const int32_t[::1] off = arc_off
    cdef const int32_t[::1] ain = arc_in
    cdef const int32_t[::1] aout = arc_out
    cdef const int32_t[::1] adst = arc_dst
    cdef const uint8_t[::1] fin = final_mask

    cdef int n = len(input_ids)
    cdef int64_t width = n + 1
    cdef int64_t root = (<int64_t>start) * width
    cdef bint match_out = bool(match_output)

    cdef int32_t[::1] sym
    if n:
        sym = np.asarray(input_ids, dtype=np.int32)
    else:
        sym = np.empty(0, dtype=np.int32)

    memo = {}
    edges = {}
    grey = set()
    stack = [(root, False)]

    cdef int64_t node, child
    cdef int state, pos, a, lab, emit
    cdef bint ready
    while stack:
        node, ready = stack.pop()
        if ready:
            state = <int>(node // width)
            pos = <int>(node % width)
            acc = set()
            if pos == n and fin[state]:
                acc.add(())
            for emit_obj, child_obj in edges.pop(node):
                suffixes = memo[child_obj]
                emit = emit_obj
                if emit == 0:
                    acc.update(suffixes)
                else:
                    for t in suffixes:
                        acc.add((emit,) + t)
            memo[node] = acc
            grey.discard(node)
        else:
            if node in memo:
                continue
            if node in grey:
                raise ValueError("epsilon cycle encountered during application")
            grey.add(node)
            state = <int>(node // width)
            pos = <int>(node % width)
            outs = []
            for a in range(off[state], off[state + 1]):
                if match_out:
                    lab = aout[a]
                    emit = ain[a]
                else:
                    lab = ain[a]
                    emit = aout[a]
                if lab == 0:
                    outs.append((emit, (<int64_t>adst[a]) * width + pos))
                elif pos < n and lab == sym[pos]:
                    outs.append((emit, (<int64_t>adst[a]) * width + pos + 1))
            edges[node] = outs
            stack.append((node, True))
            for _, child_obj in outs:
                if child_obj not in memo:
                    stack.append((child_obj, False))
    return sorted(memo[root])


def random_walk(arc_off, arc_in, arc_out, arc_dst, final_mask, start, rng_state, max_len, max_retries):
    """One accepting path sampled by per-arc uniform choice.

    Mirrors ``_pyimpl.random_walk``: same stream consumption, same retry
    semantics. Returns (input_ids, output_ids, rng_state) or None.
    """
    cdef const int32_t[::1] off = arc_off
    cdef const int32_t[::1] ain = arc_in
    cdef const int32_t[::1] aout = arc_out
    cdef const int32_t[::1] adst = arc_dst
    cdef const uint8_t[::1] fin = final_mask

    cdef uint64_t rs = <uint64_t>(rng_state & _M64)
    cdef int attempt, state, lo, k, n_opts, a, steps
    cdef int c_start = start
    cdef int c_max_len = max_len
    cdef int c_retries = max_retries
    cdef uint64_t draw
    cdef int64_t choice

    for attempt in range(c_retries):
        state = c_start
        ins = []
        outs = []
        steps = 0
        while True:
            lo = off[state]
            k = off[state + 1] - lo
            n_opts = k + (1 if fin[state] else 0)
            if n_opts == 0:
                break
            draw = _rng_step(&rs)
            choice = <int64_t>(draw % <uint64_t>n_opts)
            if choice == k:
                return ins, outs, rs
            a = lo + <int>choice
            if ain[a]:
                ins.append(ain[a])
            if aout[a]:
                outs.append(aout[a])
            state = adst[a]
            steps += 1
            if steps > c_max_len:
                break
    return None

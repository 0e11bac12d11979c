"""Pure-Python transducer kernels.

Reference implementation of the two hot loops (string application and
seeded random walks) shared with the compiled backend in ``_cyimpl.pyx``.
Both backends must produce bit-identical results: the random number
generator is a hand-rolled splitmix64 so the stream does not depend on
which backend happens to be importable.

Transducers arrive here in CSR form: ``arc_off[s]:arc_off[s+1]`` indexes
the arc arrays for state ``s``; symbol id 0 is epsilon.
"""

BACKEND = "python"

_M64 = (1 << 64) - 1


def prepare_csr(arc_off, arc_in, arc_out, arc_dst, final_mask):
    """Convert CSR arrays to this backend's preferred containers.

    Plain lists: indexing them is faster than boxing numpy scalars in the
    interpreter loop.
    """
    return (
        list(arc_off),
        list(arc_in),
        list(arc_out),
        list(arc_dst),
        list(final_mask),
    )


def rng_next(state):
    """Advance a splitmix64 state; returns (new_state, 64-bit draw)."""
    state = (state + 0x9E3779B97F4A7C15) & _M64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    z = z ^ (z >> 31)
    return state, z


def stream_state(seed, index):
    """Derive the RNG state for one independent sample stream.

    Streams are indexed so that sample i is reproducible regardless of how
    work is partitioned across workers.
    """
    s = (
        (seed & _M64) * 0x9E3779B97F4A7C15
        + (index & _M64) * 0xBF58476D1CE4E5B9
        + 0x94D049BB133111EB
    ) & _M64
    s, _ = rng_next(s)
    return s


def apply_string(arc_off, arc_in, arc_out, arc_dst, final_mask, start, input_ids, match_output):
    """All emitted label sequences for accepting walks consuming ``input_ids``.

    Matches the input tape when ``match_output`` is false (generation) and
    the output tape when true (analysis). Returns a sorted, deduplicated
    list of epsilon-free id tuples. Raises ValueError on an epsilon cycle
    (which would make the path set infinite).

    Works on the product of the transducer with the linear automaton of the
    string: nodes are (state, position) pairs, memoized bottom-up by a
    two-phase iterative DFS.
    """
    n = len(input_ids)
    width = n + 1
    root = start * width

    memo = {}   # node -> set of output suffix tuples
    edges = {}  # node -> list of (emit, child)
    grey = set()
    stack = [(root, False)]
    while stack:
        node, ready = stack.pop()
        if ready:
            state, pos = divmod(node, width)
            acc = set()
            if pos == n and final_mask[state]:
                acc.add(())
            for emit, child in edges.pop(node):
                suffixes = memo[child]
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
            state, pos = divmod(node, width)
            outs = []
            for a in range(arc_off[state], arc_off[state + 1]):
                if match_output:
                    lab = arc_out[a]
                    emit = arc_in[a]
                else:
                    lab = arc_in[a]
                    emit = arc_out[a]
                if lab == 0:
                    outs.append((emit, arc_dst[a] * width + pos))
                elif pos < n and lab == input_ids[pos]:
                    outs.append((emit, arc_dst[a] * width + pos + 1))
            edges[node] = outs
            stack.append((node, True))
            for _, child in outs:
                if child not in memo:
                    stack.append((child, False))
    return sorted(memo[root])


def random_walk(arc_off, arc_in, arc_out, arc_dst, final_mask, start, rng_state, max_len, max_retries):
    """One accepting path sampled by per-arc uniform choice.

    At a final state the stop option competes uniformly with the outgoing
    arcs. Dead ends and over-length walks consume a retry; the RNG stream
    continues across retries so results stay deterministic. Returns
    (input_ids, output_ids, rng_state) with epsilons stripped, or None when
    the retry budget is exhausted.
    """
    for _ in range(max_retries):
        state = start
        ins = []
        outs = []
        steps = 0
        while True:
            lo = arc_off[state]
            k = arc_off[state + 1] - lo
            n_opts = k + (1 if final_mask[state] else 0)
            if n_opts == 0:
                break
            rng_state, draw = rng_next(rng_state)
            choice = draw % n_opts
            if choice == k:
                return ins, outs, rng_state
            a = lo + choice
            if arc_in[a]:
                ins.append(int(arc_in[a]))
            if arc_out[a]:
                outs.append(int(arc_out[a]))
            state = arc_dst[a]
            steps += 1
            if steps > max_len:
                break
    return None

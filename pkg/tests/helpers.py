"""Shared test fixtures: small transducer builders and brute-force oracles.

The oracles deliberately avoid the library's own traversal code: relations
are enumerated by a breadth-first search over (state, input-so-far,
output-so-far) nodes with both strings capped, which terminates even on
machines with epsilon cycles.
"""

import random

from morphboot.fst import EPSILON, SymbolTable, Transducer


def pairs_fst(table: SymbolTable, pairs) -> Transducer:
    """Union of linear paths, one per (input string, output string) pair.

    Unequal lengths are padded with epsilon on the shorter side.
    """
    t = Transducer(table)
    start = t.add_state()
    t.set_start(start)
    end = t.add_state()
    t.set_final(end)
    for x, y in pairs:
        xi = [table.add(c) for c in x]
        yi = [table.add(c) for c in y]
        n = max(len(xi), len(yi), 1)
        cur = start
        for k in range(n):
            nxt = end if k == n - 1 else t.add_state()
            i = xi[k] if k < len(xi) else EPSILON
            o = yi[k] if k < len(yi) else EPSILON
            t.add_arc(cur, i, o, nxt)
            cur = nxt
    return t


def relation(t: Transducer, max_len: int) -> set[tuple[tuple[str, ...], tuple[str, ...]]]:
    """Brute-force relation of ``t`` restricted to strings <= max_len.

    BFS over (state, input, output) triples; the visited set bounds the
    search so epsilon cycles cannot loop forever.
    """
    start = (t.start, (), ())
    seen = {start}
    queue = [start]
    found = set()
    while queue:
        state, ins, outs = queue.pop()
        if state in t.finals:
            found.add((ins, outs))
        for i, o, dst in t.arcs(state):
            ni = ins + (i,) if i else ins
            no = outs + (o,) if o else outs
            if len(ni) > max_len or len(no) > max_len:
                continue
            node = (dst, ni, no)
            if node not in seen:
                seen.add(node)
                queue.append(node)
    return {(t.table.decode(i), t.table.decode(o)) for i, o in found}


def join_relations(ra, rb) -> set:
    """Relational join: {(x, z) : exists y with (x,y) in ra, (y,z) in rb}."""
    by_y = {}
    for x, y in ra:
        by_y.setdefault(y, []).append(x)
    out = set()
    for y, z in rb:
        for x in by_y.get(y, ()):
            out.add((x, z))
    return out


def random_dag_fst(
    rng: random.Random,
    table: SymbolTable,
    n_states: int = 5,
    n_arcs: int = 10,
    eps_prob: float = 0.25,
) -> Transducer:
    """Random acyclic transducer: arcs only run from lower to higher ids.

    Paths carry at most n_states - 1 arcs, so the full relation is finite
    and fits within a length bound of n_states.
    """
    t = Transducer(table)
    for _ in range(n_states):
        t.add_state()
    t.set_start(0)
    t.set_final(n_states - 1)
    if n_states > 2 and rng.random() < 0.3:
        t.set_final(rng.randrange(1, n_states - 1))
    syms = [table.id(s) for s in table]
    for _ in range(n_arcs):
        src = rng.randrange(0, n_states - 1)
        dst = rng.randrange(src + 1, n_states)
        i = EPSILON if rng.random() < eps_prob else rng.choice(syms)
        o = EPSILON if rng.random() < eps_prob else rng.choice(syms)
        t.add_arc(src, i, o, dst)
    return t


def enumerate_paths(t: Transducer) -> int:
    """Count accepting paths by exhaustive DFS (acyclic machines only)."""

    def walk(state: int) -> int:
        total = 1 if state in t.finals else 0
        for _, _, dst in t.arcs(state):
            total += walk(dst)
        return total

    return walk(t.start)


def slot_chain_fst(table: SymbolTable, slot_sizes, optional=None) -> Transducer:
    """Chain of slots; slot k has slot_sizes[k] parallel arcs (same label).

    ``optional`` marks slots that also get an epsilon bypass.
    """
    optional = optional or set()
    t = Transducer(table)
    sym = table.add("x")
    cur = t.add_state()
    t.set_start(cur)
    for k, size in enumerate(slot_sizes):
        nxt = t.add_state()
        for _ in range(size):
            t.add_arc(cur, sym, sym, nxt)
        if k in optional:
            t.add_arc(cur, EPSILON, EPSILON, nxt)
        cur = nxt
    t.set_final(cur)
    return t

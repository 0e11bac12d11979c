"""Unweighted finite-state transducer engine.

Construction, composition, inversion, bidirectional application, exact
path counting, and seeded random path generation over a shared symbol
table. Transducers are plain arc lists during construction and are
treated as immutable once handed to the operations below; the hot loops
(apply, random_walk) run on a cached CSR view through the kernel backend.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Literal

from ._kernels import impl
from .errors import ConfigurationError, GenerationError, StructureError

EPSILON = 0
EPSILON_SYMBOL = "<eps>"

Direction = Literal["up", "down"]

FORMAT_HEADER = "morphboot-fst 1"

DEFAULT_MAX_WALK = 200
WALK_RETRIES = 100


class SymbolTable:
    """Bidirectional symbol/id map; id 0 is reserved for epsilon."""

    def __init__(self, symbols: Iterable[str] = ()):
        self._syms: list[str] = [EPSILON_SYMBOL]
        self._ids: dict[str, int] = {}
        for s in symbols:
            self.add(s)

    def add(self, symbol: str) -> int:
        """Intern a symbol, returning its id (existing id if present)."""
        if symbol in self._ids:
            return self._ids[symbol]
        if not symbol or symbol == EPSILON_SYMBOL:
            raise ConfigurationError(f"invalid symbol: {symbol!r}")
        if "\t" in symbol or "\n" in symbol or " " in symbol:
            raise ConfigurationError(f"symbol may not contain whitespace: {symbol!r}")
        i = len(self._syms)
        self._syms.append(symbol)
        self._ids[symbol] = i
        return i

    def id(self, symbol: str) -> int:
        return self._ids[symbol]

    def get(self, symbol: str) -> int | None:
        return self._ids.get(symbol)

    def symbol(self, i: int) -> str:
        return self._syms[i]

    def encode(self, symbols: Iterable[str]) -> tuple[int, ...] | None:
        """Symbol strings to ids; None if any symbol is unknown."""
        out = []
        for s in symbols:
            i = self._ids.get(s)
            if i is None:
                return None
            out.append(i)
        return tuple(out)

    def decode(self, ids: Iterable[int]) -> tuple[str, ...]:
        return tuple(self._syms[i] for i in ids)

    def __contains__(self, symbol: str) -> bool:
        return symbol in self._ids

    def __iter__(self) -> Iterator[str]:
        """User symbols in id order (epsilon excluded)."""
        return iter(self._syms[1:])

    def __len__(self) -> int:
        """Number of user symbols (epsilon excluded)."""
        return len(self._syms) - 1

    def __eq__(self, other) -> bool:
        return isinstance(other, SymbolTable) and self._syms == other._syms

    def __repr__(self) -> str:
        return f"SymbolTable({len(self)} symbols)"


@dataclass(frozen=True)
class PathSample:
    """One accepting path: epsilon-free input/output symbol sequences."""

    input: tuple[str, ...]
    output: tuple[str, ...]


class Transducer:
    """Unweighted FST: contiguous integer states, per-state arc lists.

    Arcs are (input-id, output-id, target) triples; arc order within a
    state is insertion order and is significant for random walks.
    """

    def __init__(self, table: SymbolTable):
        self.table = table
        self.start = 0
        self.finals: set[int] = set()
        self._arcs: list[list[tuple[int, int, int]]] = []
        self._prepared: tuple[str, tuple] | None = None

    # -- construction ------------------------------------------------------

    def add_state(self) -> int:
        self._arcs.append([])
        self._prepared = None
        return len(self._arcs) - 1

    def add_arc(self, src: int, in_id: int, out_id: int, dst: int) -> None:
        self._arcs[src].append((in_id, out_id, dst))
        self._prepared = None

    def set_start(self, state: int) -> None:
        self.start = state
        self._prepared = None

    def set_final(self, state: int) -> None:
        self.finals.add(state)
        self._prepared = None

    # -- inspection --------------------------------------------------------

    @property
    def n_states(self) -> int:
        return len(self._arcs)

    @property
    def n_arcs(self) -> int:
        return sum(len(a) for a in self._arcs)

    def arcs(self, state: int) -> list[tuple[int, int, int]]:
        return self._arcs[state]

    def all_arcs(self) -> Iterator[tuple[int, int, int, int]]:
        for src, arcs in enumerate(self._arcs):
            for i, o, dst in arcs:
                yield src, i, o, dst

    def __repr__(self) -> str:
        return f"Transducer({self.n_states} states, {self.n_arcs} arcs, {len(self.finals)} finals)"

    # -- kernel view -------------------------------------------------------

    def _kernel_csr(self):
        if self._prepared is not None and self._prepared[0] == impl.BACKEND:
            return self._prepared[1]
        off = [0]
        ain: list[int] = []
        aout: list[int] = []
        adst: list[int] = []
        for arcs in self._arcs:
            for i, o, d in arcs:
                ain.append(i)
                aout.append(o)
                adst.append(d)
            off.append(len(ain))
        fmask = [1 if s in self.finals else 0 for s in range(self.n_states)]
        prepared = impl.prepare_csr(off, ain, aout, adst, fmask)
        self._prepared = (impl.BACKEND, prepared)
        return prepared

    # -- trimming ----------------------------------------------------------

    def trim(self) -> "Transducer":
        """Copy with states unreachable from start or from finals removed.

        State ids are renumbered in ascending old-id order, so trimming is
        deterministic. A transducer with an empty relation trims to a
        single non-final start state.
        """
        fwd = {self.start}
        stack = [self.start]
        while stack:
            s = stack.pop()
            for _, _, d in self._arcs[s]:
                if d not in fwd:
                    fwd.add(d)
                    stack.append(d)
        rev: list[list[int]] = [[] for _ in range(self.n_states)]
        for src, _, _, dst in self.all_arcs():
            rev[dst].append(src)
        bwd = set(self.finals)
        stack = list(self.finals)
        while stack:
            s = stack.pop()
            for p in rev[s]:
                if p not in bwd:
                    bwd.add(p)
                    stack.append(p)
        keep = sorted(fwd & bwd)
        if not keep or self.start not in bwd:
            out = Transducer(self.table)
            out.set_start(out.add_state())
            return out
        remap = {old: new for new, old in enumerate(keep)}
        out = Transducer(self.table)
        for _ in keep:
            out.add_state()
        out.set_start(remap[self.start])
        for old in keep:
            for i, o, d in self._arcs[old]:
                if d in remap:
                    out.add_arc(remap[old], i, o, remap[d])
        for f in self.finals:
            if f in remap:
                out.set_final(remap[f])
        return out

    # -- serialization -----------------------------------------------------

    def dumps(self) -> str:
        """Versioned line-oriented text form; round-trips bit-exactly."""
        lines = [FORMAT_HEADER]
        lines.append(f"symbols {len(self.table)}")
        lines.extend(self.table)
        lines.append(f"states {self.n_states}")
        lines.append(f"start {self.start}")
        lines.append("finals " + " ".join(str(s) for s in sorted(self.finals)))
        lines.append(f"arcs {self.n_arcs}")
        for src, i, o, dst in self.all_arcs():
            lines.append(f"{src}\t{i}\t{o}\t{dst}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Transducer":
        lines = text.splitlines()
        if not lines or lines[0] != FORMAT_HEADER:
            raise ConfigurationError("unrecognized transducer format header")
        pos = 1

        def expect(prefix: str) -> str:
            nonlocal pos
            if pos >= len(lines) or not lines[pos].startswith(prefix):
                raise ConfigurationError(f"expected {prefix!r} at line {pos + 1}")
            value = lines[pos][len(prefix):].strip()
            pos += 1
            return value

        n_syms = int(expect("symbols "))
        table = SymbolTable(lines[pos : pos + n_syms])
        pos += n_syms
        n_states = int(expect("states "))
        start = int(expect("start "))
        finals_field = expect("finals")
        finals = [int(x) for x in finals_field.split()] if finals_field else []
        n_arcs = int(expect("arcs "))
        t = cls(table)
        for _ in range(n_states):
            t.add_state()
        t.set_start(start)
        for f in finals:
            t.set_final(f)
        for k in range(n_arcs):
            parts = lines[pos + k].split("\t")
            if len(parts) != 4:
                raise ConfigurationError(f"malformed arc at line {pos + k + 1}")
            src, i, o, dst = (int(x) for x in parts)
            t.add_arc(src, i, o, dst)
        return t

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path) -> "Transducer":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def _check_shared_table(a: Transducer, b: Transducer) -> None:
    if a.table is not b.table and a.table != b.table:
        raise ConfigurationError("transducers do not share a symbol table")


def compose(a: Transducer, b: Transducer) -> Transducer:
    """Relational composition: x→z iff exists y with a:x→y and b:y→z.

    Epsilon handling uses a two-state sequencing filter: between matched
    moves, all a-alone moves (output epsilon) must precede all b-alone
    moves (input epsilon). Every pair of compatible paths therefore maps
    to exactly one composite path, which keeps path counts honest.
    The result is trimmed.
    """
    _check_shared_table(a, b)
    out = Transducer(a.table)

    # group b's arcs by input symbol per state
    b_by_in: list[dict[int, list[tuple[int, int]]]] = []
    for s in range(b.n_states):
        d: dict[int, list[tuple[int, int]]] = {}
        for i, o, dst in b.arcs(s):
            d.setdefault(i, []).append((o, dst))
        b_by_in.append(d)

    key0 = (a.start, b.start, 0)
    ids = {key0: out.add_state()}
    out.set_start(ids[key0])
    stack = [key0]

    def state_of(key):
        sid = ids.get(key)
        if sid is None:
            sid = out.add_state()
            ids[key] = sid
            stack.append(key)
        return sid

    while stack:
        key = stack.pop()
        qa, qb, f = key
        sid = ids[key]
        if qa in a.finals and qb in b.finals:
            out.set_final(sid)
        for i1, o1, d1 in a.arcs(qa):
            if o1 == EPSILON:
                if f == 0:  # a-alone move
                    out.add_arc(sid, i1, EPSILON, state_of((d1, qb, 0)))
            else:
                for o2, d2 in b_by_in[qb].get(o1, ()):  # matched move
                    out.add_arc(sid, i1, o2, state_of((d1, d2, 0)))
        for o2, d2 in b_by_in[qb].get(EPSILON, ()):  # b-alone move
            out.add_arc(sid, EPSILON, o2, state_of((qa, d2, 1)))
    return out.trim()


def invert(t: Transducer) -> Transducer:
    """Swap input and output labels; the relation becomes its converse."""
    out = Transducer(t.table)
    for _ in range(t.n_states):
        out.add_state()
    out.set_start(t.start)
    for f in t.finals:
        out.set_final(f)
    for src, i, o, dst in t.all_arcs():
        out.add_arc(src, o, i, dst)
    return out


def apply(t: Transducer, symbols: Iterable[str], direction: Direction = "down") -> list[tuple[str, ...]]:
    """Transduce a symbol sequence through ``t``.

    down: all outputs z with symbols→z; up: all inputs x with x→symbols.
    Unknown symbols yield an empty result (the no-parse/OOV signal), never
    an error. Results are deduplicated and ordered lexicographically by
    symbol id.
    """
    ids = t.table.encode(symbols)
    if ids is None:
        return []
    results = apply_ids(t, ids, direction)
    return [t.table.decode(r) for r in results]


def apply_ids(t: Transducer, ids: tuple[int, ...], direction: Direction = "down") -> list[tuple[int, ...]]:
    """Id-level apply; see ``apply``."""
    if direction not in ("up", "down"):
        raise ConfigurationError(f"unknown direction: {direction!r}")
    csr = t._kernel_csr()
    try:
        return impl.apply_string(*csr, t.start, tuple(int(i) for i in ids), direction == "up")
    except ValueError as exc:
        raise StructureError(str(exc)) from exc


def random_walk(
    t: Transducer,
    seed: int,
    max_length: int = DEFAULT_MAX_WALK,
    index: int = 0,
) -> PathSample:
    """Sample one accepting path with per-arc uniform choices.

    ``index`` selects an independent, deterministically derived stream so
    bulk generation can be partitioned across workers without changing
    results. Raises GenerationError if no accepting path is found within
    ``max_length`` arcs after the retry budget.
    """
    csr = t._kernel_csr()
    state = impl.stream_state(seed, index)
    res = impl.random_walk(*csr, t.start, state, max_length, WALK_RETRIES)
    if res is None:
        raise GenerationError(
            f"no accepting path within {max_length} arcs after {WALK_RETRIES} retries"
        )
    ins, outs, _ = res
    return PathSample(t.table.decode(ins), t.table.decode(outs))


def count_paths(t: Transducer) -> int:
    """Exact number of accepting paths (start to a final state).

    Topological DP with arbitrary-precision integers; the empty path
    counts when the start state is final. Raises StructureError on a
    cyclic transducer.
    """
    n = t.n_states
    indeg = [0] * n
    for _, _, _, dst in t.all_arcs():
        indeg[dst] += 1
    order = [s for s in range(n) if indeg[s] == 0]
    topo = []
    queue = list(order)
    while queue:
        s = queue.pop()
        topo.append(s)
        for _, _, d in t.arcs(s):
            indeg[d] -= 1
            if indeg[d] == 0:
                queue.append(d)
    if len(topo) != n:
        raise StructureError("cycle detected: path counting requires an acyclic transducer")
    paths = [0] * n
    for s in reversed(topo):
        total = 1 if s in t.finals else 0
        for _, _, d in t.arcs(s):
            total += paths[d]
        paths[s] = total
    return paths[t.start]

"""Transducer engine tests: semantics checked against brute-force oracles."""

import random

import pytest

from morphboot.errors import ConfigurationError, GenerationError, StructureError
from morphboot.fst import (
    EPSILON,
    PathSample,
    SymbolTable,
    Transducer,
    apply,
    compose,
    count_paths,
    invert,
    random_walk,
)

from helpers import (
    enumerate_paths,
    join_relations,
    pairs_fst,
    random_dag_fst,
    relation,
    slot_chain_fst,
)


# -- symbol table -------------------------------------------------------------


def test_symbol_table_basic():
    tab = SymbolTable(["ng", "a", "rr"])
    assert len(tab) == 3
    assert tab.id("ng") == 1
    assert tab.symbol(2) == "a"
    assert "rr" in tab
    assert tab.decode(tab.encode(["a", "ng"])) == ("a", "ng")


def test_symbol_table_no_duplicates():
    tab = SymbolTable()
    i = tab.add("a")
    assert tab.add("a") == i
    assert len(tab) == 1


def test_symbol_table_rejects_bad_symbols():
    tab = SymbolTable()
    with pytest.raises(ConfigurationError):
        tab.add("")
    with pytest.raises(ConfigurationError):
        tab.add("a b")


def test_symbol_table_epsilon_reserved():
    tab = SymbolTable(["a"])
    assert tab.encode(["a"]) == (1,)
    assert tab.symbol(EPSILON) == "<eps>"


# -- compose ------------------------------------------------------------------


def test_compose_single_chain():
    tab = SymbolTable(["a", "b", "c"])
    t1 = pairs_fst(tab, [("a", "b")])
    t2 = pairs_fst(tab, [("b", "c")])
    c = compose(t1, t2)
    assert relation(c, 4) == {(("a",), ("c",))}


def test_compose_prunes_dead_paths():
    tab = SymbolTable(["x", "y", "z", "w"])
    t1 = pairs_fst(tab, [("x", "y"), ("x", "z")])
    t2 = pairs_fst(tab, [("y", "w")])
    c = compose(t1, t2)
    assert relation(c, 4) == {(("x",), ("w",))}


def test_compose_table_mismatch():
    t1 = pairs_fst(SymbolTable(["a"]), [("a", "a")])
    t2 = pairs_fst(SymbolTable(["b"]), [("b", "b")])
    with pytest.raises(ConfigurationError):
        compose(t1, t2)


def test_compose_matches_relation_join_on_random_dags():
    rng = random.Random(20240817)
    tab = SymbolTable(["a", "b", "c"])
    for trial in range(60):
        t1 = random_dag_fst(rng, tab)
        t2 = random_dag_fst(rng, tab)
        c = compose(t1, t2)
        got = relation(c, 8)
        want = join_relations(relation(t1, 8), relation(t2, 8))
        assert got == want, f"trial {trial}"


def test_compose_no_duplicate_epsilon_paths():
    # a: x -> (eps out), b: (eps in) -> y; exactly one composite path
    tab = SymbolTable(["x", "y"])
    t1 = pairs_fst(tab, [("x", "")])
    t2 = pairs_fst(tab, [("", "y")])
    c = compose(t1, t2)
    assert count_paths(c) == 1
    assert relation(c, 4) == {(("x",), ("y",))}


# -- invert ---------------------------------------------------------------


def test_invert_swaps_labels():
    tab = SymbolTable(["a", "b"])
    t = pairs_fst(tab, [("a", "b")])
    assert relation(invert(t), 4) == {(("b",), ("a",))}


def test_invert_involution_on_random_dags():
    rng = random.Random(7)
    tab = SymbolTable(["a", "b", "c"])
    for _ in range(30):
        t = random_dag_fst(rng, tab)
        assert relation(invert(invert(t)), 8) == relation(t, 8)


def test_apply_down_of_invert_equals_apply_up():
    rng = random.Random(99)
    tab = SymbolTable(["a", "b", "c"])
    strings = [()]
    pool = ["a", "b", "c"]
    for l in range(1, 5):
        strings += [tuple(rng.choice(pool) for _ in range(l)) for _ in range(6)]
    for _ in range(25):
        t = random_dag_fst(rng, tab)
        ti = invert(t)
        for s in strings:
            assert apply(ti, s, "down") == apply(t, s, "up")


# -- apply ----------------------------------------------------------------


def test_apply_ambiguity_returns_set():
    tab = SymbolTable(["x", "y", "z"])
    t = pairs_fst(tab, [("x", "y"), ("x", "z")])
    assert apply(t, ["x"], "down") == [("y",), ("z",)]


def test_apply_unknown_symbol_is_empty_not_error():
    tab = SymbolTable(["x", "y"])
    t = pairs_fst(tab, [("x", "y")])
    assert apply(t, ["q"], "down") == []
    assert apply(t, ["x", "x"], "down") == []


def test_apply_deterministic_order():
    tab = SymbolTable(["x", "c", "b", "a"])
    t = pairs_fst(tab, [("x", "c"), ("x", "b"), ("x", "a")])
    out = apply(t, ["x"], "down")
    ids = [tab.encode(o) for o in out]
    assert ids == sorted(ids)


def test_apply_agrees_with_relation_oracle():
    rng = random.Random(4242)
    tab = SymbolTable(["a", "b", "c"])
    for _ in range(30):
        t = random_dag_fst(rng, tab)
        rel = relation(t, 8)
        inputs = {x for x, _ in rel}
        for x in list(inputs)[:10]:
            want = sorted(
                {tab.encode(y) for xx, y in rel if xx == x}
            )
            got = [tab.encode(y) for y in apply(t, x, "down")]
            assert got == want


def test_apply_empty_input():
    tab = SymbolTable(["a"])
    t = Transducer(tab)
    s0 = t.add_state()
    t.set_start(s0)
    t.set_final(s0)
    assert apply(t, [], "down") == [()]


def test_apply_bad_direction():
    tab = SymbolTable(["a"])
    t = pairs_fst(tab, [("a", "a")])
    with pytest.raises(ConfigurationError):
        apply(t, ["a"], "sideways")


# -- random_walk ----------------------------------------------------------


def test_random_walk_single_path():
    tab = SymbolTable(["a", "b", "c", "d"])
    t = pairs_fst(tab, [("ab", "cd")])
    for i in range(20):
        s = random_walk(t, seed=3, index=i)
        assert s == PathSample(("a", "b"), ("c", "d"))


def test_random_walk_two_paths_binomial():
    tab = SymbolTable(["a", "b", "x", "y"])
    t = pairs_fst(tab, [("a", "x"), ("b", "y")])
    n = 10_000
    hits = sum(1 for i in range(n) if random_walk(t, seed=11, index=i).input == ("a",))
    assert abs(hits / n - 0.5) < 0.02


def test_random_walk_deterministic():
    rng = random.Random(5)
    tab = SymbolTable(["a", "b", "c"])
    t = random_dag_fst(rng, tab, n_states=6, n_arcs=14, eps_prob=0.1)
    a = [random_walk(t, seed=77, index=i) for i in range(50)]
    b = [random_walk(t, seed=77, index=i) for i in range(50)]
    assert a == b


def test_random_walk_outputs_always_accepted():
    rng = random.Random(13)
    tab = SymbolTable(["a", "b", "c"])
    for _ in range(10):
        t = random_dag_fst(rng, tab, n_states=6, n_arcs=14, eps_prob=0.1)
        if not relation(t, 8):
            continue
        for i in range(50):
            s = random_walk(t, seed=1000, index=i)
            assert s.input in [x for x in apply(t, s.output, "up")]


def test_random_walk_budget_exhaustion():
    tab = SymbolTable(["a"])
    t = Transducer(tab)
    s0 = t.add_state()
    s1 = t.add_state()
    t.set_start(s0)
    t.add_arc(s0, 1, 1, s1)  # dead end: s1 has no arcs, is not final
    with pytest.raises(GenerationError):
        random_walk(t, seed=1)


def test_random_walk_stop_option_at_final_with_arcs():
    # final state with a loop-out arc: walk can stop or continue
    tab = SymbolTable(["a"])
    t = Transducer(tab)
    s0, s1 = t.add_state(), t.add_state()
    t.set_start(s0)
    t.set_final(s0)
    t.add_arc(s0, 1, 1, s1)
    t.set_final(s1)
    lengths = {len(random_walk(t, seed=21, index=i).input) for i in range(40)}
    assert lengths == {0, 1}


# -- count_paths ----------------------------------------------------------


def test_count_paths_slot_product():
    tab = SymbolTable()
    t = slot_chain_fst(tab, [2, 2, 2])
    assert count_paths(t) == 8


def test_count_paths_empty_path():
    tab = SymbolTable()
    t = Transducer(tab)
    s0 = t.add_state()
    t.set_start(s0)
    t.set_final(s0)
    assert count_paths(t) == 1


def test_count_paths_cycle_error():
    tab = SymbolTable(["a"])
    t = Transducer(tab)
    s0 = t.add_state()
    t.set_start(s0)
    t.set_final(s0)
    t.add_arc(s0, 1, 1, s0)
    with pytest.raises(StructureError):
        count_paths(t)


def test_count_paths_matches_enumeration():
    rng = random.Random(31337)
    tab = SymbolTable(["a", "b"])
    for _ in range(40):
        t = random_dag_fst(rng, tab, n_states=7, n_arcs=16)
        assert count_paths(t) == enumerate_paths(t)


def test_count_paths_fig6_style_product():
    # product of slot cardinalities equals the path count of the chain
    sizes = [157, 3, 2, 24, 2, 4, 78, 32, 2, 541, 2, 5]
    tab = SymbolTable()
    t = slot_chain_fst(tab, sizes)
    want = 1
    for s in sizes:
        want *= s
    assert count_paths(t) == want


# -- trim -----------------------------------------------------------------


def test_trim_preserves_relation():
    rng = random.Random(2718)
    tab = SymbolTable(["a", "b", "c"])
    for _ in range(30):
        t = random_dag_fst(rng, tab)
        assert relation(t.trim(), 8) == relation(t, 8)


def test_trim_removes_unreachable():
    tab = SymbolTable(["a"])
    t = Transducer(tab)
    s0, s1, s2 = t.add_state(), t.add_state(), t.add_state()
    t.set_start(s0)
    t.set_final(s1)
    t.add_arc(s0, 1, 1, s1)
    t.add_arc(s2, 1, 1, s1)  # s2 unreachable
    trimmed = t.trim()
    assert trimmed.n_states == 2
    assert trimmed.n_arcs == 1


def test_trim_empty_language():
    tab = SymbolTable(["a"])
    t = Transducer(tab)
    s0 = t.add_state()
    t.add_state()
    t.set_start(s0)  # no finals at all
    trimmed = t.trim()
    assert trimmed.n_states == 1
    assert not trimmed.finals


# -- serialization --------------------------------------------------------


def test_roundtrip_bit_exact():
    rng = random.Random(555)
    tab = SymbolTable(["ng", "a", "rr", "b"])
    t = random_dag_fst(rng, tab, n_states=8, n_arcs=20)
    text = t.dumps()
    t2 = Transducer.loads(text)
    assert t2.dumps() == text
    assert relation(t2, 8) == relation(t, 8)


def test_roundtrip_file(tmp_path):
    tab = SymbolTable(["a", "b"])
    t = pairs_fst(tab, [("a", "b"), ("ab", "ba")])
    p = tmp_path / "t.fst"
    t.save(p)
    t2 = Transducer.load(p)
    assert t2.dumps() == t.dumps()


def test_loads_rejects_garbage():
    with pytest.raises(ConfigurationError):
        Transducer.loads("not a transducer\n")


# -- backend parity -------------------------------------------------------


def _backends():
    from morphboot._kernels import _pyimpl

    mods = [_pyimpl]
    try:
        from morphboot._kernels import _cyimpl

        mods.append(_cyimpl)
    except ImportError:
        pass
    return mods


@pytest.mark.skipif(len(_backends()) < 2, reason="compiled backend unavailable")
def test_backends_agree():
    rng = random.Random(808)
    tab = SymbolTable(["a", "b", "c"])
    mods = _backends()
    for _ in range(20):
        t = random_dag_fst(rng, tab)
        off = [0]
        ain, aout, adst = [], [], []
        for s in range(t.n_states):
            for i, o, d in t.arcs(s):
                ain.append(i)
                aout.append(o)
                adst.append(d)
            off.append(len(ain))
        fmask = [1 if s in t.finals else 0 for s in range(t.n_states)]
        prepped = [m.prepare_csr(off, ain, aout, adst, fmask) for m in mods]
        for s in [(), (1,), (1, 2), (2, 1, 3), (3, 3, 3, 3)]:
            results = [m.apply_string(*p, t.start, s, False) for m, p in zip(mods, prepped)]
            assert results[0] == results[1]
        for idx in range(10):
            st = mods[0].stream_state(99, idx)
            walks = [m.random_walk(*p, t.start, st, 50, 100) for m, p in zip(mods, prepped)]
            a, b = walks
            if a is None or b is None:
                assert a == b
            else:
                assert (list(a[0]), list(a[1]), a[2]) == (list(b[0]), list(b[1]), b[2])

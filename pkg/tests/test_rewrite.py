"""Rewrite rule compiler vs. the string-scanning oracle."""

import itertools
import random

import pytest

from morphboot.errors import ConfigurationError
from morphboot.fst import SymbolTable, apply, count_paths
from morphboot.grammar import compile_morphotactics, load_grammar
from morphboot.rewrite import RewriteRule, compile_rule, compose_cascade, oracle_rewrite

from helpers import relation

import pathlib

DATA = pathlib.Path(__file__).resolve().parents[1] / "src" / "morphboot" / "data"


# -- oracle ---------------------------------------------------------------


def R(lhs, rhs, left="", right=""):
    return RewriteRule(tuple(lhs), tuple(rhs), tuple(left), tuple(right))


def test_oracle_global_replacement():
    assert oracle_rewrite(R("a", "b"), "aaa") == ("b", "b", "b")


def test_oracle_leftmost_match():
    assert oracle_rewrite(R("ab", "x"), "aab") == ("a", "x")


def test_oracle_mutating_suffix():
    rule = R("u^~o", "o")
    assert oracle_rewrite(rule, tuple("bu^~om")) == tuple("bom")


def test_oracle_context_gating():
    rule = R("a", "b", left="c", right="d")
    assert oracle_rewrite(rule, "cadx") == tuple("cbdx")
    assert oracle_rewrite(rule, "adx") == tuple("adx")


def test_oracle_deletion():
    rule = R("^", "")
    assert oracle_rewrite(rule, tuple("karri^bim^bom")) == tuple("karribimbom")


def test_oracle_no_overlap_of_matched_spans():
    # after replacing positions 0-1, position 1 cannot start a new match
    assert oracle_rewrite(R("aa", "x"), "aaa") == ("x", "a")


def test_oracle_context_may_overlap_replaced_span():
    # left context reads the original string, even inside a replaced span
    assert oracle_rewrite(R("a", "b", left="a"), "aaa") == ("a", "b", "b")


def test_vacuous_rule_rejected():
    with pytest.raises(ConfigurationError):
        R("a", "a")
    with pytest.raises(ConfigurationError):
        R("", "b")


# -- compiled transducer ---------------------------------------------------


def _transduce(t, s):
    out = apply(t, s, "down")
    assert len(out) == 1, f"rule transducer not functional on {s!r}: {out}"
    return out[0]


def test_compile_context_gating():
    tab = SymbolTable(["a", "b", "c", "d", "x"])
    t = compile_rule(R("a", "b", left="c", right="d"), tab)
    assert _transduce(t, tuple("cadx")) == tuple("cbdx")
    assert _transduce(t, tuple("adx")) == tuple("adx")


def test_compile_boundary_deletion():
    tab = SymbolTable(["^", "k", "a", "rr", "i", "b", "m", "o"])
    t = compile_rule(R("^", ""), tab)
    s = ("k", "a", "rr", "i", "^", "b", "i", "m", "^", "b", "o", "m")
    assert _transduce(t, s) == ("k", "a", "rr", "i", "b", "i", "m", "b", "o", "m")


def test_compile_symbol_outside_alphabet():
    tab = SymbolTable(["a"])
    with pytest.raises(ConfigurationError):
        compile_rule(R("a", "b"), tab)


def _all_strings(symbols, max_len):
    for n in range(max_len + 1):
        yield from itertools.product(symbols, repeat=n)


def _exhaustive_check(rule, symbols, max_len=6):
    tab = SymbolTable(symbols)
    t = compile_rule(rule, tab)
    for s in _all_strings(symbols, max_len):
        want = oracle_rewrite(rule, s)
        got = apply(t, s, "down")
        assert got == [want], f"rule {rule}, input {''.join(s)!r}: {got} != {want}"


def test_exhaustive_overlapping_pattern():
    _exhaustive_check(R("aa", "b"), ["a", "b", "c", "d"], max_len=6)


def test_exhaustive_self_context():
    _exhaustive_check(R("a", "b", left="a"), ["a", "b", "c", "d"], max_len=6)


def test_exhaustive_growth():
    _exhaustive_check(R("a", "bb", right="c"), ["a", "b", "c", "d"], max_len=5)


def test_random_rules_match_oracle():
    rng = random.Random(90210)
    symbols = ["a", "b", "c", "d"]
    tab = SymbolTable(symbols)
    pool = [tuple(rng.choice(symbols) for _ in range(rng.randint(0, 2))) for _ in range(200)]
    n_rules = 0
    while n_rules < 200:
        lhs = tuple(rng.choice(symbols) for _ in range(rng.randint(1, 3)))
        rhs = rng.choice(pool)
        left = rng.choice(pool)
        right = rng.choice(pool)
        if lhs == rhs and not (left or right):
            continue
        rule = RewriteRule(lhs, rhs, left, right)
        t = compile_rule(rule, tab)
        n_rules += 1
        for _ in range(25):
            s = tuple(rng.choice(symbols) for _ in range(rng.randint(0, 7)))
            want = oracle_rewrite(rule, s)
            got = apply(t, s, "down")
            assert got == [want], f"rule {rule}, input {''.join(s)!r}"


def test_rule_transducer_total_single_output():
    # totality: every string has exactly one output
    symbols = ["a", "b", "c", "d"]
    tab = SymbolTable(symbols)
    t = compile_rule(R("ab", "ba", left="c"), tab)
    for s in _all_strings(symbols, 5):
        assert len(apply(t, s, "down")) == 1


# -- cascade ----------------------------------------------------------------


def test_cascade_kunwinjku_end_to_end():
    spec = load_grammar(DATA / "kunwinjku.grammar")
    m = compile_morphotactics(spec)
    cascade = compose_cascade(spec.rewrite_rules, m)
    analysis = ["[V]", "[1pl.incl.3sg.PST]", "[GIN.bim]", "b", "u", "[PP]"]
    surfaces = {"".join(x) for x in apply(cascade, analysis, "down")}
    assert "karribimbom" in surfaces


def test_cascade_empty_rule_list_is_identity():
    spec = load_grammar(DATA / "toylang.grammar")
    m = compile_morphotactics(spec)
    cascade = compose_cascade([], m)
    assert relation(cascade, 6) == relation(m, 6)


def test_cascade_order_sensitivity():
    # "a->b" then "b->c" rewrites a to c; reversed order leaves b from a
    tab = SymbolTable(["a", "b", "c"])
    from helpers import pairs_fst

    base = pairs_fst(tab, [("a", "a")])
    r1 = R("a", "b")
    r2 = R("b", "c")
    fwd = compose_cascade([r1, r2], base)
    rev = compose_cascade([r2, r1], base)
    assert apply(fwd, ["a"], "down") == [("c",)]
    assert apply(rev, ["a"], "down") == [("b",)]


def test_cascade_is_acyclic_and_countable():
    spec = load_grammar(DATA / "toylang.grammar")
    m = compile_morphotactics(spec)
    cascade = compose_cascade(spec.rewrite_rules, m)
    assert count_paths(cascade) == count_paths(m)

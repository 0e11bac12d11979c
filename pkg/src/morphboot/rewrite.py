"""Context-dependent obligatory rewrite rules compiled to transducers.

Rule semantics are deliberately restricted: obligatory, left-to-right,
non-recursive (output is not re-scanned), with contexts checked against
the original input string. Matched spans never overlap; context spans may
overlap previously replaced material. This is enough for a
morphophonological cascade and keeps the compiler verifiable against the
trivial scanning oracle below.

The compiled transducer is a KMP-style scanner over the pattern
``left + lhs + right``. Symbols that might still belong to a pending
match are withheld and flushed when the candidate dies; on a full match
the lhs span is replaced and scanning resumes inside the right-context
window (whose symbols may open the next match).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import ConfigurationError
from .fst import EPSILON, SymbolTable, Transducer, compose


@dataclass(frozen=True)
class RewriteRule:
    """lhs -> rhs / left _ right, all given as grapheme tuples."""

    lhs: tuple[str, ...]
    rhs: tuple[str, ...]
    left: tuple[str, ...] = ()
    right: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.lhs:
            raise ConfigurationError("rewrite rule needs a non-empty lhs")
        if self.lhs == self.rhs and not (self.left or self.right):
            raise ConfigurationError("vacuous rewrite rule (lhs == rhs, no context)")

    def __str__(self) -> str:
        ctx = ""
        if self.left or self.right:
            ctx = f" / {''.join(self.left)} _ {''.join(self.right)}"
        return f"{''.join(self.lhs)} -> {''.join(self.rhs)}{ctx}"


def oracle_rewrite(rule: RewriteRule, s: Sequence[str]) -> tuple[str, ...]:
    """Single-pass left-to-right obligatory replacement; the test oracle.

    A match at position i requires lhs at i, ``left`` literally present
    ending at i, and ``right`` literally present after the lhs, all in the
    original string. After a match, scanning resumes at the end of the
    lhs span.
    """
    s = tuple(s)
    lhs, rhs, left, right = rule.lhs, rule.rhs, rule.left, rule.right
    out: list[str] = []
    i = 0
    n = len(s)
    while i < n:
        if (
            s[i : i + len(lhs)] == lhs
            and i >= len(left)
            and s[i - len(left) : i] == left
            and s[i + len(lhs) : i + len(lhs) + len(right)] == right
        ):
            out.extend(rhs)
            i += len(lhs)
        else:
            out.append(s[i])
            i += 1
    return tuple(out)


def _kmp_prefix(pattern: tuple[int, ...]) -> list[int]:
    """Classic prefix function: pi[j] = longest proper border of P[:j]."""
    m = len(pattern)
    pi = [0] * (m + 1)
    k = 0
    for j in range(1, m):
        while k and pattern[j] != pattern[k]:
            k = pi[k]
        if pattern[j] == pattern[k]:
            k += 1
        pi[j + 1] = k
    return pi


def compile_rule(rule: RewriteRule, alphabet: SymbolTable) -> Transducer:
    """Transducer computing ``oracle_rewrite`` as a (total) function.

    Scanner states track KMP progress over P = left + lhs + right; each
    state has exactly one arc per alphabet symbol, plus an epsilon flush
    path for end of input, so every input string has exactly one output.
    """
    for sym in rule.lhs + rule.rhs + rule.left + rule.right:
        if sym not in alphabet:
            raise ConfigurationError(f"rule symbol {sym!r} not in alphabet: {rule}")
    lhs = tuple(alphabet.id(s) for s in rule.lhs)
    rhs = tuple(alphabet.id(s) for s in rule.rhs)
    left = tuple(alphabet.id(s) for s in rule.left)
    right = tuple(alphabet.id(s) for s in rule.right)
    pattern = left + lhs + right
    m = len(pattern)
    lp = len(left)
    lr = len(right)
    pi = _kmp_prefix(pattern)

    def pending(j: int) -> int:
        return max(0, j - lp)

    def kmp_next(j: int, c: int) -> int:
        while True:
            if j < m and pattern[j] == c:
                return j + 1
            if j == 0:
                return 0
            j = pi[j]

    # state reached after a full match: longest border whose pending
    # region fits inside the right-context window (a new lhs span must not
    # re-enter the replaced one)
    j_star = pi[m]
    while pending(j_star) > lr:
        j_star = pi[j_star]

    t = Transducer(alphabet)
    scan = [t.add_state() for _ in range(m)]
    t.set_start(scan[0])
    sink = t.add_state()
    t.set_final(sink)

    def emit_chain(src: int, first_in: int, emits: tuple[int, ...], dst: int) -> None:
        """Arc chain consuming one input symbol and emitting a sequence."""
        if not emits:
            t.add_arc(src, first_in, EPSILON, dst)
            return
        cur = src
        inp = first_in
        for k, e in enumerate(emits):
            nxt = dst if k == len(emits) - 1 else t.add_state()
            t.add_arc(cur, inp, e, nxt)
            cur = nxt
            inp = EPSILON

    symbols = [alphabet.id(s) for s in alphabet]
    for j in range(m):
        pend_syms = pattern[lp:j]  # withheld symbols in state j
        for c in symbols:
            j2 = kmp_next(j, c)
            if j2 == m:
                consumed = pend_syms + (c,)
                n_pre = len(consumed) - (m - lp)
                emits = consumed[:n_pre] + rhs + right[: lr - pending(j_star)]
                emit_chain(scan[j], c, emits, scan[j_star])
            else:
                n_emit = pending(j) + 1 - pending(j2)
                emits = (pend_syms + (c,))[:n_emit]
                emit_chain(scan[j], c, emits, scan[j2])
        # end-of-input flush: withheld symbols printed as themselves
        if pend_syms:
            emit_chain(scan[j], EPSILON, pend_syms, sink)
        else:
            t.set_final(scan[j])
    return t


def compose_cascade(rules: Sequence[RewriteRule], morphotactic: Transducer) -> Transducer:
    """morphotactic composed with each rule transducer, in order.

    Rule order is significant; the caller's fixture pins it. The returned
    analyzer maps analyses to fully rewritten surface strings.
    """
    t = morphotactic
    for rule in rules:
        t = compose(t, compile_rule(rule, morphotactic.table))
    return t

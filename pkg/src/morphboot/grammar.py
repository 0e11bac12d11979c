"""Declarative slot grammars and their compilation to transducers.

A grammar file declares a grapheme inventory, vowels, ordered affix slots
with lexical entries, rewrite rules, and syncretism equivalences. The
morphotactic compiler turns the slots into an acyclic transducer mapping
bracketed-tag analyses to boundary-marked intermediate strings: prefix
morphs emit ``form^``, the root emits its graphemes, suffix morphs emit
``^form``.

File schema (version 1), line oriented, ``#`` comments::

    version 1
    name toylang
    graphemes ng a b ... ~
    vowels a e i o u
    slot -4 subj [optional] [open-class]
      <form> <[tag]>         # one entry per line; '-' form = null morph
    slot 0 root
      <form>                 # root entries carry their graphemes
    rule <lhs> -> [<rhs>] [/ [<left>] _ [<right>]]
    syncretism component <a> <b>
    syncretism tag <[x]> <[y]>

The boundary marker ``^`` is reserved and appended to the inventory
automatically; the mutation trigger ``~`` must be listed explicitly when
entry forms use it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import SegmentationError, ValidationError
from .fst import EPSILON, SymbolTable, Transducer
from .rewrite import RewriteRule

BOUNDARY = "^"

_TAG_RE = re.compile(r"^\[[^\[\]\s]+\]$")

MIN_SLOT_INDEX = -12
MAX_SLOT_INDEX = 2
ROOT_INDEX = 0


@dataclass(frozen=True)
class LexEntry:
    """A single morph: surface form plus its (bracketed) analysis tag."""

    form: str
    tag: str

    def components(self) -> list[str]:
        """Dot-separated components of a fused tag, brackets stripped."""
        return self.tag[1:-1].split(".")


@dataclass
class Slot:
    name: str
    index: int
    entries: list[LexEntry] = field(default_factory=list)
    optional: bool = False
    open_class: bool = False


@dataclass
class GrammarSpec:
    name: str
    graphemes: list[str]
    vowels: set[str]
    slots: list[Slot]
    rewrite_rules: list[RewriteRule] = field(default_factory=list)
    syncretism_components: list[tuple[str, str]] = field(default_factory=list)
    syncretism_tags: list[tuple[str, str]] = field(default_factory=list)

    @property
    def root_slot(self) -> Slot:
        for s in self.slots:
            if s.index == ROOT_INDEX:
                return s
        raise ValidationError("grammar has no root slot (index 0)")

    @property
    def consonants(self) -> list[str]:
        special = {BOUNDARY, "~"}
        return [g for g in self.graphemes if g not in self.vowels and g not in special]

    def without_roots(self, forms) -> "GrammarSpec":
        """Copy with the given root forms removed (a deliberately
        incomplete lexicon for coverage experiments)."""
        missing = set(forms) - {e.form for e in self.root_slot.entries}
        if missing:
            raise ValidationError(f"cannot hold out unknown roots: {sorted(missing)}")
        slots = []
        for s in self.slots:
            if s.index == ROOT_INDEX:
                entries = [e for e in s.entries if e.form not in set(forms)]
                if not entries:
                    raise ValidationError("holding out all roots leaves the grammar empty")
                slots.append(replace_slot(s, entries))
            else:
                slots.append(s)
        return GrammarSpec(
            name=self.name,
            graphemes=self.graphemes,
            vowels=self.vowels,
            slots=slots,
            rewrite_rules=self.rewrite_rules,
            syncretism_components=self.syncretism_components,
            syncretism_tags=self.syncretism_tags,
        )


def replace_slot(slot: Slot, entries: list[LexEntry]) -> Slot:
    return Slot(slot.name, slot.index, entries, slot.optional, slot.open_class)


# ---------------------------------------------------------------------------
# Graphemization
# ---------------------------------------------------------------------------


def graphemize(spec: GrammarSpec, s: str) -> list[str]:
    """Longest-match left-to-right segmentation over the inventory.

    Total: every character must be consumed, otherwise SegmentationError
    with the failing position.
    """
    if not s:
        raise SegmentationError("cannot graphemize an empty string", 0)
    inventory = set(spec.graphemes)
    max_len = max(len(g) for g in inventory)
    out: list[str] = []
    i = 0
    n = len(s)
    while i < n:
        for k in range(min(max_len, n - i), 0, -1):
            cand = s[i : i + k]
            if cand in inventory:
                out.append(cand)
                i += k
                break
        else:
            raise SegmentationError(
                f"cannot segment {s!r} at position {i} ({s[i]!r} not in inventory)", i
            )
    return out


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def parse_grammar(text: str, name: str = "grammar") -> GrammarSpec:
    graphemes: list[str] = []
    vowels: set[str] = set()
    slots: list[Slot] = []
    rules: list[tuple[int, list[str]]] = []
    sync_components: list[tuple[str, str]] = []
    sync_tags: list[tuple[str, str]] = []
    current: Slot | None = None
    version = None
    gname = name

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0]
        if head == "version":
            version = tokens[1] if len(tokens) > 1 else None
            if version != "1":
                raise ValidationError(f"line {lineno}: unsupported grammar version {version!r}")
        elif head == "name":
            gname = tokens[1]
        elif head == "graphemes":
            graphemes.extend(tokens[1:])
        elif head == "vowels":
            vowels.update(tokens[1:])
        elif head == "slot":
            if len(tokens) < 3:
                raise ValidationError(f"line {lineno}: slot needs an index and a name")
            try:
                index = int(tokens[1])
            except ValueError as exc:
                raise ValidationError(f"line {lineno}: bad slot index {tokens[1]!r}") from exc
            flags = set(tokens[3:])
            bad = flags - {"optional", "open-class"}
            if bad:
                raise ValidationError(f"line {lineno}: unknown slot flags {sorted(bad)}")
            current = Slot(
                name=tokens[2],
                index=index,
                optional="optional" in flags,
                open_class="open-class" in flags,
            )
            slots.append(current)
        elif head == "rule":
            rules.append((lineno, tokens[1:]))
        elif head == "syncretism":
            if len(tokens) != 4 or tokens[1] not in ("component", "tag"):
                raise ValidationError(f"line {lineno}: syncretism needs 'component|tag A B'")
            if tokens[1] == "component":
                sync_components.append((tokens[2], tokens[3]))
            else:
                for t in tokens[2:]:
                    if not _TAG_RE.match(t):
                        raise ValidationError(f"line {lineno}: {t!r} is not a bracketed tag")
                sync_tags.append((tokens[2], tokens[3]))
        else:
            if current is None:
                raise ValidationError(f"line {lineno}: entry outside any slot: {line!r}")
            form = "" if head == "-" else head
            if len(tokens) == 1:
                if current.index != ROOT_INDEX:
                    raise ValidationError(
                        f"line {lineno}: entry in slot {current.name!r} needs a tag"
                    )
                tag = form
            elif len(tokens) == 2:
                tag = tokens[1]
            else:
                raise ValidationError(f"line {lineno}: too many fields in entry {line!r}")
            current.entries.append(LexEntry(form=form, tag=tag))

    if version is None:
        raise ValidationError("grammar file missing 'version' declaration")
    if BOUNDARY not in graphemes:
        graphemes.append(BOUNDARY)

    spec = GrammarSpec(
        name=gname,
        graphemes=graphemes,
        vowels=vowels,
        slots=slots,
        syncretism_components=sync_components,
        syncretism_tags=sync_tags,
    )
    spec.rewrite_rules = [_parse_rule(spec, lineno, toks) for lineno, toks in rules]
    validate(spec)
    return spec


def _parse_rule(spec: GrammarSpec, lineno: int, tokens: list[str]) -> RewriteRule:
    if "->" not in tokens:
        raise ValidationError(f"line {lineno}: rule needs '->'")
    arrow = tokens.index("->")
    lhs_toks = tokens[:arrow]
    rest = tokens[arrow + 1 :]
    if "/" in rest:
        slash = rest.index("/")
        rhs_toks = rest[:slash]
        ctx = rest[slash + 1 :]
        if "_" not in ctx:
            raise ValidationError(f"line {lineno}: rule context needs '_'")
        us = ctx.index("_")
        left_toks = ctx[:us]
        right_toks = ctx[us + 1 :]
    else:
        rhs_toks = rest
        left_toks = []
        right_toks = []
    if len(lhs_toks) != 1 or len(rhs_toks) > 1 or len(left_toks) > 1 or len(right_toks) > 1:
        raise ValidationError(f"line {lineno}: malformed rule")

    def seg(toks: list[str]) -> tuple[str, ...]:
        if not toks:
            return ()
        try:
            return tuple(graphemize(spec, toks[0]))
        except SegmentationError as exc:
            raise ValidationError(f"line {lineno}: rule symbol error: {exc}") from exc

    return RewriteRule(lhs=seg(lhs_toks), rhs=seg(rhs_toks), left=seg(left_toks), right=seg(right_toks))


def load_grammar(path) -> GrammarSpec:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    stem = str(path).rsplit("/", 1)[-1].rsplit(".", 1)[0]
    return parse_grammar(text, name=stem)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def validate(spec: GrammarSpec) -> None:
    if not spec.graphemes:
        raise ValidationError("empty grapheme inventory")
    if len(set(spec.graphemes)) != len(spec.graphemes):
        raise ValidationError("duplicate graphemes in inventory")
    unknown_vowels = spec.vowels - set(spec.graphemes)
    if unknown_vowels:
        raise ValidationError(f"vowels not in inventory: {sorted(unknown_vowels)}")
    if not spec.slots:
        raise ValidationError("grammar declares no slots")
    indices = [s.index for s in spec.slots]
    if indices != sorted(indices) or len(set(indices)) != len(indices):
        raise ValidationError("slot indices must be strictly increasing")
    for s in spec.slots:
        if not MIN_SLOT_INDEX <= s.index <= MAX_SLOT_INDEX:
            raise ValidationError(f"slot {s.name!r}: index {s.index} outside [-12, +2]")
    root = next((s for s in spec.slots if s.index == ROOT_INDEX), None)
    if root is None:
        raise ValidationError("grammar has no root slot (index 0)")
    if root.optional:
        raise ValidationError("root slot may not be optional")
    for slot in spec.slots:
        if not slot.optional and not slot.entries:
            raise ValidationError(f"slot {slot.name!r}: mandatory slot has no entries")
        seen: set[tuple[str, str]] = set()
        for e in slot.entries:
            if (e.form, e.tag) in seen:
                raise ValidationError(
                    f"slot {slot.name!r}: duplicate entry {e.form!r} {e.tag}"
                )
            seen.add((e.form, e.tag))
            if not e.tag:
                raise ValidationError(f"slot {slot.name!r}: entry {e.form!r} has empty tag")
            if slot.index == ROOT_INDEX:
                if not e.form:
                    raise ValidationError("root slot entries need a non-empty form")
            elif not _TAG_RE.match(e.tag) or any(
                not c for c in e.tag[1:-1].split(".")
            ):
                raise ValidationError(
                    f"slot {slot.name!r}: malformed tag {e.tag!r} (want [a.b.c])"
                )
            if e.form:
                try:
                    graphemize(spec, e.form)
                except SegmentationError as exc:
                    raise ValidationError(
                        f"slot {slot.name!r}: entry {e.form!r} does not segment: {exc}"
                    ) from exc


# ---------------------------------------------------------------------------
# Compilation
# ---------------------------------------------------------------------------


def build_symbol_table(spec: GrammarSpec) -> SymbolTable:
    """Graphemes in inventory order, then tag symbols in slot order."""
    table = SymbolTable(spec.graphemes)
    for slot in spec.slots:
        if slot.index == ROOT_INDEX:
            continue
        for e in slot.entries:
            table.add(e.tag)
    return table


def compile_morphotactics(spec: GrammarSpec, table: SymbolTable | None = None) -> Transducer:
    """Slot concatenation transducer: analyses to intermediate strings.

    Input side: bracketed tag symbols for affix slots, root graphemes for
    the root slot. Output side: morph graphemes with the boundary marker
    between adjacent morphs (after each prefix, before each suffix; null
    morphs emit nothing). Optional slots get an epsilon bypass. The result
    is acyclic and trimmed.
    """
    validate(spec)
    if table is None:
        table = build_symbol_table(spec)
    boundary = table.id(BOUNDARY)
    t = Transducer(table)
    cur = t.add_state()
    t.set_start(cur)
    for slot in spec.slots:
        nxt = t.add_state()
        for e in slot.entries:
            forms = graphemize(spec, e.form) if e.form else []
            form_ids = [table.id(g) for g in forms]
            if slot.index == ROOT_INDEX:
                inputs = form_ids
                outputs = form_ids
            else:
                inputs = [table.id(e.tag)]
                if not form_ids:
                    outputs = []
                elif slot.index < ROOT_INDEX:
                    outputs = form_ids + [boundary]
                else:
                    outputs = [boundary] + form_ids
            n = max(len(inputs), len(outputs), 1)
            src = cur
            for k in range(n):
                dst = nxt if k == n - 1 else t.add_state()
                i = inputs[k] if k < len(inputs) else EPSILON
                o = outputs[k] if k < len(outputs) else EPSILON
                t.add_arc(src, i, o, dst)
                src = dst
        if slot.optional:
            t.add_arc(cur, EPSILON, EPSILON, nxt)
        cur = nxt
    t.set_final(cur)
    return t.trim()

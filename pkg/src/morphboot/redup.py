"""Reduplication hallucination: inject copied root material into pairs.

The generating transducer cannot produce reduplication, so training pairs
never show it; this module synthesizes it. A sampled pair has its root
isolated, a reduplication type is drawn (iterative, inceptive, extended),
the longest matching CV template for that type produces a reduplicant,
and the reduplicant is prepended to the root span on the surface side
while a ``[ REDUP ]`` tag lands immediately before the root graphemes on
the analysis side.

The template table is data: its patterns and mutations are pinned by the
seven worked examples in the tests (dadj-dadjke, bongu-bongu, rengeh-re,
yah-yame, durnh-durnde, djordoh-djordmen, wirri-wirrkme).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

from .datagen import TrainingPair
from .errors import ConfigurationError, InputError
from .grammar import GrammarSpec

REDUP_TAG = "REDUP"

TYPES = ("iterative", "inceptive", "extended")

# nasal slot in templates: alveolar/velar/retroflex only; the bilabial is
# excluded, otherwise yame would reduplicate as *yamh instead of yah
NASALS = frozenset({"n", "ng", "rn"})


@dataclass(frozen=True)
class CvClasses:
    consonants: frozenset[str]
    vowels: frozenset[str]

    @classmethod
    def from_grammar(cls, spec: GrammarSpec) -> "CvClasses":
        return cls(consonants=frozenset(spec.consonants), vowels=frozenset(spec.vowels))


@dataclass(frozen=True)
class ReduplicationTemplate:
    """CV pattern, optional required follow-context, and copy mutation.

    Pattern slots: C consonant, V vowel, N? optional nasal, C? optional
    consonant, H? optional literal h. The context, when present, must
    immediately follow the matched prefix in the root.
    """

    rtype: str
    pattern: tuple[str, ...]
    context: tuple[str, ...] | None
    mutation: str


DEFAULT_TEMPLATES: tuple[ReduplicationTemplate, ...] = (
    ReduplicationTemplate("iterative", ("C", "V", "C"), None, "identity"),
    ReduplicationTemplate("iterative", ("C", "V", "C", "V", "H?"), None, "identity"),
    ReduplicationTemplate("iterative", ("C", "V"), None, "insert_nasal_echo_vowel_h"),
    ReduplicationTemplate("inceptive", ("C", "V", "N?"), None, "replace_coda_with_h"),
    ReduplicationTemplate("extended", ("C", "V", "C", "C?"), ("m", "e", "n"), "echo_vowel_h"),
    ReduplicationTemplate("extended", ("C", "V", "C", "C?"), ("m", "e"), "echo_vowel"),
)


@dataclass
class HallucConfig:
    fraction: float = 0.08
    seed: int = 0
    tag: str = REDUP_TAG

    def __post_init__(self):
        if not 0 < self.fraction <= 1:
            raise ConfigurationError(f"halluc fraction must be in (0, 1]: {self.fraction}")


@dataclass
class HallucResult:
    pairs: list[TrainingPair]
    n_sampled: int
    n_skipped: int


# -- template matching -------------------------------------------------------


def _slot_fits(slot: str, grapheme: str, classes: CvClasses) -> bool:
    kind = slot[0]
    if kind == "C":
        return grapheme in classes.consonants
    if kind == "V":
        return grapheme in classes.vowels
    if kind == "N":
        return grapheme in NASALS
    if kind == "H":
        return grapheme == "h"
    raise ConfigurationError(f"unknown template slot {slot!r}")


def match_template(
    template: ReduplicationTemplate, root: Sequence[str], classes: CvClasses
) -> int | None:
    """Longest root prefix length matched by the pattern, or None.

    Optional slots may be skipped; among complete assignments the longest
    match wins, and the context (when present) must follow the match.
    """
    root = tuple(root)
    lengths: set[int] = set()

    def walk(pi: int, ri: int) -> None:
        if pi == len(template.pattern):
            lengths.add(ri)
            return
        slot = template.pattern[pi]
        if ri < len(root) and _slot_fits(slot, root[ri], classes):
            walk(pi + 1, ri + 1)
        if slot.endswith("?"):
            walk(pi + 1, ri)

    walk(0, 0)
    ctx = template.context
    valid = [
        ln
        for ln in lengths
        if ln > 0 and (ctx is None or root[ln : ln + len(ctx)] == ctx)
    ]
    return max(valid) if valid else None


def _mutate(mutation: str, match: tuple[str, ...], classes: CvClasses) -> tuple[str, ...]:
    echo = next((g for g in match if g in classes.vowels), None)
    if mutation == "identity":
        return match
    if mutation == "replace_coda_with_h":
        return match + ("h",)
    if mutation == "echo_vowel":
        base = match[:-1] if match[-1] in classes.consonants else match
        return base + (echo,)
    if mutation == "echo_vowel_h":
        return match + (echo, "h")
    if mutation == "insert_nasal_echo_vowel_h":
        return match + ("ng", echo, "h")
    raise ConfigurationError(f"unknown mutation {mutation!r}")


def reduplicate(
    root: Sequence[str],
    rtype: str,
    classes: CvClasses,
    templates: Sequence[ReduplicationTemplate] = DEFAULT_TEMPLATES,
) -> tuple[str, ...] | None:
    """Reduplicant for a graphemized root under one reduplication type.

    Templates of the type are matched against the root prefix; the
    longest match wins (earlier table entry on ties) and its mutation
    produces the reduplicant. None when nothing matches.
    """
    if rtype not in TYPES:
        raise ConfigurationError(f"unknown reduplication type {rtype!r}")
    best: tuple[int, ReduplicationTemplate] | None = None
    for tpl in templates:
        if tpl.rtype != rtype:
            continue
        ln = match_template(tpl, root, classes)
        if ln is not None and (best is None or ln > best[0]):
            best = (ln, tpl)
    if best is None:
        return None
    ln, tpl = best
    reduplicant = _mutate(tpl.mutation, tuple(root[:ln]), classes)
    return reduplicant if reduplicant else None


# -- pair surgery -------------------------------------------------------------


def isolate_root(pair: TrainingPair) -> tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...]]:
    """Split the target into (prefix tokens, root graphemes, suffix tokens).

    The root is the unique run of bare grapheme tokens outside any
    bracketed tag. Raises InputError when there is no such run (or more
    than one, in which case the alignment is unknown).
    """
    tokens = pair.target
    spans: list[tuple[int, int]] = []
    depth = 0
    start: int | None = None
    for i, tok in enumerate(tokens):
        if tok == "[":
            if start is not None:
                spans.append((start, i))
                start = None
            depth += 1
        elif tok == "]":
            depth -= 1
            if depth < 0:
                raise InputError(f"unbalanced brackets in target: {tokens}")
        elif depth == 0 and start is None:
            start = i
    if start is not None:
        spans.append((start, len(tokens)))
    if not spans:
        raise InputError(f"target has no root grapheme span: {tokens}")
    if len(spans) > 1:
        raise InputError(f"target has multiple grapheme spans: {tokens}")
    lo, hi = spans[0]
    return tokens[:lo], tokens[lo:hi], tokens[hi:]


def _find_last(haystack: tuple[str, ...], needle: tuple[str, ...]) -> int | None:
    """Rightmost occurrence of needle in haystack (token-wise).

    The root sits late in the word (prefix slots outnumber suffix slots),
    so searching from the right picks the true root span when a prefix
    happens to repeat the same graphemes.
    """
    n, m = len(haystack), len(needle)
    for pos in range(n - m, -1, -1):
        if haystack[pos : pos + m] == needle:
            return pos
    return None


def hallucinate_pair(
    pair: TrainingPair,
    rtype: str,
    classes: CvClasses,
    tag: str = REDUP_TAG,
    templates: Sequence[ReduplicationTemplate] = DEFAULT_TEMPLATES,
) -> TrainingPair | None:
    """Reduplicated copy of one pair, or None when it cannot be built.

    None cases: no template of the type matches the root, or the root
    graphemes no longer appear verbatim in the surface (a rewrite rule
    mutated the stem, so there is no safe insertion point).
    """
    prefix, root, suffix = isolate_root(pair)
    reduplicant = reduplicate(root, rtype, classes, templates)
    if reduplicant is None:
        return None
    pos = _find_last(pair.source, root)
    if pos is None:
        return None
    new_source = pair.source[:pos] + reduplicant + pair.source[pos:]
    new_target = prefix + ("[", tag, "]") + root + suffix
    return TrainingPair(new_source, new_target)


def hallucinate(
    pairs: Sequence[TrainingPair],
    config: HallucConfig,
    classes: CvClasses,
    templates: Sequence[ReduplicationTemplate] = DEFAULT_TEMPLATES,
) -> HallucResult:
    """Reduplicate an exact-count sample of the given pairs.

    floor(fraction * N) pairs are drawn without replacement; each gets a
    uniformly chosen reduplication type. Non-matching roots are skipped
    and counted. Returns only the new pairs, ordered by source pair index;
    the caller appends them to its training set.
    """
    if not pairs:
        raise InputError("hallucinate needs a non-empty pair list")
    rng = random.Random(config.seed)
    count = math.floor(config.fraction * len(pairs))
    chosen = sorted(rng.sample(range(len(pairs)), count))
    out: list[TrainingPair] = []
    skipped = 0
    for i in chosen:
        rtype = TYPES[rng.randrange(len(TYPES))]
        new = hallucinate_pair(pairs[i], rtype, classes, config.tag, templates)
        if new is None:
            skipped += 1
        else:
            out.append(new)
    return HallucResult(pairs=out, n_sampled=count, n_skipped=skipped)

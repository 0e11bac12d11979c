"""Distributional resampling: make FST-uniform data look corpus-like.

A raw corpus is tagged with the analyzer (whatever it can parse counts),
joint probabilities of adjacent morph tags are estimated from the tag
sequences, every training pair is scored by the mean log joint
probability of its own tag bigrams, and the score-ranked pairs are
resampled bucket-wise under a Zipf law so likely morphotactics dominate.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .datagen import TrainingPair, detokenize_target
from .errors import ConfigurationError, EstimationError, ScoringError
from .fst import Transducer, apply
from .grammar import _TAG_RE

log = logging.getLogger(__name__)

ROOT_TAG = "<root>"

DEFAULT_BUCKETS = 10
DEFAULT_ZIPF_S = 1.0


def tags_of_analysis(symbols: Sequence[str]) -> tuple[str, ...]:
    """Morph tag sequence of an analysis: bracketed symbols kept whole,
    each maximal run of root graphemes collapsed to one ``<root>``."""
    out: list[str] = []
    in_root = False
    for sym in symbols:
        if _TAG_RE.match(sym):
            out.append(sym)
            in_root = False
        else:
            if not in_root:
                out.append(ROOT_TAG)
            in_root = True
    return tuple(out)


def tags_of_pair(pair: TrainingPair) -> tuple[str, ...]:
    return tags_of_analysis(detokenize_target(pair.target))


@dataclass
class BigramTable:
    """Joint probabilities of ordered adjacent tag pairs.

    ``prob`` returns the smoothing floor for unseen pairs, so scores are
    always finite.
    """

    counts: dict[tuple[str, str], int]
    total: int

    @property
    def epsilon(self) -> float:
        return 1.0 / (10.0 * self.total)

    def prob(self, a: str, b: str) -> float:
        c = self.counts.get((a, b))
        if c is None:
            return self.epsilon
        return c / self.total

    # -- serialization: sorted "tagA<TAB>tagB<TAB>count<TAB>prob" lines ----

    def dumps(self) -> str:
        lines = [f"bigrams {self.total}"]
        for (a, b), c in sorted(self.counts.items()):
            lines.append(f"{a}\t{b}\t{c}\t{c / self.total:.12g}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "BigramTable":
        lines = [l for l in text.splitlines() if l.strip()]
        if not lines or not lines[0].startswith("bigrams "):
            raise ConfigurationError("unrecognized bigram table header")
        total = int(lines[0].split()[1])
        counts: dict[tuple[str, str], int] = {}
        for line in lines[1:]:
            a, b, c, _ = line.split("\t")
            counts[(a, b)] = int(c)
        return cls(counts=counts, total=total)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path) -> "BigramTable":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())


@dataclass(frozen=True)
class ScoredAnalysis:
    tags: tuple[str, ...]
    n_bigrams: int
    score: float


def tag_corpus(
    analyzer: Transducer,
    words: Iterable[str],
    graphemizer: Callable[[str], Sequence[str]],
    all_analyses: bool = True,
) -> list[tuple[str, ...]]:
    """Tag raw word tokens with the analyzer.

    Every analysis of every parseable token contributes a tag sequence
    (set ``all_analyses=False`` to keep only the first); unparseable or
    unsegmentable tokens are skipped. A heuristic: the analyzer's recall
    bounds what gets counted.
    """
    out: list[tuple[str, ...]] = []
    for word in words:
        try:
            graphemes = tuple(graphemizer(word))
        except Exception:
            continue
        analyses = apply(analyzer, graphemes, "up")
        if not all_analyses:
            analyses = analyses[:1]
        for a in analyses:
            out.append(tags_of_analysis(a))
    return out


def estimate_bigrams(tagseqs: Sequence[Sequence[str]]) -> BigramTable:
    """Counts over ordered adjacent tag pairs; P(a,b) = count / total."""
    counts: dict[tuple[str, str], int] = {}
    total = 0
    for seq in tagseqs:
        for a, b in zip(seq, seq[1:]):
            counts[(a, b)] = counts.get((a, b), 0) + 1
            total += 1
    if total == 0:
        raise EstimationError("no adjacent tag pairs in the input")
    return BigramTable(counts=counts, total=total)


def score(tags: Sequence[str], table: BigramTable) -> float:
    """Mean natural-log joint probability of the adjacent tag pairs."""
    if len(tags) < 2:
        raise ScoringError(f"need at least 2 tags to score, got {list(tags)}")
    n = len(tags) - 1
    return sum(math.log(table.prob(a, b)) for a, b in zip(tags, tags[1:])) / n


def score_pair(pair: TrainingPair, table: BigramTable) -> ScoredAnalysis:
    tags = tags_of_pair(pair)
    return ScoredAnalysis(tags=tags, n_bigrams=len(tags) - 1, score=score(tags, table))


@dataclass
class ZipfBuckets:
    """Rank-ordered buckets with normalized 1/rank^s sampling weights."""

    buckets: list[list[TrainingPair]]
    s: float
    weights: list[float]

    @classmethod
    def build(cls, ranked: Sequence[TrainingPair], k: int, s: float) -> "ZipfBuckets":
        if k < 1:
            raise ConfigurationError(f"bucket count must be >= 1: {k}")
        if not ranked:
            raise ConfigurationError("cannot bucket an empty pair list")
        k = min(k, len(ranked))
        base = len(ranked) // k
        extra = len(ranked) % k
        buckets: list[list[TrainingPair]] = []
        pos = 0
        for i in range(k):
            size = base + (1 if i < extra else 0)
            buckets.append(list(ranked[pos : pos + size]))
            pos += size
        raw = [1.0 / (i + 1) ** s for i in range(k)]
        h = sum(raw)
        return cls(buckets=buckets, s=s, weights=[w / h for w in raw])

    def sample_indices(self, n: int, rng: random.Random) -> list[int]:
        """n bucket indices drawn by the Zipf weights (inverse CDF)."""
        cdf = []
        acc = 0.0
        for w in self.weights:
            acc += w
            cdf.append(acc)
        cdf[-1] = 1.0
        out = []
        for _ in range(n):
            u = rng.random()
            lo = 0
            while cdf[lo] < u:
                lo += 1
            out.append(lo)
        return out


def resample(
    pairs: Sequence[TrainingPair],
    table: BigramTable,
    k: int = DEFAULT_BUCKETS,
    s: float = DEFAULT_ZIPF_S,
    target_n: int | None = None,
    seed: int = 0,
) -> list[TrainingPair]:
    """Zipf resampling: k near-equal buckets over descending score.

    A draw picks bucket i with probability (1/i^s)/H and then an element
    uniformly within the bucket, with replacement, until target_n samples
    (default: the input size). Ties in score break by input position so a
    fixed seed reproduces the exact output. Empty buckets (k > n) are
    dropped with a warning and the weights renormalize.
    """
    if not pairs:
        raise ConfigurationError("cannot resample an empty pair list")
    scored = sorted(
        range(len(pairs)),
        key=lambda i: (-score_pair(pairs[i], table).score, i),
    )
    ranked = [pairs[i] for i in scored]
    zb = ZipfBuckets.build(ranked, k, s)
    empties = [i for i, b in enumerate(zb.buckets) if not b]
    if empties:
        log.warning("dropping %d empty buckets and renormalizing", len(empties))
        kept = [i for i in range(len(zb.buckets)) if zb.buckets[i]]
        raw = [1.0 / (i + 1) ** s for i in kept]
        h = sum(raw)
        zb = ZipfBuckets(
            buckets=[zb.buckets[i] for i in kept], s=s, weights=[w / h for w in raw]
        )
    n = len(pairs) if target_n is None else target_n
    rng = random.Random(seed)
    out: list[TrainingPair] = []
    for bi in zb.sample_indices(n, rng):
        bucket = zb.buckets[bi]
        out.append(bucket[rng.randrange(len(bucket))])
    return out

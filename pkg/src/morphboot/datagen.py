"""Training pair generation, tokenization, and dataset splitting.

Pairs flow through the whole pipeline as (source, target) token tuples:
source is the surface form as grapheme tokens, target is the analysis as
bracket/component/root tokens (fused tags split on their dots, e.g.
``[ 3sg . 3ua . nonpast ]``). On disk a pair is one TSV line with
space-separated tokens; that file format is the contract between all
pipeline stages.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ConfigurationError, TokenizationError
from .fst import Transducer, random_walk
from .grammar import _TAG_RE

DEFAULT_PAIR_CAP = 50_000


@dataclass(frozen=True)
class TrainingPair:
    source: tuple[str, ...]
    target: tuple[str, ...]


@dataclass
class DatasetSplit:
    train: list[TrainingPair]
    dev: list[TrainingPair]
    test: list[TrainingPair]
    ratios: tuple[float, float, float]
    seed: int


def tokenize_target(symbols: Sequence[str]) -> tuple[str, ...]:
    """Expand analysis symbols into model-ready tokens.

    A bracketed tag becomes ``[`` component (``.`` component)* ``]``; root
    graphemes pass through unchanged.
    """
    out: list[str] = []
    for sym in symbols:
        if sym.startswith("[") or sym.endswith("]"):
            if not _TAG_RE.match(sym):
                raise TokenizationError(f"malformed tag symbol: {sym!r}")
            components = sym[1:-1].split(".")
            if any(not c for c in components):
                raise TokenizationError(f"empty component in tag: {sym!r}")
            out.append("[")
            for k, comp in enumerate(components):
                if k:
                    out.append(".")
                out.append(comp)
            out.append("]")
        else:
            out.append(sym)
    return tuple(out)


def detokenize_target(tokens: Sequence[str]) -> tuple[str, ...]:
    """Inverse of tokenize_target; strict about bracket structure."""
    out: list[str] = []
    comps: list[str] | None = None
    expect_comp = False
    for tok in tokens:
        if tok == "[":
            if comps is not None:
                raise TokenizationError("nested '[' in analysis")
            comps = []
            expect_comp = True
        elif tok == "]":
            if comps is None or not comps or expect_comp:
                raise TokenizationError("unbalanced or empty tag")
            out.append("[" + ".".join(comps) + "]")
            comps = None
        elif tok == ".":
            if comps is None or expect_comp:
                raise TokenizationError("misplaced '.' in analysis")
            expect_comp = True
        elif comps is not None:
            if not expect_comp:
                raise TokenizationError(f"expected '.' or ']' before {tok!r}")
            comps.append(tok)
            expect_comp = False
        else:
            out.append(tok)
    if comps is not None:
        raise TokenizationError("unterminated tag")
    return tuple(out)


def generate_pairs(
    analyzer: Transducer,
    n: int,
    seed: int,
    max_length: int = 200,
) -> list[TrainingPair]:
    """Draw n random walks from the analyzer and keep unique pairs.

    Deduplication is by exact (source, target) identity, first occurrence
    wins, so a surface form with several sampled analyses keeps them all.
    Deterministic for a fixed seed.
    """
    seen: set[TrainingPair] = set()
    out: list[TrainingPair] = []
    for i in range(n):
        sample = random_walk(analyzer, seed, max_length=max_length, index=i)
        pair = TrainingPair(source=sample.output, target=tokenize_target(sample.input))
        if pair not in seen:
            seen.add(pair)
            out.append(pair)
    return out


def split(
    pairs: Sequence[TrainingPair],
    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1),
    seed: int = 0,
) -> DatasetSplit:
    """Seeded shuffle followed by contiguous slicing.

    The first two slice sizes are floored; the last takes the remainder,
    so counts are off by at most one from the nominal ratios.
    """
    if len(ratios) != 3:
        raise ConfigurationError("split needs exactly three ratios")
    if any(r < 0 for r in ratios) or not math.isclose(sum(ratios), 1.0, abs_tol=1e-9):
        raise ConfigurationError(f"ratios must be non-negative and sum to 1: {ratios}")
    order = list(pairs)
    random.Random(seed).shuffle(order)
    n = len(order)
    n_train = int(n * ratios[0] + 1e-9)
    n_dev = int(n * ratios[1] + 1e-9)
    return DatasetSplit(
        train=order[:n_train],
        dev=order[n_train : n_train + n_dev],
        test=order[n_train + n_dev :],
        ratios=tuple(ratios),
        seed=seed,
    )


# -- pair file I/O ----------------------------------------------------------


def format_pair(pair: TrainingPair) -> str:
    return " ".join(pair.source) + "\t" + " ".join(pair.target)


def parse_pair(line: str) -> TrainingPair:
    parts = line.rstrip("\n").split("\t")
    if len(parts) != 2:
        raise TokenizationError(f"pair line needs 2 tab-separated fields, got {len(parts)}")
    src, tgt = parts
    return TrainingPair(tuple(src.split()), tuple(tgt.split()))


def write_pairs(path, pairs: Iterable[TrainingPair]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in pairs:
            fh.write(format_pair(p) + "\n")


def read_pairs(path) -> list[TrainingPair]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(parse_pair(line))
    return out

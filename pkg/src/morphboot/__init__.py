"""morphboot: bootstrap a neural morphological analyzer from an FST.

Pipeline: compile a slot grammar and rewrite-rule cascade into a
transducer, generate tokenized training pairs from it, hallucinate
reduplication, resample under a Zipf law over bigram scores, train a
seq2seq analyzer, and evaluate with syncretism-aware metrics.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .fst import PathSample, SymbolTable, Transducer, apply, compose, count_paths, invert, random_walk

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "PathSample",
    "SymbolTable",
    "Transducer",
    "apply",
    "compose",
    "count_paths",
    "invert",
    "random_walk",
    "__version__",
]

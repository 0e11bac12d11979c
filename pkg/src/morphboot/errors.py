"""Exception taxonomy shared across the toolkit.

The CLI maps ConfigurationError/ValidationError/InputError to exit code 2
(bad configuration or input) and every other MorphbootError to exit code 3
(stage failure).
"""


class MorphbootError(Exception):
    """Base class for all toolkit errors."""


class ConfigurationError(MorphbootError):
    """Mismatched symbol tables, invalid ratios, malformed config files."""


class ValidationError(MorphbootError):
    """A grammar spec violates its structural invariants."""


class InputError(MorphbootError):
    """Caller-supplied data is malformed (misaligned files, bad pairs)."""


class SegmentationError(MorphbootError):
    """A string cannot be segmented into inventory graphemes."""

    def __init__(self, message: str, position: int):
        super().__init__(message)
        self.position = position


class GenerationError(MorphbootError):
    """Random path generation exhausted its retry budget."""


class StructureError(MorphbootError):
    """Operation requires an acyclic transducer but found a cycle."""


class TokenizationError(MorphbootError):
    """An analysis string cannot be (de)tokenized."""


class EstimationError(MorphbootError):
    """Bigram estimation received no usable input."""


class ScoringError(MorphbootError):
    """A tag sequence is too short to score."""


class TrainingError(MorphbootError):
    """Training aborted: bad split, vocab overflow, or divergence."""


class NumericError(TrainingError):
    """Non-finite values encountered during loss/gradient computation."""

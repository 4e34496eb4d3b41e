"""Exception hierarchy shared across the package.

Everything raised on purpose derives from :class:`CooccurnetError` so callers
(and the CLI) can map failures to outcomes without catching ``Exception``.
"""

from __future__ import annotations


class CooccurnetError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(CooccurnetError):
    """Malformed input file; carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class StructuralError(CooccurnetError):
    """Corpus invariant violation (duplicate face index, duplicate person in a photo)."""


class MissingLabelError(CooccurnetError):
    """An operation that needs ground-truth identities met an unlabeled instance."""


class UnknownTargetError(CooccurnetError):
    """Requested target identity does not appear in the corpus under the chosen labels."""


class CoverageError(CooccurnetError):
    """A predictions file does not cover every face it must label."""


class ConsistencyError(CooccurnetError):
    """Cross-referenced data disagrees (missing score, root mismatch, ambiguous key...)."""


class DomainError(CooccurnetError):
    """Numeric input outside the operation's domain (NaN/inf logits, bad probabilities)."""


class InfiniteLossError(CooccurnetError):
    """Cross-entropy of a zero-probability true class; the loss would be +inf."""


class UndefinedRateError(CooccurnetError):
    """A ratio whose denominator is zero (e.g. error rate of zero predictions)."""


class UndefinedDensityError(CooccurnetError):
    """Density of a graph with fewer than two nodes."""


class ParameterError(CooccurnetError):
    """Invalid configuration or parameters."""

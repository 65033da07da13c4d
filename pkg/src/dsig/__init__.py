"""Discrete signatures of multivariate discrete-time paths.

Feature sets for time-series classification built from iterated sums of path
increments over a head/tail extended alphabet, with optional exponential
decay of older contributions, plus a market-session ingestion pipeline, a
synthetic session generator, an experiment harness, an HTTP service and a
thin-client CLI.
"""

from .engine import (
    DiscretePath,
    SignatureResult,
    SignatureTable,
    TimeDomain,
    compute_signature,
    extend_table,
    first_letter_sign_invariance_check,
    oracle_signature,
    parse_signature_tsv,
    quadratic_variation,
)
from .errors import DataError, DegenerateSessionError, DsigError, NumericError, WordFormatError
from .words import (
    EMPTY_WORD,
    HEAD,
    TAIL,
    Alphabet,
    ExtendedLetter,
    LetterPattern,
    Word,
    WordUniverse,
    concat,
    enumerate_words,
    extend_alphabet,
    matches,
    parse_word,
    prefix_closure,
    render_word,
)

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "DataError",
    "DegenerateSessionError",
    "DiscretePath",
    "DsigError",
    "EMPTY_WORD",
    "ExtendedLetter",
    "HEAD",
    "LetterPattern",
    "NumericError",
    "SignatureResult",
    "SignatureTable",
    "TAIL",
    "TimeDomain",
    "Word",
    "WordFormatError",
    "WordUniverse",
    "compute_signature",
    "concat",
    "enumerate_words",
    "extend_alphabet",
    "extend_table",
    "first_letter_sign_invariance_check",
    "matches",
    "oracle_signature",
    "parse_signature_tsv",
    "parse_word",
    "prefix_closure",
    "quadratic_variation",
    "render_word",
    "__version__",
]

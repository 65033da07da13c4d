"""Array-in / mapping-out access to discrete signatures via the dsig CLI."""

from .client import ClientError, signature, words

__version__ = "0.1.0"

__all__ = ["ClientError", "signature", "words", "__version__"]

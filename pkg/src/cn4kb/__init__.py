"""Closure, validation and network analysis of ConceptNet 4 table dumps."""

from .errors import (CN4Error, DataError, FitError, IntegrityError, ParseError, SchemaError,
                     UndefinedError, UsageError)

__version__ = "0.1.0"

__all__ = [
    "CN4Error", "DataError", "FitError", "IntegrityError", "ParseError", "SchemaError",
    "UndefinedError", "UsageError", "__version__",
]

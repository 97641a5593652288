"""Dynamic configuration types, canonical keys and validation."""

from .canonical import canonical_form, canonical_key, canonical_numbering, encode, raw_form
from .config import (
    INT_MAX, INT_MIN, Configuration, ErrorFlag, Frame, ObjectRec, Processor, Ref, Request, Value, Waiting,
)
from .validate import graph_size, validate

__all__ = [
    "INT_MAX", "INT_MIN", "Configuration", "ErrorFlag", "Frame", "ObjectRec", "Processor",
    "Ref", "Request", "Value", "Waiting", "canonical_form", "canonical_key", "canonical_numbering", "encode",
    "raw_form",
    "graph_size", "validate",
]

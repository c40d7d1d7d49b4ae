"""Exception types shared across the package."""
from __future__ import annotations


class ValidationError(Exception):
    """Input data violates a documented contract (CLI exit code 1).

    I/O failures are deliberately NOT wrapped in this; they surface as the
    builtin OSError family and map to CLI exit code 2.
    """

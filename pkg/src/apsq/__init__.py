"""Exact computation of how close an arithmetic progression gets to the squares."""

from apsq.delta import DeltaResult, ProgressionParams, delta, delta_bruteforce, delta_square_scan
from apsq.errors import InvalidArgument, RegimeMismatch, SpecError

__version__ = "0.1.0"

__all__ = [
    "DeltaResult",
    "InvalidArgument",
    "ProgressionParams",
    "RegimeMismatch",
    "SpecError",
    "delta",
    "delta_bruteforce",
    "delta_square_scan",
]

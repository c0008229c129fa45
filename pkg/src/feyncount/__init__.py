"""Exact generating functions of zero-dimensional field theories and the
enumeration oracles that check them."""

from feyncount.engine import (
    ModelSpec,
    PartitionSeries,
    builtin_model,
    free_energy,
    pairing_bound,
    partition_function,
)
from feyncount.errors import CapExceeded, DomainError, FinitenessError, UsageError
from feyncount.series import BiPoly, TruncSeries

__all__ = [
    "BiPoly",
    "CapExceeded",
    "DomainError",
    "FinitenessError",
    "ModelSpec",
    "PartitionSeries",
    "TruncSeries",
    "UsageError",
    "builtin_model",
    "free_energy",
    "pairing_bound",
    "partition_function",
]

__version__ = "0.1.0"

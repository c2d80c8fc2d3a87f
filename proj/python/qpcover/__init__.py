"""Exact computations for coverings of quivers with potential.

The heavy lifting lives in the C++ extension module; this package re-exports
the workspace class and a few convenience helpers.
"""

from ._core import (
    QpError,
    QpInconclusiveError,
    QpInputError,
    Workspace,
    fixture_names,
)

__all__ = [
    "Workspace",
    "fixture_names",
    "QpError",
    "QpInputError",
    "QpInconclusiveError",
]

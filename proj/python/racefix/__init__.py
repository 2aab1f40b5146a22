"""Data-race repair for MiniMP programs."""

from ._core import (
    DuplicateClause,
    SyntaxError,
    UnsupportedConstruct,
    __version__,
    instrument,
    oracle_is_safe,
    parse,
    process_source,
    repair,
    solve_maxsat,
    solve_mhs,
    verify,
)

__all__ = [
    "DuplicateClause",
    "SyntaxError",
    "UnsupportedConstruct",
    "__version__",
    "instrument",
    "oracle_is_safe",
    "parse",
    "process_source",
    "repair",
    "solve_maxsat",
    "solve_mhs",
    "verify",
]

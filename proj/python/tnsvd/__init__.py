"""Accurate singular values of products of totally nonnegative bidiagonal factors."""

from fractions import Fraction

from . import _tnsvd
from ._tnsvd import (
    Chain,
    DomainError,
    GenerationError,
    OracleError,
    ParseError,
    StrictModeError,
    example,
    format_hex,
    oracle,
    reproduce,
    svd,
    verify,
)

__all__ = [
    "Chain",
    "DomainError",
    "GenerationError",
    "OracleError",
    "ParseError",
    "StrictModeError",
    "example",
    "format_hex",
    "generate",
    "oracle",
    "reproduce",
    "svd",
    "verify",
]


def _q(v):
    # ints, Fractions and strings like "3/7" all pass through exactly
    return str(Fraction(v)) if not isinstance(v, str) else v


def generate(family, x, y=(), cols=0, l=0, row_counts=(), col_counts=()):
    """Exact factor chain of a Cauchy, Vandermonde, Cauchy-Vandermonde or
    Bernstein-Vandermonde matrix with optionally repeated nodes."""
    return _tnsvd.generate(
        family,
        [_q(v) for v in x],
        [_q(v) for v in y],
        cols,
        l,
        list(row_counts),
        list(col_counts),
    )

"""Exact counting kernels for multiple character sums over prime fields."""

from .errors import InvariantError, PreconditionError
from .ff_core import FieldCtx, MultChar, char_eval, find_primitive_root, legendre_oracle
from .quadpoly import (
    PolyClass3, QuadPoly2, QuadPoly3, classify3, eval2, eval3, is_degenerate2, is_degenerate3,
    parse_poly, preset, shear_2_to_3,
)

__version__ = "0.1.0"

__all__ = [
    "InvariantError", "PreconditionError",
    "FieldCtx", "MultChar", "char_eval", "find_primitive_root", "legendre_oracle",
    "PolyClass3", "QuadPoly2", "QuadPoly3", "classify3", "eval2", "eval3", "is_degenerate2",
    "is_degenerate3", "parse_poly", "preset", "shear_2_to_3",
]

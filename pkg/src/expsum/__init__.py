"""Newton polygons of L-functions of one-variable exponential sums, computed exactly.

Two engines: direct enumeration over finite fields (lfun) and truncated Frobenius
matrices over p-adic cyclotomic rings (dworkmat), cross-checked against each other and
against the Hodge polygon (polygon) and the symbolic vertex bounds (dworksym).
"""

from __future__ import annotations

from .errors import (
    BadPrimeError,
    BudgetExceededError,
    ExpsumError,
    InsufficientPrecisionError,
    InvalidFunctionError,
    InvariantViolationError,
    SpecFileError,
)
from .lfun import l_function, newton_summary, np_of_l, zeta_numerator
from .polygon import Polygon, hodge_polygon
from .ratfun import RationalFunction, make_function, reduce_mod_p

__version__ = "0.1.0"

__all__ = [
    "BadPrimeError",
    "BudgetExceededError",
    "ExpsumError",
    "InsufficientPrecisionError",
    "InvalidFunctionError",
    "InvariantViolationError",
    "SpecFileError",
    "Polygon",
    "RationalFunction",
    "hodge_polygon",
    "l_function",
    "make_function",
    "newton_summary",
    "np_of_l",
    "reduce_mod_p",
    "zeta_numerator",
]

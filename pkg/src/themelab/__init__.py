"""themelab: exact computer algebra for monogenic regular (a,b)-modules.

The package builds canonical families of rank-k themes, embeds them into the
logarithmic model spaces, extracts Bernstein elements and fundamental
invariants, and decides isomorphism and invariance questions by exact
rational computation at explicit working precision.
"""

from ._backend import BACKEND
from .errors import (
    FactorizationFailed,
    Inconclusive,
    InvalidCanonicalPoint,
    NotAUnit,
    NotDivisible,
    NotNormalized,
    NotSolvable,
    NotThematic,
    Obstruction,
    ParseError,
    PrecisionError,
    PrecisionExceeded,
    PrecisionExhausted,
    ThemeLabError,
    WrongInvariants,
)
from .series import DEFAULT_PREC, Rational, TruncSeries, as_rational

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DEFAULT_PREC",
    "Rational",
    "TruncSeries",
    "as_rational",
    "ThemeLabError",
    "NotAUnit",
    "NotDivisible",
    "NotSolvable",
    "NotThematic",
    "NotNormalized",
    "Obstruction",
    "ParseError",
    "PrecisionError",
    "PrecisionExceeded",
    "PrecisionExhausted",
    "InvalidCanonicalPoint",
    "FactorizationFailed",
    "WrongInvariants",
    "Inconclusive",
    "__version__",
]

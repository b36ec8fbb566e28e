"""Double-base ({2,3}-integer) representations, spans and non-representability certificates."""

from dbspan.core23 import (
    ReprClass,
    Representation,
    RepresentationError,
    TwoThreeInteger,
    canonicalize,
    classify,
    lengthen,
    value,
)

__version__ = "0.1.0"

__all__ = [
    "ReprClass",
    "Representation",
    "RepresentationError",
    "TwoThreeInteger",
    "canonicalize",
    "classify",
    "lengthen",
    "value",
    "__version__",
]

"""Exact p-local model of an endomorphism dga: structure maps, homology with
witnesses, products and Massey products."""

from .arith import Context, PadicFraction, PadicInt, TOP, adams_unit, rpow, s, s_tilde, valuation
from .cochain import Cochain, differential, verify_dd, window
from .errors import (
    ConfigError,
    DegreeMismatch,
    EndoDGAError,
    NegativeTwistExponent,
    PrecisionExhausted,
    ShapeMismatch,
    TruncationOverflow,
    UntrustedSupport,
)
from .homology import (
    GroupDescriptor,
    HomologyClass,
    NotBoundary,
    boundary_witness,
    class_of,
    class_order,
    homology_group,
    is_cycle,
)
from .products import MasseyResult, RepresentativeMode, cohomology_product, indeterminacy, massey
from .theta import ThetaSeq, seq_product

__version__ = "0.1.0"

__all__ = [
    "Cochain",
    "ConfigError",
    "Context",
    "DegreeMismatch",
    "EndoDGAError",
    "GroupDescriptor",
    "HomologyClass",
    "MasseyResult",
    "NegativeTwistExponent",
    "NotBoundary",
    "PadicFraction",
    "PadicInt",
    "PrecisionExhausted",
    "RepresentativeMode",
    "ShapeMismatch",
    "TOP",
    "ThetaSeq",
    "TruncationOverflow",
    "UntrustedSupport",
    "adams_unit",
    "boundary_witness",
    "class_of",
    "class_order",
    "cohomology_product",
    "differential",
    "homology_group",
    "indeterminacy",
    "is_cycle",
    "massey",
    "rpow",
    "s",
    "s_tilde",
    "seq_product",
    "valuation",
    "verify_dd",
    "window",
]

"""Exception hierarchy shared by every layer of the package."""


class EndoDGAError(Exception):
    """Base class for all package errors."""


class ConfigError(EndoDGAError, ValueError):
    """Invalid global parameters (prime, precision, length or unit)."""


class PrecisionExhausted(EndoDGAError):
    """A computation needs more p-adic digits than the context carries."""


class ShapeMismatch(EndoDGAError, ValueError):
    """A cochain does not have the component shape of its degree."""


class DegreeMismatch(EndoDGAError, ValueError):
    """Classes or cochains were paired in incompatible degrees."""


class NegativeTwistExponent(EndoDGAError):
    """A product coefficient would need a negative (or undefined) power of p."""


class TruncationOverflow(EndoDGAError):
    """A product would produce a coefficient at an index >= N."""


class UntrustedSupport(EndoDGAError):
    """A sequence is supported too close to the truncation for exact answers."""

"""
SatakeForge - Error types

Every failure the library can signal has its own class so that callers and the
CLI can tell bad input (exit 2) from a failed identity (exit 1).
"""


class SatakeForgeError(Exception):
    """Base class for all library errors"""


# Input validation

class DimensionMismatch(SatakeForgeError, ValueError):
    pass


class IndexOutOfRange(SatakeForgeError, ValueError):
    pass


class InvalidPartition(SatakeForgeError, ValueError):
    pass


class InvalidPermutation(SatakeForgeError, ValueError):
    pass


class InvalidExponent(SatakeForgeError, ValueError):
    pass


class NotRestricted(SatakeForgeError, ValueError):
    pass


class WeightNotRestricted(NotRestricted):
    pass


class DegenerateWeight(SatakeForgeError, ValueError):
    pass


class NotCentral(SatakeForgeError, ValueError):
    pass


class InvalidOrder(SatakeForgeError, ValueError):
    pass


class DegreeOutOfRange(SatakeForgeError, ValueError):
    pass


class NotSymmetric(SatakeForgeError, ValueError):
    pass


class NotIntegral(SatakeForgeError, ValueError):
    pass


class NotInParabolic(SatakeForgeError, ValueError):
    pass


class ConfigError(SatakeForgeError, ValueError):
    pass


# Valuation / reduction

class NegativeValuation(SatakeForgeError, ArithmeticError):
    pass


class UnitAmbiguity(SatakeForgeError, ArithmeticError):
    """A valuation-0 monomial mixes pi and q, so its residue is undetermined"""


# Resource limits

class DepthTooSmall(SatakeForgeError):
    pass


class CosetCountMismatch(SatakeForgeError, AssertionError):
    """Enumerated Iwahori cosets disagree with the index p^{sum |mu_i - mu_k|}"""


class FieldTooLarge(SatakeForgeError):
    pass


class TruncationOverflow(SatakeForgeError):
    pass


class NotFactorizable(SatakeForgeError):
    pass


class NotBlockScalar(SatakeForgeError, ValueError):
    """Frobenius power is not diagonal on an index class"""


class ShapeIdentityFailure(SatakeForgeError, AssertionError):
    """Raised when the parabolic shape identity fails on supplied data"""


class NonRegularDigits(UserWarning):
    """Digits with repeated entries: the presentation is not a genuine lowest alcove one"""

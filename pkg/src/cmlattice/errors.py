"""Exception hierarchy.

Every error carries a short machine-readable ``code`` so the CLI can report
it without parsing messages.
"""
from __future__ import annotations


class CmLatticeError(Exception):
    code = "error"

    def __init__(self, message: str = "", code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code


class ValidationError(CmLatticeError):
    """Input is well-formed but violates a mathematical precondition."""

    code = "validation"


class ParseError(CmLatticeError):
    code = "parse"

    def __init__(self, message: str, location: str | None = None, code: str | None = None):
        if location:
            message = f"{location}: {message}"
        super().__init__(message, code)
        self.location = location


class MalformedComplex(ValidationError):
    code = "malformed-complex"


class NotAChainMap(ValidationError):
    code = "not-a-chain-map"


class NotPointed(ValidationError):
    code = "not-pointed"


class LatticeNotFull(ValidationError):
    code = "lattice-not-full"


class DegenerateInput(ValidationError):
    code = "degenerate-input"


class NotNormal(ValidationError):
    code = "not-normal"


class OutsideCone(ValidationError):
    code = "outside-cone"


class NotACover(ValidationError):
    code = "not-a-cover"


class NotRadicalDetected(ValidationError):
    code = "not-radical"


class ExponentOutsideCone(ValidationError):
    code = "exponent-outside-cone"


class IndexOutOfRange(ValidationError):
    code = "index-out-of-range"


class NotAnOrderIdeal(ValidationError):
    code = "not-an-order-ideal"


class InvalidPair(ValidationError):
    code = "invalid-pair"


class NonCommutingDiamond(ValidationError):
    code = "non-commuting-diamond"


class EmptyDifference(ValidationError):
    code = "empty-difference"


class ZeroModule(ValidationError):
    code = "zero-module"


class EmptyTable(ValidationError):
    code = "empty-table"


class InternalInconsistency(CmLatticeError):
    """Two routes that must agree by theory disagreed: always a bug."""

    code = "internal-inconsistency"

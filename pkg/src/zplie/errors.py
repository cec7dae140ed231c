"""Exception hierarchy shared by every module of the package."""


class ZpError(Exception):
    """Base class for all errors raised by zplie."""


class MalformedScalar(ZpError):
    pass


class EmptyModulus(ZpError):
    pass


class NonUnit(ZpError):
    pass


class UnsupportedPrime(ZpError):
    pass


class HenselFailure(ZpError):
    pass


class NoRoot(ZpError):
    pass


class MalformedPolynomial(ZpError):
    pass


class MalformedMatrix(ZpError):
    pass


class RankMismatch(ZpError):
    pass


class ValidationError(ZpError):
    """A Lie lattice failed antisymmetry, integrality or Jacobi checks."""

    def __init__(self, message, triple=None):
        super().__init__(message)
        self.triple = triple


class NotClosed(ZpError):
    pass


class NotHomomorphism(ZpError):
    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class DimensionMismatch(ZpError):
    pass


class OutOfDomain(ZpError):
    pass


class NoCertificate(ZpError):
    pass


class ShapeMismatch(ZpError):
    pass


class NotSolvable(ZpError):
    pass


class NotIdeal(ZpError):
    pass


class Unsupported(ZpError):
    pass

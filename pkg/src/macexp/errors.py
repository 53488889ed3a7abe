"""Exception types raised by the library.

All of them derive from ``MacexpError`` (itself a ``ValueError``) so the CLI
can map any computation failure to exit status 1.
"""


class MacexpError(ValueError):
    pass


class InvalidPmf(MacexpError):
    pass


class NotAdditive(MacexpError):
    pass


class ZeroCapacity(MacexpError):
    pass


class NonPrimeModulus(MacexpError):
    pass


class IndependenceViolation(MacexpError):
    """The virtual noise was found to depend on the virtual inputs.

    This cannot happen for a correct transformation, so seeing it means a bug.
    """


class InvalidDims(MacexpError):
    pass


class TooLarge(MacexpError):
    pass

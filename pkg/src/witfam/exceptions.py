"""Exception types raised across the package."""


class WitfamError(Exception):
    """Base class for all package errors."""


class NotHermitian(WitfamError, ValueError):
    pass


class NotUnitary(WitfamError, ValueError):
    pass


class InvalidState(WitfamError, ValueError):
    """Matrix is not a valid two-qubit density matrix."""


class InvalidDistribution(WitfamError, ValueError):
    """Probability vector has negative entries or does not sum to one."""


class InvalidParameter(WitfamError, ValueError):
    pass


class BadIndex(WitfamError, ValueError):
    pass


class ProductKet(WitfamError, ValueError):
    """A ket expected to be entangled has a vanishing Schmidt coefficient."""


class SamplingExhausted(WitfamError, RuntimeError):
    pass


class MissingEntry(WitfamError, KeyError):
    pass


class NotInformationallyComplete(WitfamError, ValueError):
    pass


class Exhausted(WitfamError, RuntimeError):
    """No unmeasured witness family is left to choose from."""


class NotConverged(WitfamError, RuntimeError):
    pass


class ConfigError(WitfamError, ValueError):
    pass

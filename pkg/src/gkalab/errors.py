"""Exception hierarchy shared by every gkalab module."""


class GKALabError(Exception):
    """Base class for all library errors."""


class NonInvertible(GKALabError, ZeroDivisionError):
    pass


class LengthMismatch(GKALabError, ValueError):
    pass


class ParamError(GKALabError, ValueError):
    pass


class SelfKeyError(GKALabError, ValueError):
    pass


class ArityError(GKALabError, ValueError):
    pass


class DomainError(GKALabError, ValueError):
    pass


class ConfigError(GKALabError, ValueError):
    pass


class PolicyError(GKALabError):
    """The channel policy does not grant the requested capability."""


class AuthError(GKALabError):
    """AEAD open failed: wrong key, tampered ciphertext or associated data."""

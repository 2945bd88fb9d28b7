"""Exception hierarchy shared by all operlab modules."""


class OperlabError(Exception):
    """Base class for every error raised by the library."""


class ValidationError(OperlabError, ValueError):
    """A parameter failed validation; ``param`` names it."""

    def __init__(self, param, message):
        super().__init__(f"{param}: {message}")
        self.param = param


class PrimeTooSmall(ValidationError):
    def __init__(self, message):
        super().__init__("p", message)


class NotPrime(ValidationError):
    def __init__(self, message):
        super().__init__("p", message)


class VerificationFailure(OperlabError):
    """An internal oracle cross-check disagreed."""


# rings
class NonSeparableReduction(OperlabError):
    pass


class NonSplitReduction(OperlabError):
    pass


class ZeroInput(OperlabError, ValueError):
    pass


class FieldMismatch(OperlabError, ValueError):
    pass


# rootdata
class UnrealizedFamily(OperlabError):
    pass


# elliptic
class SingularCurve(ValidationError):
    def __init__(self, message):
        super().__init__("curve", message)


class UnsupportedForm(OperlabError):
    pass


class Supersingular(OperlabError):
    pass


# opers
class NotDormant(OperlabError):
    pass


class SupersingularInput(OperlabError):
    pass


class SingularMatrix(OperlabError, ValueError):
    pass


# witt_opers
class NotRegular(OperlabError, ValueError):
    pass


class NotDormantModP(OperlabError):
    pass


class RepeatedEigenvalues(OperlabError):
    pass


class SideMismatch(OperlabError, ValueError):
    pass


# dop_local
class LevelOutOfRange(OperlabError, ValueError):
    pass

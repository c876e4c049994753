"""Exception hierarchy.  Every error raised by the package derives from SadicError."""


class SadicError(Exception):
    """Base class."""


class InputError(SadicError, ValueError):
    """Malformed input: bad letters, alphabets, files."""


class InvalidLetter(InputError):
    pass


class AlphabetMismatch(InputError):
    pass


class EmptyImage(InputError):
    """A substitution maps some letter to the empty word."""


class EmptyPattern(InputError):
    pass


class WordTooLong(InputError):
    pass


class ParseError(InputError):
    pass


class EverywhereGrowingRequired(SadicError):
    pass


class LevelTooSmall(SadicError):
    """The requested level n is not (sigma, w)-large."""


class DegenerateSpectrum(SadicError):
    """Two strata on an accessibility chain have eigenvalues that cannot be separated."""


class SingularSystem(SadicError):
    pass


class CompatibilityViolation(SadicError):
    pass


class HorizonExceeded(SadicError):
    pass


class ResourceError(SadicError):
    """Computation hit a budget or iteration cap."""


class BudgetExceeded(ResourceError):
    pass


class NonConvergence(ResourceError):
    pass

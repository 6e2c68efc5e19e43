# gaussian_petz/utils/errors.py
"""Exception hierarchy. Library code raises; only the command line maps to exit codes."""

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_NOT_FAITHFUL = 2
EXIT_MALFORMED = 3


class GaussianPetzError(Exception):
    pass


class StructuralError(GaussianPetzError, ValueError):
    """Shapes, dimensions or JSON layout do not fit together."""


class DomainError(GaussianPetzError, ValueError):
    """Input is well formed but outside the mathematical domain of the operation."""


class NonFaithfulError(DomainError):
    """A state that must have full support has a symplectic eigenvalue at (or below) 1."""

    def __init__(self, message, term=None, min_symplectic_eigenvalue=None):
        super().__init__(message)
        self.term = term
        self.min_symplectic_eigenvalue = min_symplectic_eigenvalue

    def __str__(self):
        base = super().__str__()
        if self.term is None:
            return base
        return f"[{self.term}] {base}"


class NotCompletelyPositiveError(DomainError):
    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class ConfigurationError(GaussianPetzError, ValueError):
    pass


class InvalidInputError(GaussianPetzError, ValueError):
    """An input file describes an object that cannot exist, such as a non-CP channel."""


class SearchAbortedError(GaussianPetzError):
    """A search worker stopped before covering its sample range."""


class OraclePrecisionError(GaussianPetzError):
    pass


class InvalidOperatorError(GaussianPetzError):
    pass


def exit_code_for(error):
    """Exit status the command line reports for an exception."""
    if isinstance(error, NonFaithfulError):
        return EXIT_NOT_FAITHFUL
    if isinstance(error, (StructuralError, ConfigurationError, InvalidInputError)):
        return EXIT_MALFORMED
    return EXIT_FAILURE

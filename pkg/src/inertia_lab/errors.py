"""Exception types shared across the package.

Every error raised by this package derives from InertiaLabError so callers
can catch the whole family at once. The CLI maps these onto exit codes.
"""


class InertiaLabError(Exception):
    """Base class for all package errors."""


class DomainError(InertiaLabError):
    """Evaluation requested outside a schedule's or objective's domain."""


class GridError(InertiaLabError):
    """Evaluation grid is empty, non-monotone, or otherwise unusable."""


class ParamError(InertiaLabError):
    """A recipe or condition parameter violates its stated bounds."""


class ConfigError(InertiaLabError):
    """A run configuration is malformed (unknown keys, bad ranges, ...)."""


class UnsupportedRecipeError(InertiaLabError):
    """The requested certificate recipe does not cover the given coefficients."""


class NonmonotoneBError(InertiaLabError):
    """b(t) must be nondecreasing for this recipe and is not."""


class DivergentTailError(InertiaLabError):
    """The tail integral of 1/p_gamma diverges (or could not be shown finite)."""


class QuadratureError(InertiaLabError):
    """Adaptive quadrature failed to reach the requested accuracy."""


class MissingCertificateError(InertiaLabError):
    """This condition set needs an explicit certificate and none was given."""


class MissingProxError(InertiaLabError):
    """The objective carries no proximal oracle."""


class MissingArgminError(InertiaLabError):
    """No reference minimizer is available (known_argmin absent, no projector)."""


class NotPSDError(InertiaLabError):
    """Quadratic matrix is not positive semidefinite; carries the witness."""

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class WindowError(InertiaLabError):
    """A fit/check window selects no samples or lies outside the data."""


class InsufficientDataError(InertiaLabError):
    """Too few samples for the requested fit."""

"""Exception types shared across the package."""

from __future__ import annotations

__all__ = [
    "MixPoissonError",
    "SingularSeriesError",
    "SeriesOrderExceededError",
    "SeriesDivergenceError",
    "DensityUnavailableError",
    "MgfRegionError",
    "NoClosedFormError",
    "TenabilityError",
    "EnumerationCapError",
    "UnknownModelError",
]


class MixPoissonError(Exception):
    """Base class for package-specific errors."""


class SingularSeriesError(MixPoissonError):
    """Negative power of a series whose constant term vanishes."""


class SeriesOrderExceededError(MixPoissonError):
    """A coefficient beyond the configured truncation order was requested."""


class SeriesDivergenceError(MixPoissonError):
    """The moment series for a PMF value grows without bound."""


class DensityUnavailableError(MixPoissonError):
    """The mixing law is moment-only and has no usable density."""


class MgfRegionError(MixPoissonError):
    """Moment generating function evaluated outside its convergence region."""


class NoClosedFormError(MixPoissonError):
    """No closed-form PMF is known for this mixing family."""


class TenabilityError(MixPoissonError):
    """An urn history tried to remove balls that are not present."""


class EnumerationCapError(MixPoissonError):
    """Exhaustive enumeration would exceed the configured hard cap."""


class UnknownModelError(MixPoissonError):
    """Unrecognized combinatorial model tag."""

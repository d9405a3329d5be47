"""Shared exception base for the package."""


class OlacError(Exception):
    """Base class for all errors raised by this package."""

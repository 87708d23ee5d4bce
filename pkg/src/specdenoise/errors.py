"""Exception hierarchy shared by the library and the command-line tool."""


class SpecDenoiseError(Exception):
    """Base class for all package errors."""


class ConfigError(SpecDenoiseError):
    """Invalid configuration (bad value, missing field, unknown schema)."""

    exit_code = 2


class DataError(SpecDenoiseError):
    """Invalid or inconsistent data (files, shapes, alignment, degenerate inputs)."""

    exit_code = 3


class NumericError(SpecDenoiseError):
    """Numerical failure (non-finite loss, divergence)."""

    exit_code = 4


class CheckpointError(DataError):
    """Malformed, truncated or inconsistent checkpoint file."""

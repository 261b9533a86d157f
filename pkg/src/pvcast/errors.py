"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: configuration problems exit 2, data
problems exit 3, model/fitting problems exit 4.
"""


class PvcastError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(PvcastError):
    """Invalid or incomplete pipeline configuration."""


class SchemaError(PvcastError):
    """Input file does not match the declared column schema."""


class DataError(PvcastError):
    """Input data violates a structural requirement (duplicates, bad rows)."""


class AlignmentError(DataError):
    """Series passed together do not share the same hourly grid."""


class DegenerateDataError(DataError):
    """A statistic is undefined on this input (constant data, too few points)."""


class TrainingError(PvcastError):
    """Network training failed (divergence, impossible shapes)."""


class FitError(PvcastError):
    """Distribution fitting failed on every attempted start."""

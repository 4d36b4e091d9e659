"""Exception types shared across the package."""


class NccSenseError(Exception):
    """Base class for all package-specific errors."""


class DegenerateInputError(NccSenseError):
    """A sample block is unusable, e.g. a covariance diagonal entry is ~0."""


class IQFormatError(NccSenseError):
    """A baseband capture file is malformed or inconsistent."""


class CalibrationError(NccSenseError):
    """Too few calibration trials for the requested false-alarm target."""


class ConfigError(NccSenseError):
    """A run configuration file is malformed or fails validation."""

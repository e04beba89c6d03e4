"""
Exception hierarchy.

Every error carries the process exit code the CLI reports for it:
0 success, 1 internal error, 2 input error, 3 configuration/kind error.
"""


class DefCharError(Exception):
    """Base class for all library errors."""
    exit_code = 1


# Input errors (exit 2)

class InputError(DefCharError):
    exit_code = 2


class MalformedImage(InputError):
    """Encoded stream could not be decoded as PNG/JPEG."""


class EmptyMask(InputError):
    """Mask has no set bit."""


class EmptyRegion(InputError):
    """A colour statistic was requested over an empty region."""


class TooSmall(InputError):
    """Image is below the minimum size an operation needs."""


class DegenerateBox(InputError):
    """Polygon bounding box has zero area."""


class ZeroLengthEdge(InputError):
    """Two consecutive polygon vertices coincide."""


class DatasetError(InputError):
    """Manifest is unreadable or references missing/invalid files."""


# Metric errors (exit 1)

class MetricError(DefCharError):
    pass


class DimensionMismatch(MetricError):
    pass


class ZeroChannel(MetricError):
    """A channel of an image is identically zero (SAM undefined)."""


class DegenerateStatistics(MetricError):
    """Zero variance or zero mean-square term (UIQ undefined)."""


class ZeroVector(MetricError):
    pass


class BothZero(MetricError):
    pass


class NegativeInput(MetricError):
    pass


# Configuration errors (exit 3)

class ConfigurationError(DefCharError):
    exit_code = 3


class KindMismatch(ConfigurationError):
    pass


class MixedKinds(ConfigurationError):
    pass


class UnnormalizedVector(ConfigurationError):
    pass


class AlreadyNormalized(ConfigurationError):
    pass


class UnknownMetric(ConfigurationError):
    pass


class UnknownFeature(ConfigurationError):
    pass


# Store errors (exit 2)

class StoreError(DefCharError):
    exit_code = 2


class StoreIOError(StoreError):
    pass


class FormatVersionMismatch(StoreError):
    pass


class ChecksumMismatch(StoreError):
    pass


class CorruptStore(StoreError):
    """Data file rows do not match the manifest."""


# Evaluation errors (exit 1)

class EvaluationError(DefCharError):
    pass


class EmptyClass(EvaluationError):
    pass

"""Exception hierarchy shared by every module."""


class QDecayError(Exception):
    pass


class DomainError(QDecayError, ValueError):
    """A point (or finite-difference stencil) lies outside the chart domain."""


class MetricValidityError(QDecayError, ValueError):
    """The metric is not symmetric positive definite at an evaluated point."""


class DegeneracyError(QDecayError, ValueError):
    pass


class NormalizationError(QDecayError, ValueError):
    pass


class ShapeError(QDecayError, ValueError):
    pass


class ProfileError(QDecayError, ValueError):
    """A warp or gradient profile violates its positivity/integrability contract."""


class ParameterError(QDecayError, ValueError):
    pass


class GridError(QDecayError, ValueError):
    pass


class MonotonicityError(QDecayError, ValueError):
    pass


class InputError(QDecayError, ValueError):
    pass


class MethodError(QDecayError, ValueError):
    """The requested numerical method cannot handle this metric."""


class BudgetError(QDecayError, RuntimeError):
    pass


class SampleError(QDecayError, ValueError):
    pass


class RangeError(QDecayError, ValueError):
    pass


class CapError(QDecayError, ValueError):
    """A capped rotationally symmetric profile is not smooth at its center."""


class ConstructionError(QDecayError, ValueError):
    pass


class ConfigError(QDecayError, ValueError):
    pass


class CapabilityError(QDecayError, ValueError):
    """A check was requested for a metric it cannot be applied to."""


class ReportIOError(QDecayError, OSError):
    """A report could not be written."""

"""
QMetric - quantum metrics on finite-dimensional noncommutative spaces.
Errors raised by QMetric.
"""


class QMetricError(ValueError):
    """Base class for every QMetric usage error."""


class ShapeMismatchError(QMetricError):
    """Operands live on different algebra shapes."""


class NotSelfAdjointError(QMetricError):
    """An eigen-based primitive received a non self-adjoint element."""


class PreconditionError(QMetricError):
    """An operation was called outside the domain where it is defined."""


class MetricAxiomError(QMetricError):
    """A classical distance matrix violates the metric axioms."""


class ExchangeFormatError(QMetricError):
    """A document does not follow the matrix exchange format."""


class SamplerError(QMetricError, RuntimeError):
    """The (iii)'' sampler could not produce enough admissible test elements."""

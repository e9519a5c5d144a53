"""Exception types shared across the package."""


class CRFlowError(Exception):
    """Base class for all package errors."""


class PoleSingularity(CRFlowError):
    """Point too close to the chart's singular pole."""


class NonPositiveScale(CRFlowError):
    """Dilation parameter must be strictly positive."""


class TruncationLoss(CRFlowError):
    """Spectral projection residual exceeds the configured tolerance."""


class BudgetExceeded(CRFlowError):
    """Requested basis would exceed the configured memory budget."""


class NonPositiveFactor(CRFlowError):
    """Conformal factor lost positivity on the grid."""


class DegenerateDenominator(CRFlowError):
    """Normalizing integral vanished."""


class PositivityLoss(CRFlowError):
    """Flow step produced a non-positive conformal factor at dt_min."""


class StepRejected(CRFlowError):
    """Flow step could not satisfy the energy monotonicity gate at dt_min."""


class NoConvergence(CRFlowError):
    """Centering iteration did not converge."""


class NonConvergentQuadrature(CRFlowError):
    """Adaptive quadrature error estimate above tolerance at max refinement."""


class IndexOutOfRange(CRFlowError):
    """Morse index outside the admissible range [0, 2n+1]."""


class NonPositiveMin(CRFlowError):
    """min f must be positive for the bubble-ratio test."""


class ConfigError(CRFlowError):
    """Scenario configuration is malformed or inconsistent."""

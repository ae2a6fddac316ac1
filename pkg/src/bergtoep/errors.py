"""Exception types shared across the package.

The CLI maps these onto exit codes: unsupported symbols and invalid input
are configuration errors (exit 1), numerical non-convergence is exit 2,
and a failed trace-class gate is exit 3.
"""

from __future__ import annotations


class UnsupportedSymbolError(ValueError):
    """A (symbol, measure) combination has no defined functional here."""


class BoundaryError(ValueError):
    """An evaluation point is too close to the unit circle."""


class NumericalFailureError(RuntimeError):
    """An iteration or sweep budget was exhausted before convergence.

    ``partial`` carries the best value reached, ``achieved`` the residual
    accuracy at the point of giving up (when meaningful).
    """

    def __init__(self, message, partial=None, achieved=None):
        super().__init__(message)
        self.partial = partial
        self.achieved = achieved


class NotTraceClassError(RuntimeError):
    """The boundary-weight integral gating the trace diverges.

    ``divergence_exponent`` is the endpoint power of (1 - t) that fails
    integrability.
    """

    def __init__(self, message, divergence_exponent):
        super().__init__(message)
        self.divergence_exponent = divergence_exponent

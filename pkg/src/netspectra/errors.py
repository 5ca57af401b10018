"""Exception hierarchy shared across the package.

The CLI maps :class:`ConfigError` to exit code 1 and every
:class:`NumericError` / :class:`GenerationError` to exit code 2.
"""


class NetSpectraError(Exception):
    """Base class for all package errors."""


class ConfigError(NetSpectraError, ValueError):
    """Invalid parameters or configuration."""


class GraphError(NetSpectraError, ValueError):
    """Structurally invalid graph (self-loop, duplicate edge, bad weight)."""


class EdgeListError(GraphError):
    """Malformed edge-list file; ``lineno`` is 1-based."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class GenerationError(NetSpectraError):
    """Random graph generation could not produce a usable graph."""


class NumericError(NetSpectraError, ArithmeticError):
    """Numerical failure: non-convergence, undefined quantity, degenerate input."""


class DegenerateNodeError(NumericError):
    """A node has zero weighted degree, so D^{-1/2} is undefined."""


class DisconnectedGraphError(NumericError):
    """The spectral gap vanishes; hitting times are infinite."""


class DegenerateSpectrumError(NumericError):
    """All non-trivial eigenvalues coincide; the histogram range is empty."""


class CensoredEstimateError(NumericError):
    """A Monte Carlo walk failed to visit a node before the step cap."""

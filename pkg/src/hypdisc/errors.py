"""Exception types shared across the package."""


class HypdiscError(Exception):
    """Base class for all package errors."""


class DegenerateGeodesic(HypdiscError):
    """Boundary endpoints coincide (or are closer than the configured collar)."""


class NumericalBlowup(HypdiscError):
    """A Moebius image landed on the unit circle to machine precision."""


class StencilOutOfDisc(HypdiscError):
    """Finite-difference stencil would leave the open disc."""


class TailTooFat(HypdiscError):
    """Declared decay cannot dominate the integrand growth on the truncated tail."""


class QuadratureNotConverged(HypdiscError):
    """Node-doubling error estimate exceeded the requested tolerance."""


class GridTooCoarse(HypdiscError):
    """Tabulated data does not cover, or cannot resolve, the requested slice."""


class AnalyticStripExceeded(HypdiscError):
    """Complex frequency outside the symbol's declared strip of holomorphy."""


class Mu0Pole(HypdiscError):
    """Evaluation at a pole of the meromorphic normalization factor."""

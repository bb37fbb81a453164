"""hypdisc: harmonic analysis and symbol flows on the hyperbolic disc."""

__version__ = "0.1.0"

"""Trust-gated social learning with emergent communication."""

__version__ = "0.1.0"

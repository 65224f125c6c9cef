"""Exact Witt vector, sheared Witt ring and ring-stack model computations over finite rings."""

__version__ = "0.1.0"

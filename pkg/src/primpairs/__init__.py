"""Primitive pairs (f(e), g(e)) with prescribed traces in finite field extensions."""

__version__ = "0.1.0"

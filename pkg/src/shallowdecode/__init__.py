"""Shallow-circuit decoding of the Hadamard code, with classical baselines."""

__version__ = "0.1.0"

"""Exact verification of inner actions of Dipper-Donkin quantum GL2 on C(1,3) = M4."""

__version__ = "0.1.0"

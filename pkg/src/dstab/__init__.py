"""Stability and D-stability analysis of real matrices over LMI regions."""

__version__ = "0.1.0"

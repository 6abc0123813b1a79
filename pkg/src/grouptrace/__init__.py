"""Exact trace maps for finite group-scheme quotients, toric cyclic covers and F-signatures."""

__version__ = "0.1.0"

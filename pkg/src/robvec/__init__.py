"""Finite-instance laboratory for robust vector optimization duality."""
__version__ = "0.1.0"

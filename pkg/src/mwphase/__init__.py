"""Microwave photonic phase-gate toolkit."""
__version__ = "0.1.0"

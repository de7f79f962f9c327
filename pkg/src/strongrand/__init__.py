"""Threshold-based random treatment assignment lists for controlled trials."""

__version__ = "0.1.0"

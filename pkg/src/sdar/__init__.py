"""Spatially decoupled action repetition for continuous control."""

__version__ = "0.1.0"

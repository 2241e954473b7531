"""Computational companion to exponential Folkman-number bounds."""

__version__ = "0.1.0"

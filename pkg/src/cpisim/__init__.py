"""Chirped-pulse interferometry simulator."""

__version__ = "0.1.0"

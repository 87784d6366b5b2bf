"""Exact search for perfect powers in polynomial orbits over Q."""

__version__ = "0.1.0"

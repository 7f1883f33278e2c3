"""Automatic structures, coset systems and asynchronous HNN structures for
finitely presented groups."""

__version__ = "0.1.0"

"""Collaboration-network formation in (spatial) Cournot oligopolies."""

__version__ = "0.1.0"

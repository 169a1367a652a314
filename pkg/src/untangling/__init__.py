"""Deciding whether a graph drawn on an orientable surface can be untangled."""

__version__ = "0.1.0"

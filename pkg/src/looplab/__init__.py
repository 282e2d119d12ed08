"""Exact combinatorics of the dense O(1) loop model on a cylinder."""

__version__ = "0.1.0"

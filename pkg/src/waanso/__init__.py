"""Wavelet clustering and swarm-based task mapping for mesh manycore chips."""

__version__ = "0.1.0"

"""Coloured-graph combinatorics, melonic Schwinger-Dyson numerics and complex
RG flows for a rank-5 quartic tensor field theory."""

__version__ = "0.1.0"

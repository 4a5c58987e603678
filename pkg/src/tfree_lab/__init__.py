"""Executable laboratory for maximum cuts and maximum triangle-free subgraphs of random graphs."""

__version__ = "0.1.0"

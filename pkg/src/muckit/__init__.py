"""Minimal unsatisfiable core extraction on top of a proof-logging CDCL solver."""

__version__ = "0.1.0"

"""Exact computations in KLR algebras and the diagrammatic categorified quantum group."""

__version__ = "0.1.0"

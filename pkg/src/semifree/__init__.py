"""Exact symbolic engine for finitely generated semifree dg categories."""

__version__ = "0.1.0"
